#include "qci/interp.hpp"

#include <algorithm>
#include <cmath>

namespace qci {
namespace {

struct Stencil {
    std::ptrdiff_t i0;
    double t;  // position relative to node i0 + 1, in units of h
};

Stencil locate(std::size_t n, double x0, double h, double x) {
    const double u = (x - x0) / h;
    auto i = static_cast<std::ptrdiff_t>(std::floor(u));
    const auto last = static_cast<std::ptrdiff_t>(n) - 3;
    const std::ptrdiff_t i0 = std::clamp<std::ptrdiff_t>(i - 1, 0, std::max<std::ptrdiff_t>(last - 1, 0));
    return {i0, u - static_cast<double>(i0 + 1)};
}

}  // namespace

double cubic_uniform(std::span<const double> y, double x0, double h, double x) {
    const auto [i0, t] = locate(y.size(), x0, h, x);
    const double y0 = y[i0], y1 = y[i0 + 1], y2 = y[i0 + 2], y3 = y[i0 + 3];
    // nodes at t = -1, 0, 1, 2
    const double l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    const double l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    const double l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
    return l0 * y0 + l1 * y1 + l2 * y2 + l3 * y3;
}

double cubic_uniform_prime(std::span<const double> y, double x0, double h, double x) {
    const auto [i0, t] = locate(y.size(), x0, h, x);
    const double y0 = y[i0], y1 = y[i0 + 1], y2 = y[i0 + 2], y3 = y[i0 + 3];
    const double d0 = -(3.0 * t * t - 6.0 * t + 2.0) / 6.0;
    const double d1 = (3.0 * t * t - 4.0 * t - 1.0) / 2.0;
    const double d2 = -(3.0 * t * t - 2.0 * t - 2.0) / 2.0;
    const double d3 = (3.0 * t * t - 1.0) / 6.0;
    return (d0 * y0 + d1 * y1 + d2 * y2 + d3 * y3) / h;
}

}  // namespace qci
