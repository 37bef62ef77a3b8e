#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qci::quad {

/// Adaptive Simpson rule with absolute tolerance (Lyness' stopping test).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        int max_depth = 48);

/// Sorted, de-duplicated breakpoints of [a, b] including both ends.
std::vector<double> split_points(double a, double b, std::span<const double> interior);

/// Adaptive Gauss-Kronrod (31 points) on every piece between breakpoints. F may return real or
/// complex values.
template <class F>
auto integrate(F&& f, double a, double b, double rel_tol, std::span<const double> breaks = {},
               unsigned max_depth = 18) -> decltype(f(a)) {
    using R = decltype(f(a));
    R total{};
    const auto pts = split_points(a, b, breaks);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            f, pts[i], pts[i + 1], max_depth, rel_tol);
    }
    return total;
}

/// Fixed 20-point Gauss-Legendre on `panels` equal panels of [a, b].
template <class F>
auto gauss_panels(F&& f, double a, double b, int panels) -> decltype(f(a)) {
    using R = decltype(f(a));
    R total{};
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        total += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, lo + h);
    }
    return total;
}

}  // namespace qci::quad
