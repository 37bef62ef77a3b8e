#pragma once

// Error-free transformations shared by the scalar kernel and the tail loops of
// the SIMD kernels.

#include <cmath>

namespace qci::simd::eft {

inline void two_sum(double a, double b, double& s, double& e) noexcept {
    s = a + b;
    const double z = s - a;
    e = (a - (s - z)) + (b - z);
}

inline void two_prod(double a, double b, double& p, double& e) noexcept {
    p = a * b;
    e = std::fma(a, b, -p);
}

/// Running state of a compensated dot product: value = hi + lo.
struct Dot2Acc {
    double hi = 0.0;
    double lo = 0.0;

    void add_product(double a, double b) noexcept {
        double h, r, q;
        two_prod(a, b, h, r);
        two_sum(hi, h, hi, q);
        lo += q + r;
    }
    void add(double x) noexcept {
        double q;
        two_sum(hi, x, hi, q);
        lo += q;
    }
    double value() const noexcept { return hi + lo; }
};

}  // namespace qci::simd::eft
