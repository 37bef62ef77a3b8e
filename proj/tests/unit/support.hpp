#pragma once

#include <random>

#include "qci/region.hpp"

namespace qci::test {

inline Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(20240611);
    return g;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace qci::test
