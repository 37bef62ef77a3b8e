#pragma once

#include <span>
#include <string>

namespace qci {

/// Least-squares fit of log|value| = log C + beta log lambda; zero values are dropped.
struct ExponentFit {
    double beta = 0.0;
    double log_c = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;  // 95% Student-t band for beta
    std::size_t points = 0;
    double span = 0.0;  // largest / smallest lambda used
    std::string describe() const;
};

/// Needs at least four nonzero values whose lambdas span a factor of four.
ExponentFit fit_exponent(std::span<const double> lambda, std::span<const double> value);

}  // namespace qci
