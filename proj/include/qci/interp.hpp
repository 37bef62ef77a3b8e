#pragma once

#include <cstddef>
#include <span>

namespace qci {

/// Local four-point cubic (Lagrange) interpolation of samples y_i at x0 + i*h; needs at least
/// four samples. Points outside the sample range are extrapolated from the end stencil.
double cubic_uniform(std::span<const double> y, double x0, double h, double x);

/// Derivative of the same local cubic.
double cubic_uniform_prime(std::span<const double> y, double x0, double h, double x);

}  // namespace qci
