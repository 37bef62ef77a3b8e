#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qci {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Distance below which a spectral point counts as lying on a region boundary.
inline constexpr double kBoundaryTieTol = 1e-9;

/// Regions of joint-spectrum space R^n: the boxes I(lambda, c), unit boxes R_mu, general
/// windows and conic
/// sectors {|eta| <= radius, angle(eta, axis) <= half_angle}. A sector with half-angle >= pi is
/// the closed ball; other sectors exclude their apex.
class SpectralRegion {
public:
    enum class Kind { Box, UnitBox, Window, ConeSector };

    static SpectralRegion box(double lambda, const Vec& c);
    static SpectralRegion unit_box(const Vec& mu);
    /// General closed axis-aligned box lower <= eta <= upper.
    static SpectralRegion window(const Vec& lower, const Vec& upper);
    static SpectralRegion cone(const Vec& axis, double half_angle, double radius);
    static SpectralRegion ball(int n, double radius);

    Kind kind() const { return kind_; }
    int dim() const { return static_cast<int>(lo_.size()); }
    double lambda() const { return lambda_; }
    const Vec& c() const { return c_; }
    const Vec& mu() const { return mu_; }
    const Vec& axis() const { return axis_; }
    double half_angle() const { return half_angle_; }
    double radius() const { return radius_; }
    bool is_ball() const;

    bool contains(const Vec& eta) const;
    /// Distance from eta to the region boundary (exact for boxes and balls; for sectors the
    /// smaller of the radial and the angular gap).
    double boundary_distance(const Vec& eta) const;

    /// Axis-aligned bounding box.
    const Vec& lower() const { return lo_; }
    const Vec& upper() const { return hi_; }
    /// Largest |eta| over the region.
    double max_norm() const;

    /// {r >= 0 : r v in region} as [r0, r1]; r0 >= r1 means empty.
    std::pair<double, double> ray_interval(const Vec& v) const;

    /// Planar directions (angles in (-pi, pi]) at which ray_interval changes form. n = 2 only.
    std::vector<double> direction_breaks() const;

    std::string describe() const;

private:
    Kind kind_ = Kind::Box;
    double lambda_ = 0.0;
    Vec c_, mu_, axis_;
    double half_angle_ = 0.0;
    double radius_ = 0.0;
    Vec lo_, hi_;
};

/// Angle between two nonzero vectors, in [0, pi].
double vector_angle(const Vec& u, const Vec& v);

}  // namespace qci
