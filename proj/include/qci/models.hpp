#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qci/region.hpp"

namespace qci {

/// Warping function a(sigma) of a metric d sigma^2 + a(sigma)^2 d theta^2 on [0, L].
class ProfileMetric {
public:
    using Fn = std::function<double(double)>;

    ProfileMetric(std::string name, std::vector<double> params, double length, Fn a, Fn a_prime,
                  bool analytic, int grid_size = 1024);

    const std::string& name() const { return name_; }
    const std::vector<double>& params() const { return params_; }
    double length() const { return length_; }
    bool analytic() const { return analytic_; }
    int grid_size() const { return grid_size_; }

    double a(double sigma) const { return a_(sigma); }
    double a_prime(double sigma) const { return a_prime_(sigma); }

    /// Samples at sigma_i = i L / grid_size, i = 0..grid_size.
    const std::vector<double>& a_samples() const { return a_samples_; }
    const std::vector<double>& a_prime_samples() const { return a_prime_samples_; }
    double a_max() const { return a_max_; }
    double sigma_at_max() const { return sigma_at_max_; }
    /// Minimum of a over [s1, s2] (sampled, then refined).
    double a_min_on(double s1, double s2) const;

    /// Largest |a'_i - centered difference of a| over interior grid points, divided by h^2.
    double derivative_consistency() const;

    std::string describe() const;

private:
    std::string name_;
    std::vector<double> params_;
    double length_;
    Fn a_, a_prime_;
    bool analytic_;
    int grid_size_;
    std::vector<double> a_samples_, a_prime_samples_;
    double a_max_ = 0.0, sigma_at_max_ = 0.0;
};

/// Built-in profiles: "sphere", "ellipsoid" (params: aspect = polar/equatorial semi-axis), and
/// "bump" (params: amplitude), a = sin(sigma)(1 + amplitude sin^2 sigma).
ProfileMetric builtin_profile(const std::string& name, const std::vector<double>& params,
                              int grid_size = 1024);

/// Profile from a table of (sigma, a) rows with sigma from 0 to L, interpolated by a C1
/// piecewise cubic.
ProfileMetric tabulated_profile(std::vector<double> sigma, std::vector<double> a,
                                const std::string& name = "table");

/// Reads a two-column whitespace separated text table; '#' starts a comment.
ProfileMetric load_profile_table(const std::string& path);

/// U1(x1) = u1[0] + u1[1] cos(2 pi x1), U2(x2) = u2[0] + u2[1] cos(2 pi x2), with U1 > U2 > 0.
struct LiouvilleParams {
    double u1_mean = 2.0, u1_amp = 0.3;
    double u2_mean = 0.5, u2_amp = 0.2;
};

enum class ModelKind { FlatTorus, SurfaceOfRevolution, LiouvilleTorus };

/// A QCI model: principal symbols p(x, xi), their derivatives and the Riemannian density.
/// Surface of revolution coordinates are x = (sigma, theta), xi = (Sigma, Theta).
class ModelSystem {
public:
    ModelKind kind() const { return kind_; }
    int dim() const { return dim_; }
    const ProfileMetric& profile() const;
    const LiouvilleParams& liouville() const { return liouville_; }

    Vec symbols(const Vec& x, const Vec& xi) const;
    /// [d p_i / d xi_j], n x n.
    Mat fiber_jacobian(const Vec& x, const Vec& xi) const;
    /// [d p_i / d x_j | d p_i / d xi_j], n x 2n.
    Mat full_gradient(const Vec& x, const Vec& xi) const;
    /// sqrt(det g) in the model coordinates.
    double volume_density(const Vec& x) const;
    /// Coordinate volume of the configuration chart.
    double chart_volume() const;

    std::string describe() const;

    friend ModelSystem make_torus(int n);
    friend ModelSystem make_surface_of_revolution(const ProfileMetric& profile);
    friend ModelSystem make_liouville_torus(const LiouvilleParams& params);

private:
    ModelKind kind_ = ModelKind::FlatTorus;
    int dim_ = 2;
    std::shared_ptr<const ProfileMetric> profile_;
    LiouvilleParams liouville_;
};

ModelSystem make_torus(int n);
ModelSystem make_surface_of_revolution(const ProfileMetric& profile);
ModelSystem make_liouville_torus(const LiouvilleParams& params = {});

/// Generating function S(x; eta) with p_i(x, grad_x S) = eta_i. For surfaces of revolution
/// S = eta_2 theta + s |eta_1| int_{sigma0}^{sigma} sqrt(1 - r^2 / a^2), r = eta_2 / eta_1, on
/// the branch s = +1 (Sigma > 0) or s = -1.
class GeneratingFunction {
public:
    static constexpr double kQuadTol = 1e-10;

    GeneratingFunction(ModelSystem system, double basepoint);

    const ModelSystem& system() const { return system_; }
    double basepoint() const { return basepoint_; }

    double value(const Vec& x, const Vec& eta, int branch = 1) const;
    Vec gradient(const Vec& x, const Vec& eta, int branch = 1) const;
    /// S(x; eta) - S(y; eta), independent of the basepoint.
    double difference(const Vec& x, const Vec& y, const Vec& eta, int branch = 1) const;

private:
    double radial_integral(double from, double to, double r) const;

    ModelSystem system_;
    double basepoint_;
};

/// basepoint is ignored for tori; NaN selects the middle of the meridian.
GeneratingFunction generating_function(const ModelSystem& system, double basepoint);

}  // namespace qci
