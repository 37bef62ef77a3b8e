#include "qci/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/interpolators/makima.hpp>
#include <boost/math/tools/minima.hpp>

#include "qci/error.hpp"
#include "qci/quadrature.hpp"

namespace qci {

using std::numbers::pi;

ProfileMetric::ProfileMetric(std::string name, std::vector<double> params, double length, Fn a,
                             Fn a_prime, bool analytic, int grid_size)
    : name_(std::move(name)),
      params_(std::move(params)),
      length_(length),
      a_(std::move(a)),
      a_prime_(std::move(a_prime)),
      analytic_(analytic),
      grid_size_(grid_size) {
    if (!(length_ > 0.0)) throw ConfigError("profile length must be positive");
    if (grid_size_ < 64) throw ConfigError("profile grid_size must be at least 64");
    const double h = length_ / grid_size_;
    a_samples_.resize(grid_size_ + 1);
    a_prime_samples_.resize(grid_size_ + 1);
    for (int i = 0; i <= grid_size_; ++i) {
        const double s = (i == grid_size_) ? length_ : i * h;
        a_samples_[i] = a_(s);
        a_prime_samples_[i] = a_prime_(s);
    }
    const double scale = *std::max_element(a_samples_.begin(), a_samples_.end());
    if (!(scale > 0.0)) throw ConfigError("profile '" + name_ + "' has no positive values");
    if (std::fabs(a_samples_.front()) > 1e-10 * scale || std::fabs(a_samples_.back()) > 1e-10 * scale)
        throw ConfigError("profile '" + name_ + "' must vanish at both poles");
    for (int i = 1; i < grid_size_; ++i)
        if (!(a_samples_[i] > 0.0))
            throw ConfigError("profile '" + name_ + "' has non-positive interior value at sigma=" +
                              std::to_string(i * h));
    const auto it = std::max_element(a_samples_.begin(), a_samples_.end());
    const double s0 = (it - a_samples_.begin()) * h;
    const auto [smax, neg] = boost::math::tools::brent_find_minima(
        [this](double s) { return -a_(s); }, std::max(0.0, s0 - h), std::min(length_, s0 + h), 52);
    sigma_at_max_ = smax;
    a_max_ = std::max(-neg, *it);
}

double ProfileMetric::a_min_on(double s1, double s2) const {
    if (s1 > s2) std::swap(s1, s2);
    const int n = 256;
    double best = std::numeric_limits<double>::infinity();
    double at = s1;
    for (int i = 0; i <= n; ++i) {
        const double s = s1 + (s2 - s1) * i / n;
        if (const double v = a_(s); v < best) {
            best = v;
            at = s;
        }
    }
    const double h = (s2 - s1) / n;
    const auto [smin, vmin] = boost::math::tools::brent_find_minima(
        [this](double s) { return a_(s); }, std::max(s1, at - h), std::min(s2, at + h), 52);
    (void)smin;
    return std::min(best, vmin);
}

double ProfileMetric::derivative_consistency() const {
    const double h = length_ / grid_size_;
    double worst = 0.0;
    for (int i = 1; i < grid_size_; ++i) {
        const double fd = (a_samples_[i + 1] - a_samples_[i - 1]) / (2.0 * h);
        worst = std::max(worst, std::fabs(a_prime_samples_[i] - fd));
    }
    return worst / (h * h);
}

std::string ProfileMetric::describe() const {
    std::ostringstream os;
    os << name_;
    if (!params_.empty()) {
        os << "(";
        for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? "," : "") << params_[i];
        os << ")";
    }
    return os.str();
}

namespace {

// E(phi | k) for any real phi.
double ellint_e(double k, double phi) {
    const double n = std::round(phi / pi);
    const double r = phi - n * pi;
    const double complete = std::comp_ellint_2(k);
    return 2.0 * n * complete + std::copysign(std::ellint_2(k, std::fabs(r)), r);
}

struct EllipseArc {
    double aspect;
    double total;

    double speed(double t) const {
        const double c = std::cos(t), s = std::sin(t);
        return std::sqrt(c * c + aspect * aspect * s * s);
    }
    double arclength(double t) const {
        if (aspect <= 1.0) return ellint_e(std::sqrt(1.0 - aspect * aspect), t);
        const double k = std::sqrt(1.0 - 1.0 / (aspect * aspect));
        return aspect * (ellint_e(k, pi / 2) - ellint_e(k, pi / 2 - t));
    }
    double parameter(double sigma) const {
        double t = pi * sigma / total;
        for (int it = 0; it < 60; ++it) {
            const double step = (arclength(t) - sigma) / speed(t);
            t -= step;
            t = std::clamp(t, 0.0, pi);
            if (std::fabs(step) < 1e-15) break;
        }
        return t;
    }
};

}  // namespace

ProfileMetric builtin_profile(const std::string& name, const std::vector<double>& params,
                              int grid_size) {
    if (name == "sphere") {
        if (!params.empty()) throw ConfigError("profile 'sphere' takes no parameters");
        return ProfileMetric("sphere", {}, pi, [](double s) { return std::sin(s); },
                             [](double s) { return std::cos(s); }, true, grid_size);
    }
    if (name == "ellipsoid") {
        if (params.size() != 1) throw ConfigError("profile 'ellipsoid' takes one parameter (aspect)");
        const double aspect = params[0];
        if (!(aspect > 0.0)) throw ConfigError("ellipsoid aspect must be positive");
        if (aspect == 1.0)
            return ProfileMetric("ellipsoid", params, pi, [](double s) { return std::sin(s); },
                                 [](double s) { return std::cos(s); }, true, grid_size);
        auto arc = std::make_shared<EllipseArc>(EllipseArc{aspect, 0.0});
        arc->total = arc->arclength(pi);
        const double length = arc->total;
        return ProfileMetric(
            "ellipsoid", params, length,
            [arc, length](double s) {
                if (s <= 0.0 || s >= length) return 0.0;
                return std::sin(arc->parameter(s));
            },
            [arc](double s) {
                const double t = arc->parameter(s);
                return std::cos(t) / arc->speed(t);
            },
            true, grid_size);
    }
    if (name == "bump") {
        if (params.size() != 1) throw ConfigError("profile 'bump' takes one parameter (amplitude)");
        const double amp = params[0];
        if (!(amp > -0.5 && amp < 0.5)) throw ConfigError("bump amplitude must lie in (-0.5, 0.5)");
        return ProfileMetric(
            "bump", params, pi,
            [amp](double s) {
                const double sn = std::sin(s);
                return sn * (1.0 + amp * sn * sn);
            },
            [amp](double s) {
                const double sn = std::sin(s);
                return std::cos(s) * (1.0 + 3.0 * amp * sn * sn);
            },
            true, grid_size);
    }
    throw ConfigError("unknown profile '" + name + "'");
}

ProfileMetric tabulated_profile(std::vector<double> sigma, std::vector<double> a,
                                const std::string& name) {
    if (sigma.size() != a.size() || sigma.size() < 8)
        throw ConfigError("profile table needs at least 8 (sigma, a) rows");
    if (sigma.front() != 0.0) throw ConfigError("profile table must start at sigma = 0");
    for (std::size_t i = 1; i < sigma.size(); ++i)
        if (!(sigma[i] > sigma[i - 1])) throw ConfigError("profile table sigma must increase");
    const double length = sigma.back();
    using Spline = boost::math::interpolators::makima<std::vector<double>>;
    auto spline = std::make_shared<Spline>(std::move(sigma), std::move(a));
    return ProfileMetric(
        name, {}, length,
        [spline, length](double s) { return (*spline)(std::clamp(s, 0.0, length)); },
        [spline, length](double s) { return spline->prime(std::clamp(s, 0.0, length)); }, false);
}

ProfileMetric load_profile_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read profile table '" + path + "'");
    std::vector<double> sigma, a;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        double s, v;
        if (!(ls >> s)) continue;
        if (!(ls >> v))
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected two columns");
        sigma.push_back(s);
        a.push_back(v);
    }
    return tabulated_profile(std::move(sigma), std::move(a), "table:" + path);
}

const ProfileMetric& ModelSystem::profile() const {
    if (!profile_) throw DomainError("model has no profile");
    return *profile_;
}

ModelSystem make_torus(int n) {
    if (n < 1 || n > 4) throw ConfigError("torus dimension must be in 1..4");
    ModelSystem sys;
    sys.kind_ = ModelKind::FlatTorus;
    sys.dim_ = n;
    return sys;
}

ModelSystem make_surface_of_revolution(const ProfileMetric& profile) {
    ModelSystem sys;
    sys.kind_ = ModelKind::SurfaceOfRevolution;
    sys.dim_ = 2;
    sys.profile_ = std::make_shared<const ProfileMetric>(profile);
    return sys;
}

ModelSystem make_liouville_torus(const LiouvilleParams& p) {
    if (!(p.u2_mean - std::fabs(p.u2_amp) > 0.0))
        throw ConfigError("Liouville potential U2 must be positive");
    if (!(p.u1_mean - std::fabs(p.u1_amp) > p.u2_mean + std::fabs(p.u2_amp)))
        throw ConfigError("Liouville potentials must satisfy U1 > U2");
    ModelSystem sys;
    sys.kind_ = ModelKind::LiouvilleTorus;
    sys.dim_ = 2;
    sys.liouville_ = p;
    return sys;
}

namespace {

struct LiouvilleAt {
    double u1, u2, du1, du2;
};

LiouvilleAt liouville_at(const LiouvilleParams& p, const Vec& x) {
    const double w = 2.0 * pi;
    return {p.u1_mean + p.u1_amp * std::cos(w * x[0]), p.u2_mean + p.u2_amp * std::cos(w * x[1]),
            -w * p.u1_amp * std::sin(w * x[0]), -w * p.u2_amp * std::sin(w * x[1])};
}

void check_dims(int n, const Vec& x, const Vec& xi) {
    if (x.size() != n || xi.size() != n) throw DomainError("point dimension mismatch");
}

double sor_a(const ProfileMetric& prof, double sigma) {
    if (!(sigma > 0.0 && sigma < prof.length()))
        throw DomainError("sigma outside the chart (0, L)");
    return prof.a(sigma);
}

}  // namespace

Vec ModelSystem::symbols(const Vec& x, const Vec& xi) const {
    check_dims(dim_, x, xi);
    switch (kind_) {
        case ModelKind::FlatTorus:
            return xi;
        case ModelKind::SurfaceOfRevolution: {
            const double a = sor_a(*profile_, x[0]);
            Vec p(2);
            p[0] = std::hypot(xi[0], xi[1] / a);
            p[1] = xi[1];
            return p;
        }
        case ModelKind::LiouvilleTorus: {
            const auto u = liouville_at(liouville_, x);
            const double d = u.u1 - u.u2;
            Vec p(2);
            p[0] = std::sqrt((xi[0] * xi[0] + xi[1] * xi[1]) / d);
            p[1] = std::sqrt((u.u2 * xi[0] * xi[0] + u.u1 * xi[1] * xi[1]) / d);
            return p;
        }
    }
    return xi;
}

Mat ModelSystem::fiber_jacobian(const Vec& x, const Vec& xi) const {
    return full_gradient(x, xi).rightCols(dim_);
}

Mat ModelSystem::full_gradient(const Vec& x, const Vec& xi) const {
    check_dims(dim_, x, xi);
    if (xi.norm() == 0.0) throw DomainError("symbol derivatives undefined at xi = 0");
    Mat g = Mat::Zero(dim_, 2 * dim_);
    switch (kind_) {
        case ModelKind::FlatTorus:
            g.rightCols(dim_).setIdentity();
            break;
        case ModelKind::SurfaceOfRevolution: {
            const double a = sor_a(*profile_, x[0]);
            const double ap = profile_->a_prime(x[0]);
            const double p1 = std::hypot(xi[0], xi[1] / a);
            g(0, 0) = -xi[1] * xi[1] * ap / (a * a * a * p1);
            g(0, 2) = xi[0] / p1;
            g(0, 3) = xi[1] / (a * a * p1);
            g(1, 3) = 1.0;
            break;
        }
        case ModelKind::LiouvilleTorus: {
            const auto u = liouville_at(liouville_, x);
            const double d = u.u1 - u.u2;
            const double q = xi[0] * xi[0] + xi[1] * xi[1];
            const double nn = u.u2 * xi[0] * xi[0] + u.u1 * xi[1] * xi[1];
            const double p1 = std::sqrt(q / d), p2 = std::sqrt(nn / d);
            g(0, 0) = -p1 * u.du1 / (2.0 * d);
            g(0, 1) = p1 * u.du2 / (2.0 * d);
            g(0, 2) = xi[0] / (d * p1);
            g(0, 3) = xi[1] / (d * p1);
            if (p2 > 0.0) {
                g(1, 0) = p2 * (u.du1 * xi[1] * xi[1] / (2.0 * nn) - u.du1 / (2.0 * d));
                g(1, 1) = p2 * (u.du2 * xi[0] * xi[0] / (2.0 * nn) + u.du2 / (2.0 * d));
                g(1, 2) = u.u2 * xi[0] / (d * p2);
                g(1, 3) = u.u1 * xi[1] / (d * p2);
            }
            break;
        }
    }
    return g;
}

double ModelSystem::volume_density(const Vec& x) const {
    switch (kind_) {
        case ModelKind::FlatTorus:
            return 1.0;
        case ModelKind::SurfaceOfRevolution:
            return sor_a(*profile_, x[0]);
        case ModelKind::LiouvilleTorus: {
            const auto u = liouville_at(liouville_, x);
            return u.u1 - u.u2;
        }
    }
    return 1.0;
}

double ModelSystem::chart_volume() const {
    switch (kind_) {
        case ModelKind::FlatTorus:
            return std::pow(2.0 * pi, dim_);
        case ModelKind::SurfaceOfRevolution:
            return 2.0 * pi * profile_->length();
        case ModelKind::LiouvilleTorus:
            return 1.0;
    }
    return 1.0;
}

std::string ModelSystem::describe() const {
    switch (kind_) {
        case ModelKind::FlatTorus:
            return "torus(n=" + std::to_string(dim_) + ")";
        case ModelKind::SurfaceOfRevolution:
            return "surface_of_revolution(" + profile_->describe() + ")";
        case ModelKind::LiouvilleTorus:
            return "liouville_torus";
    }
    return "unknown";
}

GeneratingFunction::GeneratingFunction(ModelSystem system, double basepoint)
    : system_(std::move(system)), basepoint_(basepoint) {}

GeneratingFunction generating_function(const ModelSystem& system, double basepoint) {
    switch (system.kind()) {
        case ModelKind::FlatTorus:
            return GeneratingFunction(system, 0.0);
        case ModelKind::SurfaceOfRevolution: {
            const double L = system.profile().length();
            if (std::isnan(basepoint)) basepoint = 0.5 * L;
            if (!(basepoint > 0.0 && basepoint < L))
                throw DomainError("generating function basepoint outside (0, L)");
            return GeneratingFunction(system, basepoint);
        }
        case ModelKind::LiouvilleTorus:
            break;
    }
    throw ConfigError("no closed-form generating function for " + system.describe());
}

double GeneratingFunction::radial_integral(double from, double to, double r) const {
    const auto& prof = system_.profile();
    auto integrand = [&prof, r](double s) {
        const double a = prof.a(s);
        const double arg = 1.0 - (r * r) / (a * a);
        if (!(arg > 0.0)) throw OutOfBandError("generating function evaluated past a turning point");
        return std::sqrt(arg);
    };
    integrand(from);
    integrand(to);
    return quad::adaptive_simpson(integrand, from, to, kQuadTol);
}

double GeneratingFunction::value(const Vec& x, const Vec& eta, int branch) const {
    if (system_.kind() == ModelKind::FlatTorus) return x.dot(eta);
    if (!(eta[0] > 0.0)) throw OutOfBandError("generating function requires eta_1 > 0");
    const double r = eta[1] / eta[0];
    sor_a(system_.profile(), x[0]);
    return eta[1] * x[1] + branch * eta[0] * radial_integral(basepoint_, x[0], r);
}

Vec GeneratingFunction::gradient(const Vec& x, const Vec& eta, int branch) const {
    if (system_.kind() == ModelKind::FlatTorus) return eta;
    if (!(eta[0] > 0.0)) throw OutOfBandError("generating function requires eta_1 > 0");
    const double a = sor_a(system_.profile(), x[0]);
    const double arg = eta[0] * eta[0] - eta[1] * eta[1] / (a * a);
    if (!(arg > 0.0)) throw OutOfBandError("generating function evaluated past a turning point");
    Vec g(2);
    g[0] = branch * std::sqrt(arg);
    g[1] = eta[1];
    return g;
}

double GeneratingFunction::difference(const Vec& x, const Vec& y, const Vec& eta, int branch) const {
    if (system_.kind() == ModelKind::FlatTorus) return (x - y).dot(eta);
    if (!(eta[0] > 0.0)) throw OutOfBandError("generating function requires eta_1 > 0");
    sor_a(system_.profile(), x[0]);
    sor_a(system_.profile(), y[0]);
    const double r = eta[1] / eta[0];
    return eta[1] * (x[1] - y[1]) + branch * eta[0] * radial_integral(y[0], x[0], r);
}

}  // namespace qci
