#include "qci/region.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qci/error.hpp"

namespace qci {

double vector_angle(const Vec& u, const Vec& v) {
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) return 0.0;
    // atan2 of |u x v| and u.v keeps precision near 0 and pi in any dimension
    const double dot = u.dot(v);
    const double cross = std::sqrt(std::max(0.0, nu * nu * nv * nv - dot * dot));
    return std::atan2(cross, dot);
}

SpectralRegion SpectralRegion::box(double lambda, const Vec& c) {
    if (!(lambda > 0.0)) throw DomainError("box scale lambda must be positive");
    if (c.size() < 1) throw ConfigError("c̄ must have at least one component");
    for (Eigen::Index i = 0; i < c.size(); ++i)
        if (c[i] == 0.0) throw ConfigError("c̄ components must be nonzero");
    if (std::fabs(c.norm() - 1.0) > 1e-12) throw ConfigError("c̄ must be a unit vector");
    SpectralRegion r;
    r.kind_ = Kind::Box;
    r.lambda_ = lambda;
    r.c_ = c;
    r.hi_ = c.cwiseAbs() * lambda;
    r.lo_ = -r.hi_;
    return r;
}

SpectralRegion SpectralRegion::unit_box(const Vec& mu) {
    SpectralRegion r;
    r.kind_ = Kind::UnitBox;
    r.mu_ = mu;
    r.lo_ = mu;
    r.hi_ = mu.array() + 1.0;
    return r;
}

SpectralRegion SpectralRegion::window(const Vec& lower, const Vec& upper) {
    if (lower.size() != upper.size() || lower.size() < 1) throw ConfigError("window bounds must have equal dimension");
    if (!(lower.array() < upper.array()).all()) throw ConfigError("window lower bounds must lie below upper bounds");
    SpectralRegion r;
    r.kind_ = Kind::Window;
    r.lo_ = lower;
    r.hi_ = upper;
    return r;
}

SpectralRegion SpectralRegion::cone(const Vec& axis, double half_angle, double radius) {
    if (axis.norm() == 0.0) throw ConfigError("cone axis must be nonzero");
    if (!(half_angle > 0.0)) throw ConfigError("cone half-angle must be positive");
    if (!(radius > 0.0)) throw DomainError("cone radius must be positive");
    SpectralRegion r;
    r.kind_ = Kind::ConeSector;
    r.axis_ = axis.normalized();
    r.half_angle_ = std::min(half_angle, std::numbers::pi);
    r.radius_ = radius;
    r.lo_.resize(axis.size());
    r.hi_.resize(axis.size());
    for (Eigen::Index i = 0; i < axis.size(); ++i) {
        // extreme values of eta_i over the spherical cap, with the apex included
        const double theta = std::acos(std::clamp(r.axis_[i], -1.0, 1.0));
        const double up = std::cos(std::max(0.0, theta - r.half_angle_));
        const double down = std::cos(std::max(0.0, std::numbers::pi - theta - r.half_angle_));
        r.hi_[i] = radius * std::max(0.0, up);
        r.lo_[i] = -radius * std::max(0.0, down);
    }
    return r;
}

SpectralRegion SpectralRegion::ball(int n, double radius) {
    Vec axis = Vec::Zero(n);
    axis[0] = 1.0;
    return cone(axis, std::numbers::pi, radius);
}

bool SpectralRegion::is_ball() const {
    return kind_ == Kind::ConeSector && half_angle_ >= std::numbers::pi;
}

double SpectralRegion::max_norm() const {
    if (kind_ == Kind::ConeSector) return radius_;
    return lo_.cwiseAbs().cwiseMax(hi_.cwiseAbs()).norm();
}

bool SpectralRegion::contains(const Vec& eta) const {
    switch (kind_) {
        case Kind::Box:
        case Kind::UnitBox:
        case Kind::Window:
            return (eta.array() >= lo_.array()).all() && (eta.array() <= hi_.array()).all();
        case Kind::ConeSector: {
            const double norm = eta.norm();
            if (norm > radius_) return false;
            if (is_ball()) return true;
            if (norm == 0.0) return false;
            return vector_angle(eta, axis_) <= half_angle_;
        }
    }
    return false;
}

double SpectralRegion::boundary_distance(const Vec& eta) const {
    switch (kind_) {
        case Kind::Box:
        case Kind::UnitBox:
        case Kind::Window: {
            if (contains(eta)) {
                const Vec gaps = (eta - lo_).cwiseMin(hi_ - eta);
                return gaps.minCoeff();
            }
            const Vec outside = (lo_ - eta).cwiseMax(eta - hi_).cwiseMax(0.0);
            return outside.norm();
        }
        case Kind::ConeSector: {
            const double norm = eta.norm();
            const double radial = std::fabs(norm - radius_);
            if (is_ball() || norm == 0.0) return radial;
            const double dtheta = vector_angle(eta, axis_) - half_angle_;
            const double angular = std::fabs(dtheta) < std::numbers::pi / 2
                                       ? norm * std::fabs(std::sin(dtheta))
                                       : norm;
            if (norm > radius_ && dtheta > 0) return std::hypot(radial, angular);
            if (norm > radius_) return radial;
            if (dtheta > 0) return angular;
            return std::min(radial, angular);
        }
    }
    return 0.0;
}

std::pair<double, double> SpectralRegion::ray_interval(const Vec& v) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind_) {
        case Kind::Box:
        case Kind::UnitBox:
        case Kind::Window: {
            double r0 = 0.0, r1 = inf;
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                if (v[i] == 0.0) {
                    if (lo_[i] > 0.0 || hi_[i] < 0.0) return {0.0, 0.0};
                    continue;
                }
                double a = lo_[i] / v[i], b = hi_[i] / v[i];
                if (a > b) std::swap(a, b);
                r0 = std::max(r0, a);
                r1 = std::min(r1, b);
            }
            return {r0, r1};
        }
        case Kind::ConeSector: {
            const double norm = v.norm();
            if (norm == 0.0) return {0.0, 0.0};
            if (!is_ball() && vector_angle(v, axis_) > half_angle_) return {0.0, 0.0};
            return {0.0, radius_ / norm};
        }
    }
    return {0.0, 0.0};
}

std::vector<double> SpectralRegion::direction_breaks() const {
    std::vector<double> out;
    if (dim() != 2) return out;
    switch (kind_) {
        case Kind::Box:
        case Kind::UnitBox:
        case Kind::Window:
            for (double x : {lo_[0], hi_[0]})
                for (double y : {lo_[1], hi_[1]})
                    if (x != 0.0 || y != 0.0) out.push_back(std::atan2(y, x));
            // the axes bound the sign pattern of unit boxes that straddle a coordinate plane
            if (kind_ != Kind::Box)
                for (double a : {0.0, std::numbers::pi / 2, std::numbers::pi, -std::numbers::pi / 2})
                    out.push_back(a);
            break;
        case Kind::ConeSector:
            if (!is_ball()) {
                const double a = std::atan2(axis_[1], axis_[0]);
                out.push_back(std::remainder(a + half_angle_, 2 * std::numbers::pi));
                out.push_back(std::remainder(a - half_angle_, 2 * std::numbers::pi));
            }
            break;
    }
    return out;
}

std::string SpectralRegion::describe() const {
    std::ostringstream os;
    os.precision(10);
    switch (kind_) {
        case Kind::Box:
            os << "box(lambda=" << lambda_ << ", c=[";
            for (Eigen::Index i = 0; i < c_.size(); ++i) os << (i ? "," : "") << c_[i];
            os << "])";
            break;
        case Kind::UnitBox:
            os << "unit_box(mu=[";
            for (Eigen::Index i = 0; i < mu_.size(); ++i) os << (i ? "," : "") << mu_[i];
            os << "])";
            break;
        case Kind::Window:
            os << "window(lower=[";
            for (Eigen::Index i = 0; i < lo_.size(); ++i) os << (i ? "," : "") << lo_[i];
            os << "], upper=[";
            for (Eigen::Index i = 0; i < hi_.size(); ++i) os << (i ? "," : "") << hi_[i];
            os << "])";
            break;
        case Kind::ConeSector:
            if (is_ball()) {
                os << "ball(radius=" << radius_ << ")";
            } else {
                os << "cone(axis=[";
                for (Eigen::Index i = 0; i < axis_.size(); ++i) os << (i ? "," : "") << axis_[i];
                os << "], half_angle=" << half_angle_ << ", radius=" << radius_ << ")";
            }
            break;
    }
    return os.str();
}

}  // namespace qci
