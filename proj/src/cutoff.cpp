#include "qci/cutoff.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qci/error.hpp"

namespace qci {

double smoothstep_exp(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

CutoffSymbol CutoffSymbol::none() { return CutoffSymbol{}; }

CutoffSymbol CutoffSymbol::sor_ratio(double c_min, double c_max, double width) {
    if (!(c_max > 0.0)) throw ConfigError("cutoff c_max must be positive");
    if (!(width > 0.0)) throw ConfigError("cutoff width must be positive");
    const double inner = std::max(c_min, 0.0);
    if (c_min > 0.0 ? (inner + 2 * width > c_max) : (width > c_max))
        throw ConfigError("cutoff plateau is empty: widen [c_min, c_max] or shrink the width");
    CutoffSymbol c;
    c.kind_ = Kind::SorRatio;
    c.c_min_ = c_min;
    c.c_max_ = c_max;
    c.width_ = width;
    return c;
}

CutoffSymbol CutoffSymbol::torus_cone(const Vec& axis, double half_angle, double width) {
    if (axis.norm() == 0.0) throw ConfigError("cutoff axis must be nonzero");
    if (!(half_angle > 0.0 && half_angle < std::numbers::pi))
        throw ConfigError("cutoff half-angle must lie in (0, pi)");
    if (!(width > 0.0 && width < half_angle))
        throw ConfigError("cutoff width must lie in (0, half_angle)");
    CutoffSymbol c;
    c.kind_ = Kind::TorusCone;
    c.axis_ = axis.normalized();
    c.half_angle_ = half_angle;
    c.width_ = width;
    return c;
}

double CutoffSymbol::ratio_weight(double r) const {
    const double ar = std::fabs(r);
    double w = smoothstep_exp((c_max_ - ar) / width_);
    if (c_min_ > 0.0) w *= smoothstep_exp((ar - c_min_) / width_);
    return w;
}

double CutoffSymbol::weight2(double eta1, double eta2) const {
    switch (kind_) {
        case Kind::None:
            return 1.0;
        case Kind::SorRatio:
            if (eta1 < 0.0) return 0.0;
            if (eta1 == 0.0) return eta2 == 0.0 ? ratio_weight(0.0) : 0.0;
            return ratio_weight(eta2 / eta1);
        case Kind::TorusCone: {
            Vec eta(2);
            eta << eta1, eta2;
            return weight(eta);
        }
    }
    return 1.0;
}

double CutoffSymbol::weight(const Vec& eta) const {
    switch (kind_) {
        case Kind::None:
            return 1.0;
        case Kind::SorRatio:
            return weight2(eta[0], eta[1]);
        case Kind::TorusCone: {
            if (eta.norm() == 0.0) return 0.0;
            const double angle = vector_angle(eta, axis_);
            return smoothstep_exp((half_angle_ - angle) / width_);
        }
    }
    return 1.0;
}

double CutoffSymbol::symbol(const ModelSystem& system, const Vec& x, const Vec& xi) const {
    if (kind_ == Kind::None) return 1.0;
    return weight(system.symbols(x, xi));
}

std::vector<double> CutoffSymbol::direction_breaks() const {
    std::vector<double> out;
    switch (kind_) {
        case Kind::None:
            break;
        case Kind::SorRatio: {
            std::vector<double> ratios{c_max_, c_max_ - width_};
            if (c_min_ > 0.0) {
                ratios.push_back(c_min_);
                ratios.push_back(c_min_ + width_);
            }
            for (double r : ratios) {
                out.push_back(std::atan(r));
                out.push_back(-std::atan(r));
            }
            out.push_back(std::numbers::pi / 2);
            out.push_back(-std::numbers::pi / 2);
            break;
        }
        case Kind::TorusCone: {
            if (axis_.size() != 2) break;
            const double a = std::atan2(axis_[1], axis_[0]);
            for (double d : {half_angle_, half_angle_ - width_}) {
                out.push_back(std::remainder(a + d, 2 * std::numbers::pi));
                out.push_back(std::remainder(a - d, 2 * std::numbers::pi));
            }
            break;
        }
    }
    return out;
}

bool CutoffSymbol::confines_ratio(double& bound) const {
    if (kind_ != Kind::SorRatio) return false;
    bound = c_max_;
    return true;
}

std::string CutoffSymbol::describe() const {
    std::ostringstream os;
    os.precision(10);
    switch (kind_) {
        case Kind::None:
            os << "none";
            break;
        case Kind::SorRatio:
            os << "sor_ratio(c_min=" << c_min_ << ", c_max=" << c_max_ << ", width=" << width_ << ")";
            break;
        case Kind::TorusCone:
            os << "torus_cone(axis=[";
            for (Eigen::Index i = 0; i < axis_.size(); ++i) os << (i ? "," : "") << axis_[i];
            os << "], half_angle=" << half_angle_ << ", width=" << width_ << ")";
            break;
    }
    return os.str();
}

}  // namespace qci
