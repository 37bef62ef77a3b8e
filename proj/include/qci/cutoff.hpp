#pragma once

#include <string>
#include <vector>

#include "qci/models.hpp"

namespace qci {

/// Exponential-type smoothstep: 0 for u <= 0, 1 for u >= 1, C-infinity in between.
double smoothstep_exp(double u);

/// Microlocal cutoff realised as a joint-spectral multiplier.
///  - None: weight 1.
///  - SorRatio: chi0(r) of r = eta_2 / eta_1, even in r, equal to 1 on [c_min + w, c_max - w]
///    and 0 outside [c_min, c_max] (applied to |r|; c_min <= 0 means no inner edge).
///  - TorusCone: psi of the direction of eta, 1 within half_angle - w of the axis and 0 beyond
///    half_angle; zero at eta = 0.
class CutoffSymbol {
public:
    enum class Kind { None, SorRatio, TorusCone };

    static CutoffSymbol none();
    static CutoffSymbol sor_ratio(double c_min, double c_max, double width);
    static CutoffSymbol torus_cone(const Vec& axis, double half_angle, double width);

    Kind kind() const { return kind_; }
    double c_min() const { return c_min_; }
    double c_max() const { return c_max_; }
    double width() const { return width_; }
    const Vec& axis() const { return axis_; }
    double half_angle() const { return half_angle_; }

    double ratio_weight(double r) const;
    /// Weight attached to a moment-map value eta (degree 0 in eta). For SorRatio eta_1 = 0 is
    /// read as r = 0 and eta_1 < 0 gives 0.
    double weight(const Vec& eta) const;
    double weight2(double eta1, double eta2) const;
    /// sigma(Psi)(x, xi) = weight(p(x, xi)).
    double symbol(const ModelSystem& system, const Vec& x, const Vec& xi) const;

    /// Planar directions of eta (angles) where the weight stops being smooth or vanishes.
    std::vector<double> direction_breaks() const;
    /// True when weight(eta) = 0 for every eta with |eta_2| > bound * eta_1 (SorRatio support).
    bool confines_ratio(double& bound) const;

    std::string describe() const;

private:
    Kind kind_ = Kind::None;
    double c_min_ = 0.0, c_max_ = 0.0, width_ = 0.0;
    Vec axis_;
    double half_angle_ = 0.0;
};

}  // namespace qci
