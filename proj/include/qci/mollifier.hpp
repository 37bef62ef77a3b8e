#pragma once

#include <memory>
#include <string>
#include <vector>

namespace qci {

/// Measured decay constant: |rho(s)| <= C (1 + |s|)^-N over the scanned range.
struct TailConstant {
    int N = 0;
    double C = 0.0;
};

namespace detail {
struct MasterTable;
}

/// Even Schwartz function with compactly supported Fourier transform.
///  - Plateau: rho_hat = 1 on |t| <= delta/2, 0 for |t| >= delta, smooth shoulders in between.
///  - Fejer: beta = |gamma|^2 / |gamma(0)|^2 with supp gamma_hat in [-delta/2, delta/2], so
///    beta >= 0, beta(0) = 1 and supp beta_hat in [-delta, delta].
/// Conventions: rho_hat(t) = int rho(s) e^{-ist} ds, so int rho = rho_hat(0).
class Mollifier {
public:
    enum class Kind { Plateau, Fejer };

    Kind kind() const { return kind_; }
    double delta() const { return delta_; }
    bool nonnegative() const { return kind_ == Kind::Fejer; }
    double amplitude() const { return amplitude_; }
    /// Same mollifier multiplied by factor.
    Mollifier scaled(double factor) const;

    double rho(double s) const;
    double rho_hat(double t) const;
    /// int_{-inf}^{s} rho (plateau kind).
    double antiderivative(double s) const;
    /// W(tau; Lambda) = int_{tau - Lambda}^{tau + Lambda} rho (plateau kind).
    double window(double tau, double half_width) const;

    /// Range |s| <= tail_range() over which the tail constants were measured.
    double tail_range() const { return tail_range_; }
    const std::vector<TailConstant>& tail() const { return tail_; }
    /// min_N C_N (1 + d)^-N.
    double tail_bound(double d) const;
    /// sup_{|s| >= d} |rho(s)|: from the table while it lasts, then tail_bound.
    double envelope(double d) const;
    /// int_d^inf |rho| (plateau kind): tabulated, or min_N C_N (1 + d)^{1-N} / (N - 1) if smaller.
    double tail_mass(double d) const;
    double l1_norm() const;
    /// Bound for |1 - W(tau; Lambda)| (inside) or |W| (outside) at d = ||tau| - Lambda|: the
    /// mass of |rho| beyond d on both sides.
    double window_defect_bound(double d) const;
    /// Distance beyond which every factor rho(s) is below 1e-14 * rho(0) by the tail bound.
    double support_radius(double eps = 1e-14) const;

    /// Fejer: the largest eps with beta(eps)^n >= 1/2.
    double cover_radius(int n) const;

    std::string describe() const;

    friend Mollifier make_mollifier(double delta0);
    friend Mollifier make_fejer(double delta);

private:
    Kind kind_ = Kind::Plateau;
    double delta_ = 1.0;
    double amplitude_ = 1.0;
    double norm_ = 1.0;  // Fejer: 1 / rho_1(0)^2
    double tail_range_ = 0.0;
    std::vector<TailConstant> tail_;
    std::shared_ptr<const detail::MasterTable> table_;
    // master-table argument u = scale_ * s and value factor
    double scale_ = 1.0;
    double envelope_raw(double u) const;
};

Mollifier make_mollifier(double delta0);
Mollifier make_fejer(double delta);

/// Plateau symbol of the delta = 1 mollifier.
double plateau_symbol(double t);

}  // namespace qci
