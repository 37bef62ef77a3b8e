#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "qci/cutoff.hpp"
#include "qci/mollifier.hpp"
#include "qci/region.hpp"
#include "qci/spectrum.hpp"

namespace qci {

/// phi_j(x) for every pair of the spectrum.
struct EigenColumn {
    std::vector<double> re, im;
};

EigenColumn eigen_column(const JointSpectrum& spec, const Vec& x);

/// sum_j coeff_j phi_j(x) conj(phi_j(y)), compensated, in spectrum order. Exactly Hermitian:
/// swapping the columns conjugates the result bit for bit.
std::complex<double> spectral_sum(std::span<const double> coeff, const EigenColumn& x, const EigenColumn& y);

/// Cutoff weights w_j^2 of every pair.
std::vector<double> cutoff_weights(const JointSpectrum& spec, const CutoffSymbol& cutoff);

struct KernelResult {
    std::complex<double> value;
    /// Bound on the contribution of eigenvalues missing from the spectrum.
    double truncation_bound = 0.0;
    std::size_t terms = 0;
};

/// sum over eigenvalues in the region of w_j^2 phi_j(x) conj(phi_j(y)). Raises
/// IncompleteSpectrumError when the spectrum does not cover the region and BoundaryTieError
/// when an eigenvalue sits on its boundary (unless check_ties is false: closed region).
std::complex<double> projector_kernel(const JointSpectrum& spec, const SpectralRegion& region,
                                      const CutoffSymbol& cutoff, const Vec& x, const Vec& y,
                                      bool check_ties = true);

/// sum over eigenvalues in the region of w_j^2 (the trace of the cut-off projector).
double projector_count(const JointSpectrum& spec, const SpectralRegion& region, const CutoffSymbol& cutoff,
                       bool check_ties = true);

/// Closed unit box R_mu on the diagonal.
double unit_box_diag(const JointSpectrum& spec, const Vec& mu, const CutoffSymbol& cutoff, const Vec& x);

/// sum_j prod_k rho(lam_j^(k) - mu_k) w_j^2 phi_j(x) conj(phi_j(y)).
KernelResult smoothed_measure_kernel(const JointSpectrum& spec, const Vec& mu, const Mollifier& mol,
                                     const CutoffSymbol& cutoff, const Vec& x, const Vec& y);

/// sum_j prod_k W(lam_j^(k); |c_k| lambda) w_j^2 phi_j(x) conj(phi_j(y)).
KernelResult smoothed_projector_kernel(const JointSpectrum& spec, double lambda, const Vec& c,
                                       const Mollifier& mol, const CutoffSymbol& cutoff, const Vec& x,
                                       const Vec& y);

struct TauberianTerm {
    std::vector<int> quantum_numbers;
    Vec lam;
    double h = 0.0;         // h_lambda(lam)
    double majorant = 0.0;  // product-difference bound for |h_lambda(lam)|
    double contribution = 0.0;
};

struct TauberianResult {
    double gap = 0.0;
    std::complex<double> rough, smooth;
    double truncation_bound = 0.0;
    std::vector<TauberianTerm> top_terms;  // largest |contribution| first
};

/// |rough - smooth| with the h_lambda diagnostics of the dominant terms.
TauberianResult tauberian_gap(const JointSpectrum& spec, double lambda, const Vec& c, const Mollifier& mol,
                              const CutoffSymbol& cutoff, const Vec& x, const Vec& y, std::size_t top = 100);

/// Covering bound for unit_box_diag: with a Fejer beta and cubes of side 2 eps (beta^n >= 1/2
/// on each), 1_{R_mu} <= sum over centres of 2 prod beta, hence
/// unit_box_diag <= 2 sum_centres S_beta(centre).
struct CoverBound {
    double bound = 0.0;
    double truncation_bound = 0.0;
    int per_axis = 0;
};

CoverBound unit_box_cover_bound(const JointSpectrum& spec, const Vec& mu, const Mollifier& fejer,
                                const CutoffSymbol& cutoff, const Vec& x);

/// Largest sum of |phi_j(x) phi_j(y)| over a unit cell of the spectrum (exact for tori).
double unit_cell_mass(const JointSpectrum& spec, const EigenColumn& x, const EigenColumn& y);

}  // namespace qci
