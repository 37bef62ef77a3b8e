#pragma once

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qci/config.hpp"
#include "qci/cutoff.hpp"
#include "qci/fit.hpp"
#include "qci/models.hpp"
#include "qci/region.hpp"
#include "qci/spectrum.hpp"

namespace qci {

enum class OffdiagMode { FullPhase, Linearized };

/// (2pi)^-n |g(x)|^{-1/2} int_{p(x, xi) in I(lambda, c)} w(p(x, xi))^2 dxi: the diagonal of the
/// leading term with respect to the Riemannian density.
double leading_term_diagonal(const ModelSystem& system, const CutoffSymbol& cutoff, double lambda, const Vec& c,
                             const Vec& x, double rel_tol = 1e-9);

/// Same for an arbitrary region of joint-spectrum space.
double leading_term_diagonal(const ModelSystem& system, const CutoffSymbol& cutoff, const SpectralRegion& region,
                             const Vec& x, double rel_tol = 1e-9);

/// Off-diagonal leading term: int e^{i Phi} w^2 dxi over the fiber at y, with amplitude
/// (|g(y)|/|g(x)|)^{1/4}. Phi is S(x, p) - S(y, p) (full phase) or its linearisation in x - y.
std::complex<double> leading_term_offdiag(const ModelSystem& system, const CutoffSymbol& cutoff, double lambda,
                                          const Vec& c, const Vec& x, const Vec& y,
                                          OffdiagMode mode = OffdiagMode::FullPhase, double rel_tol = 1e-10);

/// (2pi)^-n times the Liouville volume of the region, weighted by w^2.
double integrated_prediction(const ModelSystem& system, const SpectralRegion& region,
                             const CutoffSymbol& cutoff = CutoffSymbol::none());

/// Product of the one-dimensional sine kernels: prod_k sin(|c_k| lambda d_k) / (pi d_k), d = x - y.
double torus_sine_product(double lambda, const Vec& c, const Vec& x, const Vec& y);

/// Exact torus box kernel as a product of Dirichlet kernels over |k_i| <= |c_i| lambda.
std::complex<double> torus_dirichlet_product(double lambda, const Vec& c, const Vec& x, const Vec& y);

struct ComparisonRow {
    double lambda = 0.0;
    std::string point;
    std::complex<double> actual, predicted;
    double remainder_abs = 0.0;
    double truncation_bound = 0.0;
};

struct ComparisonReport {
    std::string id, target, system, cutoff, region;
    std::vector<double> lambdas;       // as requested
    std::vector<double> used_lambdas;  // after tie nudges
    std::vector<double> sup_values;    // per lambda: the quantity that is fitted
    std::vector<ComparisonRow> rows;
    ExponentFit fit;
    double target_exponent = 0.0;
    double threshold = 0.0;
    std::string criterion;  // "beta <= t" or "|beta| <= t"
    bool pass = false;
    std::vector<std::string> notes;
    std::map<std::string, std::string> meta;
    double seconds = 0.0;
};

/// Spectra reused across experiments (keyed by system description and build options).
class SpectrumCache {
public:
    const JointSpectrum& sor(const ProfileMetric& profile, double lam_max, const SorSpectrumOptions& options);

private:
    std::map<std::string, std::unique_ptr<JointSpectrum>> store_;
};

/// Runs the experiment: actual vs predicted sweeps, tie nudges, exponent fit.
ComparisonReport verify(const ExperimentConfig& cfg, SpectrumCache* cache = nullptr);

/// Points of the experiment: the configured ones, or defaults for the model.
std::vector<Vec> experiment_points(const ExperimentConfig& cfg, const ModelSystem& system);

}  // namespace qci
