#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qci/cutoff.hpp"
#include "qci/models.hpp"
#include "qci/region.hpp"

namespace qci {

/// One joint eigenpair. Torus: quantum numbers are the lattice vector k. Surface of
/// revolution: (m, radial index k) and lam = (lambda, m); radial samples live on the staggered
/// grid sigma_i = (i + 1/2) h.
struct JointEigenpair {
    Vec lam;
    std::vector<int> quantum_numbers;
    std::vector<double> radial_samples;
    std::vector<double> probe_values;
    double norm_cert = 0.0;
    /// Eigenvalue on the base grid before extrapolation (surfaces of revolution).
    double lam_base = std::numeric_limits<double>::quiet_NaN();
};

/// Every joint eigenvalue eta with lower <= eta <= upper and |eta| <= norm_max is present; a
/// cone, when set, restricts this further to the sector.
struct SpectrumCoverage {
    Vec lower, upper;
    double norm_max = std::numeric_limits<double>::infinity();
    std::optional<SpectralRegion> sector;
};

/// Joint spectrum in structure-of-arrays form, ordered by quantum numbers ((m, k) for
/// surfaces of revolution, lexicographic k for tori).
struct JointSpectrum {
    ModelSystem system;
    std::vector<std::vector<double>> lam;  // lam[component][pair]
    std::vector<std::vector<int>> qn;      // qn[component][pair]
    std::vector<double> norm_cert;
    std::vector<double> lam_base;
    double lam_max = 0.0;
    SpectrumCoverage coverage;
    std::string completeness;

    // surfaces of revolution
    int grid_size = 0;
    int m_cap = 0;
    bool richardson = false;
    std::vector<double> probes;
    std::vector<double> probe_values;  // probe-major: probe_values[p * size() + j]
    std::vector<double> samples;       // pair-major, grid_size values per pair, optional

    int dim() const { return static_cast<int>(lam.size()); }
    std::size_t size() const { return lam.empty() ? 0 : lam[0].size(); }
    Vec lam_vec(std::size_t j) const;
    JointEigenpair pair(std::size_t j) const;
    bool has_samples() const { return !samples.empty(); }
    std::span<const double> radial_samples(std::size_t j) const;
    std::optional<std::size_t> probe_index(double sigma) const;
    std::span<const double> probe_column(std::size_t p) const;
    /// Whether every eigenvalue of region that can carry nonzero cutoff weight is present.
    bool covers(const SpectralRegion& region, const CutoffSymbol& cutoff) const;
};

/// Lattice points k in Z^n inside region, with boundary-tie detection. Refuses more than 1e8
/// candidate points.
JointSpectrum enumerate_torus(int n, const SpectralRegion& region);

/// All lattice points in the closed window lower <= k <= upper.
JointSpectrum enumerate_torus_window(int n, const Vec& lower, const Vec& upper);

struct ChannelOptions {
    bool richardson = true;
    bool keep_samples = true;
    std::vector<double> probes;
    /// Eigenvalues are computed up to pad * lam_max on both grids so extrapolation pairs
    /// indices correctly near lam_max.
    double pad = 1.1;
};

/// Radial eigenpairs of -(1/a)(a f')' + m^2/a^2 f = lambda^2 f with lambda <= lam_max.
std::vector<JointEigenpair> solve_radial_channel(const ProfileMetric& profile, int m, double lam_max,
                                                 int grid_size, const ChannelOptions& options = {});

struct SorSpectrumOptions {
    int grid_size = 4096;
    bool richardson = true;
    /// Largest |m| solved; negative selects ceil(a_max lam_max) + 2, which is complete.
    int m_cap = -1;
    std::vector<double> probes;
    bool keep_samples = false;
};

JointSpectrum build_sor_spectrum(const ProfileMetric& profile, double lam_max,
                                 const SorSpectrumOptions& options = {});

/// Largest number of pairs sharing one joint eigenvalue (componentwise within rel_tol).
std::size_t max_joint_multiplicity(const JointSpectrum& spec, double rel_tol = 1e-9);

/// Normalised joint eigenfunction at x. Surfaces of revolution need stored samples or a probe
/// at x's sigma.
std::complex<double> eval_eigenfunction(const JointSpectrum& spec, std::size_t j, const Vec& x);

/// f_j(sigma) for every pair (surfaces of revolution).
std::vector<double> radial_column(const JointSpectrum& spec, double sigma);

/// Raises BoundaryTieError if any spectral point lies within kBoundaryTieTol of the region
/// boundary (cone apexes excepted).
void check_boundary_ties(const JointSpectrum& spec, const SpectralRegion& region);

/// Low-level pieces of the radial solver, exposed for tests and benchmarks.
namespace radial {

struct Tridiagonal {
    std::vector<double> diag, offdiag, offdiag_sq;
    std::vector<double> weight;  // a(sigma_i)
    double h = 0.0;
    double pivmin = 0.0;
    double lower = 0.0, upper = 0.0;  // Gershgorin bounds
};

Tridiagonal assemble(const ProfileMetric& profile, int m, int grid_size);
/// All eigenvalues below mu_max, ascending, by batched Sturm bisection.
std::vector<double> eigenvalues_below(const Tridiagonal& t, double mu_max);
/// Unit eigenvector (Euclidean) of the symmetric tridiagonal for the eigenvalue mu.
std::vector<double> eigenvector(const Tridiagonal& t, double mu);

}  // namespace radial

}  // namespace qci
