#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qci/cutoff.hpp"
#include "qci/models.hpp"
#include "qci/region.hpp"

namespace qci {

/// Relative singular-value threshold for numerical rank.
inline constexpr double kRankTol = 1e-8;

/// Numerical rank: singular values above kRankTol * max(largest singular value, 1e-12).
int numerical_rank(const Mat& m);

/// Rank of [d p_i / d xi_j] at (x, xi).
int fiber_rank(const ModelSystem& system, const Vec& x, const Vec& xi);

/// Unit covector at angle phi on the cosphere over x: (cos, a sin) for surfaces of revolution,
/// (cos, sin) otherwise (in the first two coordinates).
Vec cosphere_point(const ModelSystem& system, const Vec& x, double phi);

/// Cells of a box in the configuration chart times the angle phi on the cosphere.
struct ScanGrid {
    Vec lower, upper;       // configuration chart box
    std::vector<int> cells; // cells per configuration coordinate
    int phi_cells = 90;
    int refine = 3;         // bisection levels for cells showing a sign change
};

/// Chart box with sensible cell counts for the model.
ScanGrid default_scan_grid(const ModelSystem& system, int cells = 63, int phi_cells = 90);

struct ScanCell {
    Vec lower, upper;  // configuration coordinates
    double phi_lo = 0.0, phi_hi = 0.0;
    int rank = 0;                   // smallest fiber rank seen in the cell
    bool nondegenerate = true;      // dp_1 ^ ... ^ dp_n != 0 throughout
    double min_singular = 0.0;      // smallest singular value of the full gradient / largest, at the centre
    double degenerate_fraction = 0.0;
    bool meets_sigma_zero = false;  // surfaces of revolution: Sigma changes sign
    bool meets_pole = false;
    bool meets_critical = false;    // contains a critical meridian of the profile
};

struct RankScanReport {
    ScanGrid grid;
    int dim = 2;
    std::vector<ScanCell> cells;
    std::vector<double> critical_meridians;

    std::vector<bool> full_rank_mask() const;
    std::vector<bool> nondegenerate_mask() const;
    std::size_t degenerate_count() const;
    std::size_t rank_drop_count() const;
    /// Distinct sigma intervals [lo, hi] of degenerate cells (surfaces of revolution).
    std::vector<std::pair<double, double>> degenerate_sigma_bands() const;
    void write_csv(const std::string& path) const;
};

RankScanReport scan_regions(const ModelSystem& system, const ScanGrid& grid);

/// Interior critical points of the profile: sign changes of a' on a fine grid, refined.
std::vector<double> critical_set_scan(const ProfileMetric& profile, int samples = 8192);

/// Admissible band and cone used for image membership. Surfaces of revolution: sigma in
/// [sigma_lo, sigma_hi], Sigma > 0, |Theta| <= c_max p_1. Tori: the Fourier cone of axis and
/// half_angle.
struct AdmissibleBand {
    double sigma_lo = 0.0, sigma_hi = 0.0;
    double c_max = 0.0;
    Vec axis;
    double half_angle = 0.0;
};

bool moment_image_contains(const ModelSystem& system, const AdmissibleBand& band, const Vec& eta);

/// Polar coordinates on the fiber over x (n = 2): xi = r xi(phi) with dxi = jacobian r dr dphi
/// and p(x, xi) = r ray(phi).
struct FiberChart {
    double jacobian = 1.0;
    std::function<Vec(double)> ray;
    /// Angles phi in (-pi, pi] where the direction of ray(phi) crosses one of eta_breaks, plus
    /// the chart's own turning angles.
    std::function<std::vector<double>(const std::vector<double>&)> breaks;
};

FiberChart fiber_chart(const ModelSystem& system, const Vec& x);

/// int 1{p(x, xi) in region} w(p(x, xi))^2 dxi over the fiber over x (n = 2).
double fiber_volume(const ModelSystem& system, const Vec& x, const SpectralRegion& region,
                    const CutoffSymbol& weight, double rel_tol = 1e-9);

/// Symplectic volume of p^{-1}(region) weighted by w^2, over the configuration chart.
double liouville_volume(const ModelSystem& system, const SpectralRegion& region,
                        const CutoffSymbol& weight = CutoffSymbol::none(), double rel_tol = 1e-7);

/// Monte Carlo estimate of the same volume with a fixed seed.
double liouville_volume_mc(const ModelSystem& system, const SpectralRegion& region,
                           const CutoffSymbol& weight, std::size_t samples, unsigned seed = 12345);

}  // namespace qci
