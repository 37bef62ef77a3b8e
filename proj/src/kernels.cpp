#include "qci/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "qci/error.hpp"
#include "qci/simd.hpp"

namespace qci {
namespace {

constexpr double pi = std::numbers::pi;
constexpr double kAxisReach = 20000.0;  // cells summed explicitly on each side of the focus

bool is_sor(const JointSpectrum& s) { return s.system.kind() == ModelKind::SurfaceOfRevolution; }

void require_cover(const JointSpectrum& spec, const SpectralRegion& region, const CutoffSymbol& cutoff) {
    if (region.dim() != spec.dim()) throw DomainError("region dimension does not match the spectrum");
    if (!spec.covers(region, cutoff))
        throw IncompleteSpectrumError("spectrum (" + spec.completeness + ") does not cover " + region.describe());
}

// Sup of one factor over the cell [a, b] of one spectral axis.
struct AxisFactor {
    std::function<double(double, double)> sup;
    double focus_lo = 0.0, focus_hi = 0.0;  // where the factor is not small
    std::function<double(double)> tail;     // sum over cells at distance >= d on one side
};

// Bound on sum over eigenvalues missing from spec of prod_k |factor_k| times the unit-cell mass.
double missing_bound(const JointSpectrum& spec, const std::vector<AxisFactor>& axes, double cell_mass) {
    const int n = spec.dim();
    std::vector<double> all(n, 0.0), out(n, 0.0);
    std::vector<bool> skip(n, false);
    if (is_sor(spec)) {
        const double full = spec.system.profile().a_max() * spec.lam_max;
        skip[1] = spec.m_cap >= full;  // larger |m| only occurs beyond lam_max
    }
    for (int k = 0; k < n; ++k) {
        const bool lattice = !is_sor(spec) || k == 1;
        const double lo = spec.coverage.lower[k], hi = spec.coverage.upper[k];
        const auto& ax = axes[k];
        const double i0 = std::floor(ax.focus_lo) - kAxisReach, i1 = std::ceil(ax.focus_hi) + kAxisReach;
        for (double i = i0; i <= i1; i += 1.0) {
            const double a = i, b = lattice ? i : i + 1.0;
            const double v = ax.sup(a, b);
            all[k] += v;
            const bool covered = a >= lo && b <= hi;
            if (!covered) out[k] += v;
        }
        const double t = 2.0 * ax.tail(kAxisReach);
        all[k] += t;
        out[k] += t;
    }
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        if (skip[k]) continue;
        double term = out[k];
        for (int l = 0; l < n; ++l)
            if (l != k) term *= all[l];
        total += term;
    }
    return cell_mass * total;
}

double dist_to_interval(double a, double b, double lo, double hi) {
    if (b < lo) return lo - b;
    if (a > hi) return a - hi;
    return 0.0;
}

double cell_mass_bound(const JointSpectrum& spec, const EigenColumn& x, const EigenColumn& y) {
    if (!is_sor(spec)) return std::pow(2.0 * pi, -spec.dim());
    // measured on the computed spectrum; doubled for cells beyond it
    return 2.0 * unit_cell_mass(spec, x, y);
}

}  // namespace

EigenColumn eigen_column(const JointSpectrum& spec, const Vec& x) {
    if (x.size() != spec.dim()) throw DomainError("point dimension mismatch");
    const std::size_t n = spec.size();
    EigenColumn c;
    c.re.resize(n);
    c.im.resize(n);
    if (spec.system.kind() == ModelKind::FlatTorus) {
        const double amp = std::pow(2.0 * pi, -0.5 * spec.dim());
        for (std::size_t j = 0; j < n; ++j) {
            double phase = 0.0;
            for (int k = 0; k < spec.dim(); ++k) phase += spec.qn[k][j] * x[k];
            c.re[j] = amp * std::cos(phase);
            c.im[j] = amp * std::sin(phase);
        }
        return c;
    }
    if (!is_sor(spec)) throw DomainError("eigenfunctions are available for tori and surfaces of revolution");
    const auto f = radial_column(spec, x[0]);
    const double amp = 1.0 / std::sqrt(2.0 * pi);
    for (std::size_t j = 0; j < n; ++j) {
        const double phase = spec.qn[0][j] * x[1];
        c.re[j] = amp * f[j] * std::cos(phase);
        c.im[j] = amp * f[j] * std::sin(phase);
    }
    return c;
}

std::complex<double> spectral_sum(std::span<const double> coeff, const EigenColumn& x, const EigenColumn& y) {
    const std::size_t n = coeff.size();
    if (x.re.size() != n || y.re.size() != n) throw DomainError("column length mismatch");
    std::vector<double> p(n), q(n);
    for (std::size_t j = 0; j < n; ++j) {
        p[j] = x.re[j] * y.re[j] + x.im[j] * y.im[j];
        q[j] = x.im[j] * y.re[j] - x.re[j] * y.im[j];
    }
    return {simd::dot2(coeff, p), simd::dot2(coeff, q)};
}

std::vector<double> cutoff_weights(const JointSpectrum& spec, const CutoffSymbol& cutoff) {
    std::vector<double> w(spec.size(), 1.0);
    if (cutoff.kind() == CutoffSymbol::Kind::None) return w;
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const double v = spec.dim() == 2 ? cutoff.weight2(spec.lam[0][j], spec.lam[1][j])
                                         : cutoff.weight(spec.lam_vec(j));
        w[j] = v * v;
    }
    return w;
}

namespace {

std::vector<double> region_coeff(const JointSpectrum& spec, const SpectralRegion& region,
                                 const CutoffSymbol& cutoff, bool check_ties) {
    require_cover(spec, region, cutoff);
    if (check_ties) check_boundary_ties(spec, region);
    auto c = cutoff_weights(spec, cutoff);
    Vec eta(spec.dim());
    for (std::size_t j = 0; j < spec.size(); ++j) {
        if (c[j] == 0.0) continue;
        for (int k = 0; k < spec.dim(); ++k) eta[k] = spec.lam[k][j];
        if (!region.contains(eta)) c[j] = 0.0;
    }
    return c;
}

}  // namespace

std::complex<double> projector_kernel(const JointSpectrum& spec, const SpectralRegion& region,
                                      const CutoffSymbol& cutoff, const Vec& x, const Vec& y, bool check_ties) {
    const auto c = region_coeff(spec, region, cutoff, check_ties);
    const auto ex = eigen_column(spec, x);
    if (x == y) return spectral_sum(c, ex, ex);
    return spectral_sum(c, ex, eigen_column(spec, y));
}

double projector_count(const JointSpectrum& spec, const SpectralRegion& region, const CutoffSymbol& cutoff,
                       bool check_ties) {
    const auto c = region_coeff(spec, region, cutoff, check_ties);
    const std::vector<double> ones(c.size(), 1.0);
    return simd::dot2(c, ones);
}

double unit_box_diag(const JointSpectrum& spec, const Vec& mu, const CutoffSymbol& cutoff, const Vec& x) {
    return projector_kernel(spec, SpectralRegion::unit_box(mu), cutoff, x, x, false).real();
}

double unit_cell_mass(const JointSpectrum& spec, const EigenColumn& x, const EigenColumn& y) {
    if (!is_sor(spec)) return std::pow(2.0 * pi, -spec.dim());
    std::map<std::pair<int, long>, double> cells;
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const double ax = std::hypot(x.re[j], x.im[j]), ay = std::hypot(y.re[j], y.im[j]);
        cells[{spec.qn[0][j], static_cast<long>(std::floor(spec.lam[0][j]))}] += ax * ay;
    }
    double best = 0.0;
    for (const auto& [key, v] : cells) best = std::max(best, v);
    return best;
}

KernelResult smoothed_measure_kernel(const JointSpectrum& spec, const Vec& mu, const Mollifier& mol,
                                     const CutoffSymbol& cutoff, const Vec& x, const Vec& y) {
    const int n = spec.dim();
    if (mu.size() != n) throw DomainError("mu dimension does not match the spectrum");
    auto c = cutoff_weights(spec, cutoff);
    KernelResult r;
    for (std::size_t j = 0; j < spec.size(); ++j) {
        if (c[j] == 0.0) continue;
        double f = 1.0;
        for (int k = 0; k < n; ++k) f *= mol.rho(spec.lam[k][j] - mu[k]);
        c[j] *= f;
        ++r.terms;
    }
    const auto ex = eigen_column(spec, x);
    const auto ey = x == y ? ex : eigen_column(spec, y);
    r.value = spectral_sum(c, ex, ey);
    std::vector<AxisFactor> axes(n);
    for (int k = 0; k < n; ++k) {
        const double m = mu[k];
        axes[k].sup = [&mol, m](double a, double b) { return mol.envelope(dist_to_interval(a, b, m, m)); };
        axes[k].focus_lo = axes[k].focus_hi = m;
        axes[k].tail = [&mol](double d) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& t : mol.tail()) best = std::min(best, t.C * std::pow(d, 1 - t.N) / (t.N - 1));
            return best;
        };
    }
    r.truncation_bound = missing_bound(spec, axes, cell_mass_bound(spec, ex, ey));
    return r;
}

namespace {

struct WindowFactors {
    std::vector<double> coeff;  // prod_k W * w^2
    std::vector<AxisFactor> axes;
};

WindowFactors window_factors(const JointSpectrum& spec, double lambda, const Vec& c, const Mollifier& mol,
                             const CutoffSymbol& cutoff) {
    const int n = spec.dim();
    if (c.size() != n) throw DomainError("c dimension does not match the spectrum");
    WindowFactors wf;
    wf.coeff = cutoff_weights(spec, cutoff);
    for (std::size_t j = 0; j < spec.size(); ++j) {
        if (wf.coeff[j] == 0.0) continue;
        double f = 1.0;
        for (int k = 0; k < n; ++k) f *= mol.window(spec.lam[k][j], std::abs(c[k]) * lambda);
        wf.coeff[j] *= f;
    }
    wf.axes.resize(n);
    const double l1 = mol.l1_norm();
    for (int k = 0; k < n; ++k) {
        const double half = std::abs(c[k]) * lambda;
        wf.axes[k].sup = [&mol, half, l1](double a, double b) {
            const double d = dist_to_interval(a, b, -half, half);
            return d == 0.0 ? l1 : 0.5 * mol.window_defect_bound(d);
        };
        wf.axes[k].focus_lo = -half;
        wf.axes[k].focus_hi = half;
        wf.axes[k].tail = [&mol](double d) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& t : mol.tail())
                if (t.N > 2) best = std::min(best, t.C * std::pow(d, 2 - t.N) / ((t.N - 1) * (t.N - 2)));
            return best;
        };
    }
    return wf;
}

}  // namespace

KernelResult smoothed_projector_kernel(const JointSpectrum& spec, double lambda, const Vec& c, const Mollifier& mol,
                                       const CutoffSymbol& cutoff, const Vec& x, const Vec& y) {
    const auto wf = window_factors(spec, lambda, c, mol, cutoff);
    const auto ex = eigen_column(spec, x);
    const auto ey = x == y ? ex : eigen_column(spec, y);
    KernelResult r;
    r.value = spectral_sum(wf.coeff, ex, ey);
    r.terms = static_cast<std::size_t>(std::count_if(wf.coeff.begin(), wf.coeff.end(), [](double v) { return v != 0.0; }));
    r.truncation_bound = missing_bound(spec, wf.axes, cell_mass_bound(spec, ex, ey));
    return r;
}

TauberianResult tauberian_gap(const JointSpectrum& spec, double lambda, const Vec& c, const Mollifier& mol,
                              const CutoffSymbol& cutoff, const Vec& x, const Vec& y, std::size_t top) {
    const int n = spec.dim();
    const auto region = SpectralRegion::box(lambda, c);
    const auto rough_c = region_coeff(spec, region, cutoff, true);
    const auto wf = window_factors(spec, lambda, c, mol, cutoff);
    const auto ex = eigen_column(spec, x);
    const auto ey = x == y ? ex : eigen_column(spec, y);
    TauberianResult r;
    r.rough = spectral_sum(rough_c, ex, ey);
    r.smooth = spectral_sum(wf.coeff, ex, ey);
    r.gap = std::abs(r.rough - r.smooth);
    r.truncation_bound = missing_bound(spec, wf.axes, cell_mass_bound(spec, ex, ey));

    const auto w2 = cutoff_weights(spec, cutoff);
    std::vector<TauberianTerm> terms;
    terms.reserve(spec.size());
    for (std::size_t j = 0; j < spec.size(); ++j) {
        if (w2[j] == 0.0) continue;
        TauberianTerm t;
        t.lam = spec.lam_vec(j);
        double ind = 1.0, win = 1.0;
        std::vector<double> a(n), b(n), defect(n);
        for (int k = 0; k < n; ++k) {
            const double half = std::abs(c[k]) * lambda;
            a[k] = std::abs(t.lam[k]) <= half ? 1.0 : 0.0;
            b[k] = mol.window(t.lam[k], half);
            defect[k] = mol.window_defect_bound(std::abs(std::abs(t.lam[k]) - half));
            ind *= a[k];
            win *= b[k];
        }
        t.h = ind - win;
        for (int k = 0; k < n; ++k) {
            double p = std::min(defect[k], std::abs(a[k]) + std::abs(b[k]));
            for (int l = 0; l < n; ++l)
                if (l != k) p *= std::max(std::abs(a[l]), std::abs(b[l]));
            t.majorant += p;
        }
        const double mag = std::hypot(ex.re[j], ex.im[j]) * std::hypot(ey.re[j], ey.im[j]);
        t.contribution = t.h * w2[j] * mag;
        if (t.contribution == 0.0) continue;
        for (int k = 0; k < n; ++k) t.quantum_numbers.push_back(spec.qn[k][j]);
        terms.push_back(std::move(t));
    }
    const std::size_t keep = std::min(top, terms.size());
    std::partial_sort(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(keep), terms.end(),
                      [](const TauberianTerm& u, const TauberianTerm& v) {
                          return std::abs(u.contribution) > std::abs(v.contribution);
                      });
    terms.resize(keep);
    r.top_terms = std::move(terms);
    return r;
}

CoverBound unit_box_cover_bound(const JointSpectrum& spec, const Vec& mu, const Mollifier& fejer,
                                const CutoffSymbol& cutoff, const Vec& x) {
    if (!fejer.nonnegative()) throw DomainError("the covering bound needs a Fejer mollifier");
    const int n = spec.dim();
    const double eps = fejer.cover_radius(n);
    CoverBound cb;
    cb.per_axis = static_cast<int>(std::ceil(1.0 / (2.0 * eps)));
    const double side = 1.0 / cb.per_axis;
    std::size_t count = 1;
    for (int k = 0; k < n; ++k) count *= static_cast<std::size_t>(cb.per_axis);
    Vec centre(n);
    for (std::size_t idx = 0; idx < count; ++idx) {
        std::size_t rest = idx;
        for (int k = 0; k < n; ++k) {
            centre[k] = mu[k] + side * (static_cast<double>(rest % cb.per_axis) + 0.5);
            rest /= cb.per_axis;
        }
        const auto s = smoothed_measure_kernel(spec, centre, fejer, cutoff, x, x);
        cb.bound += 2.0 * s.value.real();
        cb.truncation_bound += 2.0 * s.truncation_bound;
    }
    return cb;
}

}  // namespace qci
