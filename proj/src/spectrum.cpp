#include "qci/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <sstream>

#include "qci/error.hpp"
#include "qci/interp.hpp"
#include "qci/parallel.hpp"
#include "qci/simd.hpp"

namespace qci {

using std::numbers::pi;

Vec JointSpectrum::lam_vec(std::size_t j) const {
    Vec v(dim());
    for (int k = 0; k < dim(); ++k) v[k] = lam[k][j];
    return v;
}

JointEigenpair JointSpectrum::pair(std::size_t j) const {
    JointEigenpair p;
    p.lam = lam_vec(j);
    for (const auto& q : qn) p.quantum_numbers.push_back(q[j]);
    p.norm_cert = norm_cert.empty() ? 0.0 : norm_cert[j];
    if (!lam_base.empty()) p.lam_base = lam_base[j];
    if (has_samples()) {
        auto s = radial_samples(j);
        p.radial_samples.assign(s.begin(), s.end());
    }
    for (std::size_t k = 0; k < probes.size(); ++k) p.probe_values.push_back(probe_values[k * size() + j]);
    return p;
}

std::span<const double> JointSpectrum::radial_samples(std::size_t j) const {
    const auto n = static_cast<std::size_t>(grid_size);
    return std::span<const double>(samples).subspan(j * n, n);
}

std::optional<std::size_t> JointSpectrum::probe_index(double sigma) const {
    for (std::size_t p = 0; p < probes.size(); ++p)
        if (std::fabs(probes[p] - sigma) <= 1e-12) return p;
    return std::nullopt;
}

std::span<const double> JointSpectrum::probe_column(std::size_t p) const {
    return std::span<const double>(probe_values).subspan(p * size(), size());
}

bool JointSpectrum::covers(const SpectralRegion& region, const CutoffSymbol& cutoff) const {
    Vec lo = region.lower(), hi = region.upper();
    if (lo.size() != coverage.lower.size()) return false;
    if (double bound; cutoff.confines_ratio(bound) && lo.size() == 2) {
        const double e1 = std::max(0.0, hi[0]);
        lo[1] = std::max(lo[1], -bound * e1);
        hi[1] = std::min(hi[1], bound * e1);
        if (lo[1] > hi[1]) return true;
    }
    if ((lo.array() < coverage.lower.array()).any() || (hi.array() > coverage.upper.array()).any())
        return false;
    if (std::isfinite(coverage.norm_max)) {
        const Vec corner = lo.cwiseAbs().cwiseMax(hi.cwiseAbs());
        const double need = region.kind() == SpectralRegion::Kind::ConeSector
                                ? std::min(region.radius(), corner.norm())
                                : corner.norm();
        if (need > coverage.norm_max) return false;
    }
    if (coverage.sector) {
        const auto& s = *coverage.sector;
        if (region.kind() != SpectralRegion::Kind::ConeSector) return false;
        if (region.is_ball() && !s.is_ball()) return false;
        if (!s.is_ball() && (vector_angle(region.axis(), s.axis()) + region.half_angle() >
                             s.half_angle() + 1e-15))
            return false;
        if (region.radius() > s.radius()) return false;
    }
    return true;
}

void check_boundary_ties(const JointSpectrum& spec, const SpectralRegion& region) {
    const Vec lo = region.lower().array() - 2 * kBoundaryTieTol;
    const Vec hi = region.upper().array() + 2 * kBoundaryTieTol;
    const int n = spec.dim();
    Vec eta(n);
    for (std::size_t j = 0; j < spec.size(); ++j) {
        bool near = true;
        for (int k = 0; k < n && near; ++k) {
            eta[k] = spec.lam[k][j];
            near = eta[k] >= lo[k] && eta[k] <= hi[k];
        }
        if (!near) continue;
        if (region.kind() == SpectralRegion::Kind::ConeSector && !region.is_ball() && eta.norm() == 0.0)
            continue;
        const double d = region.boundary_distance(eta);
        if (d <= kBoundaryTieTol) {
            std::ostringstream os;
            os.precision(17);
            os << "spectral point (";
            for (int k = 0; k < n; ++k) os << (k ? "," : "") << eta[k];
            os << ") lies on the boundary of " << region.describe();
            throw BoundaryTieError(os.str(), d);
        }
    }
}

namespace {

constexpr double kMaxLatticePoints = 1e8;

JointSpectrum torus_skeleton(int n) {
    JointSpectrum s;
    s.system = make_torus(n);
    s.lam.assign(n, {});
    s.qn.assign(n, {});
    return s;
}

template <class Keep>
void scan_lattice(int n, const std::vector<long>& lo, const std::vector<long>& hi, Keep&& keep,
                  JointSpectrum& out) {
    double total = 1.0;
    for (int k = 0; k < n; ++k) total *= static_cast<double>(std::max(0L, hi[k] - lo[k] + 1));
    if (total > kMaxLatticePoints)
        throw DomainError("refusing to enumerate more than 1e8 lattice points");
    if (total == 0.0) return;
    std::vector<long> k(lo);
    Vec eta(n);
    for (;;) {
        for (int i = 0; i < n; ++i) eta[i] = static_cast<double>(k[i]);
        if (keep(eta)) {
            for (int i = 0; i < n; ++i) {
                out.lam[i].push_back(eta[i]);
                out.qn[i].push_back(static_cast<int>(k[i]));
            }
            out.norm_cert.push_back(0.0);
        }
        int i = n - 1;
        while (i >= 0 && k[i] == hi[i]) {
            k[i] = lo[i];
            --i;
        }
        if (i < 0) break;
        ++k[i];
    }
}

}  // namespace

JointSpectrum enumerate_torus(int n, const SpectralRegion& region) {
    if (region.dim() != n) throw DomainError("region dimension does not match the torus");
    JointSpectrum s = torus_skeleton(n);
    std::vector<long> lo(n), hi(n);
    for (int k = 0; k < n; ++k) {
        lo[k] = static_cast<long>(std::ceil(region.lower()[k] - 2 * kBoundaryTieTol));
        hi[k] = static_cast<long>(std::floor(region.upper()[k] + 2 * kBoundaryTieTol));
    }
    const bool apex_excluded = region.kind() == SpectralRegion::Kind::ConeSector && !region.is_ball();
    scan_lattice(
        n, lo, hi,
        [&](const Vec& eta) {
            if (apex_excluded && eta.norm() == 0.0) return false;
            const double d = region.boundary_distance(eta);
            if (d <= kBoundaryTieTol) {
                std::ostringstream os;
                os << "lattice point on the boundary of " << region.describe();
                throw BoundaryTieError(os.str(), d);
            }
            return region.contains(eta);
        },
        s);
    s.coverage.lower = region.lower();
    s.coverage.upper = region.upper();
    if (region.kind() == SpectralRegion::Kind::ConeSector) {
        s.coverage.norm_max = region.radius();
        if (!region.is_ball()) s.coverage.sector = region;
    }
    s.lam_max = region.max_norm();
    s.completeness = "exact lattice enumeration of " + region.describe();
    return s;
}

JointSpectrum enumerate_torus_window(int n, const Vec& lower, const Vec& upper) {
    if (lower.size() != n || upper.size() != n) throw DomainError("window dimension mismatch");
    JointSpectrum s = torus_skeleton(n);
    std::vector<long> lo(n), hi(n);
    for (int k = 0; k < n; ++k) {
        lo[k] = static_cast<long>(std::ceil(lower[k]));
        hi[k] = static_cast<long>(std::floor(upper[k]));
    }
    scan_lattice(n, lo, hi, [](const Vec&) { return true; }, s);
    s.coverage.lower = lower;
    s.coverage.upper = upper;
    s.lam_max = lower.cwiseAbs().cwiseMax(upper.cwiseAbs()).norm();
    s.completeness = "exact lattice enumeration of a window";
    return s;
}

namespace radial {

Tridiagonal assemble(const ProfileMetric& profile, int m, int grid_size) {
    if (grid_size < 16) throw ConfigError("radial grid too small");
    const int n = grid_size;
    Tridiagonal t;
    t.h = profile.length() / n;
    const double h2 = t.h * t.h;
    t.weight.resize(n);
    std::vector<double> face(n + 1, 0.0);  // face[i] = a at sigma = i h; poles are exactly 0
    for (int i = 1; i < n; ++i) face[i] = profile.a(i * t.h);
    for (int i = 0; i < n; ++i) t.weight[i] = profile.a((i + 0.5) * t.h);
    t.diag.resize(n);
    t.offdiag.resize(n - 1);
    t.offdiag_sq.resize(n - 1);
    const double m2 = static_cast<double>(m) * m;
    for (int i = 0; i < n; ++i) {
        const double a = t.weight[i];
        t.diag[i] = (face[i + 1] + face[i]) / (h2 * a) + m2 / (a * a);
    }
    double emax = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        t.offdiag[i] = -face[i + 1] / (h2 * std::sqrt(t.weight[i] * t.weight[i + 1]));
        t.offdiag_sq[i] = t.offdiag[i] * t.offdiag[i];
        emax = std::max(emax, std::fabs(t.offdiag[i]));
    }
    t.lower = std::numeric_limits<double>::infinity();
    t.upper = -t.lower;
    for (int i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::fabs(t.offdiag[i - 1]) : 0.0) +
                         (i + 1 < n ? std::fabs(t.offdiag[i]) : 0.0);
        t.lower = std::min(t.lower, t.diag[i] - r);
        t.upper = std::max(t.upper, t.diag[i] + r);
    }
    t.pivmin = std::numeric_limits<double>::min() * std::max(1.0, emax * emax);
    return t;
}

std::vector<double> eigenvalues_below(const Tridiagonal& t, double mu_max) {
    const double top = std::min(mu_max, t.upper);
    std::int32_t total = 0;
    {
        const double shift = top;
        simd::sturm_count(t.diag, t.offdiag_sq, std::span<const double>(&shift, 1), t.pivmin,
                          std::span<std::int32_t>(&total, 1));
    }
    std::vector<double> out(static_cast<std::size_t>(total));
    if (total == 0) return out;

    struct Interval {
        double a, b;
        std::int32_t ca, cb;
    };
    const double lo = std::min(t.lower, 0.0) - 1.0;
    std::vector<Interval> work{{lo, top, 0, total}};
    std::vector<double> shifts;
    std::vector<std::int32_t> counts;
    constexpr double rel = 4.0 * std::numeric_limits<double>::epsilon();
    for (int round = 0; !work.empty(); ++round) {
        if (round > 400) throw NumericError("radial bisection did not converge");
        shifts.resize(work.size());
        counts.resize(work.size());
        for (std::size_t i = 0; i < work.size(); ++i) shifts[i] = 0.5 * (work[i].a + work[i].b);
        simd::sturm_count(t.diag, t.offdiag_sq, shifts, t.pivmin, counts);
        std::vector<Interval> next;
        next.reserve(work.size() * 2);
        for (std::size_t i = 0; i < work.size(); ++i) {
            const Interval& iv = work[i];
            const double mid = shifts[i];
            const std::int32_t c = std::clamp(counts[i], iv.ca, iv.cb);
            for (const Interval child : {Interval{iv.a, mid, iv.ca, c}, Interval{mid, iv.b, c, iv.cb}}) {
                if (child.cb == child.ca) continue;
                const double tol = rel * std::max(std::fabs(child.a), std::fabs(child.b)) + 2 * t.pivmin;
                if (child.b - child.a <= tol) {
                    for (std::int32_t k = child.ca; k < child.cb; ++k) out[k] = 0.5 * (child.a + child.b);
                } else {
                    next.push_back(child);
                }
            }
        }
        work.swap(next);
    }
    return out;
}

namespace {

// LU factorisation with partial pivoting of a general tridiagonal matrix (LAPACK dgttrf/dgttrs).
struct TridiagLU {
    std::vector<double> dl, d, du, du2;
    std::vector<char> swapped;

    TridiagLU(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
        : dl(std::move(lower)), d(std::move(diag)), du(std::move(upper)) {
        const std::size_t n = d.size();
        du2.assign(n > 2 ? n - 2 : 0, 0.0);
        swapped.assign(n > 0 ? n - 1 : 0, 0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::fabs(d[i]) >= std::fabs(dl[i])) {
                if (d[i] != 0.0) {
                    const double fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                const double fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                const double temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = 1;
            }
        }
    }

    void fix_zero_pivots(double tiny) {
        for (double& v : d)
            if (std::fabs(v) < tiny) v = std::copysign(tiny, v == 0.0 ? 1.0 : v);
    }

    void solve(std::vector<double>& b) const {
        const std::size_t n = d.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!swapped[i]) {
                b[i + 1] -= dl[i] * b[i];
            } else {
                const double temp = b[i] - dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            }
        }
        b[n - 1] /= d[n - 1];
        if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for (std::size_t i = n - 2; i-- > 0;) b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
};

}  // namespace

std::vector<double> eigenvector(const Tridiagonal& t, double mu) {
    const std::size_t n = t.diag.size();
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = t.diag[i] - mu;
    TridiagLU lu(t.offdiag, std::move(diag), t.offdiag);
    const double scale = std::max(std::fabs(t.lower), std::fabs(t.upper));
    lu.fix_zero_pivots(std::numeric_limits<double>::epsilon() * scale);
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    for (int it = 0; it < 3; ++it) {
        lu.solve(v);
        const double norm = std::sqrt(simd::dot2(v, v));
        if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericError("inverse iteration failed");
        for (double& x : v) x /= norm;
    }
    // deterministic sign: first sample of appreciable size is positive
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, std::fabs(x));
    for (double x : v) {
        if (std::fabs(x) > 1e-3 * vmax) {
            if (x < 0) for (double& y : v) y = -y;
            break;
        }
    }
    return v;
}

}  // namespace radial

std::vector<JointEigenpair> solve_radial_channel(const ProfileMetric& profile, int m, double lam_max,
                                                 int grid_size, const ChannelOptions& options) {
    if (grid_size < 256) throw ConfigError("radial grid_size must be at least 256");
    if (!(lam_max > 0.0)) throw ConfigError("lam_max must be positive");
    const double mu_top = std::pow(options.pad * lam_max, 2);
    const auto base = radial::assemble(profile, m, grid_size);
    std::vector<double> mu = radial::eigenvalues_below(base, mu_top);
    std::vector<double> extrapolated = mu;
    if (options.richardson) {
        const auto fine = radial::assemble(profile, m, 2 * grid_size);
        const std::vector<double> mu_fine = radial::eigenvalues_below(fine, mu_top);
        const std::size_t k = std::min(mu.size(), mu_fine.size());
        mu.resize(k);
        extrapolated.resize(k);
        for (std::size_t i = 0; i < k; ++i) extrapolated[i] = (4.0 * mu_fine[i] - mu[i]) / 3.0;
    }
    // m = 0 annihilates sqrt(a) exactly on every grid: pin its eigenvalue inside the bisection roundoff
    const double roundoff = 1e3 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(base.lower), base.upper);
    if (m == 0 && !mu.empty() && std::fabs(mu[0]) <= roundoff && std::fabs(extrapolated[0]) <= roundoff) {
        mu[0] = 0.0;
        extrapolated[0] = 0.0;
    }
    std::vector<JointEigenpair> out;
    const double h = base.h;
    const int n = grid_size;
    std::vector<double> ah(n);
    for (int i = 0; i < n; ++i) ah[i] = base.weight[i] * h;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double lam = std::sqrt(std::max(0.0, extrapolated[i]));
        if (lam > lam_max) continue;
        JointEigenpair p;
        p.lam = Vec(2);
        p.lam << lam, static_cast<double>(m);
        p.quantum_numbers = {m, static_cast<int>(i)};
        p.lam_base = std::sqrt(std::max(0.0, mu[i]));
        std::vector<double> g = radial::eigenvector(base, mu[i]);
        // f = g / sqrt(a) normalised so that sum f^2 a h = 1
        const double gscale = 1.0 / std::sqrt(h);
        std::vector<double> f(n);
        for (int k = 0; k < n; ++k) f[k] = g[k] * gscale / std::sqrt(base.weight[k]);
        p.norm_cert = std::fabs(simd::dot3(ah, f, f) - 1.0);
        for (double s : options.probes) {
            if (!(s >= 0.0 && s <= profile.length())) throw DomainError("probe outside [0, L]");
            p.probe_values.push_back(cubic_uniform(f, 0.5 * h, h, s));
        }
        if (options.keep_samples) p.radial_samples = std::move(f);
        out.push_back(std::move(p));
    }
    return out;
}

JointSpectrum build_sor_spectrum(const ProfileMetric& profile, double lam_max,
                                 const SorSpectrumOptions& options) {
    if (!(lam_max > 0.0)) throw ConfigError("lam_max must be positive");
    const int full_cap = static_cast<int>(std::ceil(profile.a_max() * lam_max)) + 2;
    const int m_cap = options.m_cap < 0 ? full_cap : options.m_cap;
    ChannelOptions ch;
    ch.richardson = options.richardson;
    ch.keep_samples = options.keep_samples;
    ch.probes = options.probes;
    std::vector<std::vector<JointEigenpair>> channels(m_cap + 1);
    parallel_for(channels.size(), [&](std::size_t m) {
        channels[m] = solve_radial_channel(profile, static_cast<int>(m), lam_max, options.grid_size, ch);
    });

    JointSpectrum s;
    s.system = make_surface_of_revolution(profile);
    s.lam.assign(2, {});
    s.qn.assign(2, {});
    s.lam_max = lam_max;
    s.grid_size = options.grid_size;
    s.m_cap = m_cap;
    s.richardson = options.richardson;
    s.probes = options.probes;
    std::size_t total = 0;
    for (int m = -m_cap; m <= m_cap; ++m) total += channels[std::abs(m)].size();
    for (auto& v : s.lam) v.reserve(total);
    for (auto& v : s.qn) v.reserve(total);
    std::vector<std::vector<double>> probe_rows(s.probes.size());
    for (auto& r : probe_rows) r.reserve(total);
    if (options.keep_samples) s.samples.reserve(total * options.grid_size);
    for (int m = -m_cap; m <= m_cap; ++m) {
        for (const auto& p : channels[std::abs(m)]) {
            s.lam[0].push_back(p.lam[0]);
            s.lam[1].push_back(static_cast<double>(m));
            s.qn[0].push_back(m);
            s.qn[1].push_back(p.quantum_numbers[1]);
            s.norm_cert.push_back(p.norm_cert);
            s.lam_base.push_back(p.lam_base);
            for (std::size_t k = 0; k < probe_rows.size(); ++k) probe_rows[k].push_back(p.probe_values[k]);
            if (options.keep_samples)
                s.samples.insert(s.samples.end(), p.radial_samples.begin(), p.radial_samples.end());
        }
    }
    for (auto& r : probe_rows) s.probe_values.insert(s.probe_values.end(), r.begin(), r.end());
    s.coverage.lower = Vec(2);
    s.coverage.upper = Vec(2);
    s.coverage.lower << -std::numeric_limits<double>::infinity(), -static_cast<double>(m_cap);
    s.coverage.upper << lam_max, static_cast<double>(m_cap);
    std::ostringstream os;
    if (m_cap >= full_cap - 2) {
        os << "complete for lambda <= " << lam_max << ": channels |m| <= " << m_cap
           << " exhaust p1 >= |Theta| / a_max";
    } else {
        os << "complete for lambda <= " << lam_max << " within channels |m| <= " << m_cap;
    }
    s.completeness = os.str();
    return s;
}

namespace {

// groups indices whose components agree within rel_tol, one component at a time
std::size_t largest_group(const JointSpectrum& spec, std::vector<std::size_t> idx, std::size_t comp, double rel_tol) {
    if (comp == spec.lam.size() || idx.size() <= 1) return idx.size();
    const auto& row = spec.lam[comp];
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
    std::size_t best = 0, start = 0;
    for (std::size_t i = 1; i <= idx.size(); ++i) {
        const bool split = i == idx.size() || std::fabs(row[idx[i]] - row[idx[i - 1]]) >
                                                  rel_tol * std::max({1.0, std::fabs(row[idx[i]]), std::fabs(row[idx[i - 1]])});
        if (!split) continue;
        best = std::max(best, largest_group(spec, {idx.begin() + start, idx.begin() + i}, comp + 1, rel_tol));
        start = i;
    }
    return best;
}

}  // namespace

std::size_t max_joint_multiplicity(const JointSpectrum& spec, double rel_tol) {
    std::vector<std::size_t> idx(spec.size());
    std::iota(idx.begin(), idx.end(), 0);
    return largest_group(spec, std::move(idx), 0, rel_tol);
}

std::complex<double> eval_eigenfunction(const JointSpectrum& spec, std::size_t j, const Vec& x) {
    if (j >= spec.size()) throw DomainError("eigenpair index out of range");
    if (x.size() != spec.dim()) throw DomainError("point dimension mismatch");
    if (spec.system.kind() == ModelKind::FlatTorus) {
        double phase = 0.0;
        for (int k = 0; k < spec.dim(); ++k) phase += spec.qn[k][j] * x[k];
        return std::polar(std::pow(2.0 * pi, -0.5 * spec.dim()), phase);
    }
    const double sigma = x[0];
    const double L = spec.system.profile().length();
    if (!(sigma >= 0.0 && sigma <= L)) throw DomainError("sigma outside [0, L]");
    double f;
    if (auto p = spec.probe_index(sigma)) {
        f = spec.probe_values[*p * spec.size() + j];
    } else if (spec.has_samples()) {
        const double h = L / spec.grid_size;
        f = cubic_uniform(spec.radial_samples(j), 0.5 * h, h, sigma);
    } else {
        throw DomainError("no radial data at the requested sigma");
    }
    return std::polar(f / std::sqrt(2.0 * pi), spec.qn[0][j] * x[1]);
}

std::vector<double> radial_column(const JointSpectrum& spec, double sigma) {
    if (spec.system.kind() != ModelKind::SurfaceOfRevolution)
        throw DomainError("radial data exist only for surfaces of revolution");
    const double L = spec.system.profile().length();
    if (!(sigma >= 0.0 && sigma <= L)) throw DomainError("sigma outside [0, L]");
    if (auto p = spec.probe_index(sigma)) {
        auto col = spec.probe_column(*p);
        return {col.begin(), col.end()};
    }
    if (!spec.has_samples()) throw DomainError("no radial data at the requested sigma");
    const double h = L / spec.grid_size;
    std::vector<double> out(spec.size());
    for (std::size_t j = 0; j < spec.size(); ++j)
        out[j] = cubic_uniform(spec.radial_samples(j), 0.5 * h, h, sigma);
    return out;
}

}  // namespace qci
