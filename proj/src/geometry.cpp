#include "qci/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <boost/math/tools/roots.hpp>
#include <Eigen/SVD>

#include "qci/error.hpp"
#include "qci/parallel.hpp"
#include "qci/quadrature.hpp"

namespace qci {
namespace {

constexpr double pi = std::numbers::pi;

bool is_sor(const ModelSystem& s) { return s.kind() == ModelKind::SurfaceOfRevolution; }

// n-subsets of {0, ..., m-1} in lexicographic order.
std::vector<std::vector<int>> subsets(int m, int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    while (true) {
        out.push_back(idx);
        int i = n - 1;
        while (i >= 0 && idx[i] == m - n + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

// Sample state at one point of a scan cell.
struct Sample {
    int rank = 0;
    double fiber_det = 0.0;
    std::vector<double> minors;
    double scale = 0.0;
};

class CellScanner {
public:
    CellScanner(const ModelSystem& sys, int refine)
        : sys_(sys), n_(sys.dim()), refine_(refine), minor_cols_(subsets(2 * sys.dim(), sys.dim())) {
        if (is_sor(sys)) {
            const double L = sys.profile().length();
            clamp_lo_ = L * 1e-6;
            clamp_hi_ = L * (1.0 - 1e-6);
        }
    }

    // box = (x_1..x_n, phi) lower/upper
    void scan(const Vec& lo, const Vec& hi, ScanCell& cell) const {
        double degenerate_volume = 0.0;
        int min_rank = n_;
        bool nondeg = true;
        visit(lo, hi, 0, 1.0, min_rank, nondeg, degenerate_volume);
        cell.rank = min_rank;
        cell.nondegenerate = nondeg;
        cell.degenerate_fraction = degenerate_volume;
        Vec centre = 0.5 * (lo + hi);
        Vec x = clamp(centre.head(n_));
        const Mat g = sys_.full_gradient(x, cosphere_point(sys_, x, centre[n_]));
        Eigen::JacobiSVD<Mat> svd(g);
        const auto& s = svd.singularValues();
        cell.min_singular = s[s.size() - 1] / std::max(s[0], 1e-300);
    }

private:
    Vec clamp(Vec x) const {
        if (is_sor(sys_)) x[0] = std::clamp(x[0], clamp_lo_, clamp_hi_);
        return x;
    }

    Sample sample(const Vec& p) const {
        Sample s;
        const Vec x = clamp(p.head(n_));
        const Mat g = sys_.full_gradient(x, cosphere_point(sys_, x, p[n_]));
        const Mat j = g.rightCols(n_);
        s.rank = numerical_rank(j);
        s.fiber_det = j.determinant();
        s.scale = std::pow(std::max(g.norm(), 1e-300), n_);
        s.minors.reserve(minor_cols_.size());
        Mat sub(n_, n_);
        for (const auto& cols : minor_cols_) {
            for (int k = 0; k < n_; ++k) sub.col(k) = g.col(cols[k]);
            s.minors.push_back(sub.determinant());
        }
        return s;
    }

    // A quantity is certified on the cell when it keeps one strict sign at every sample.
    static bool certified(const std::vector<double>& v, double tiny) {
        const bool pos = v[0] > tiny;
        const bool neg = v[0] < -tiny;
        if (!pos && !neg) return false;
        for (double x : v)
            if (pos ? !(x > tiny) : !(x < -tiny)) return false;
        return true;
    }

    void visit(const Vec& lo, const Vec& hi, int level, double volume, int& min_rank, bool& nondeg,
               double& degenerate_volume) const {
        const int d = n_ + 1;
        std::vector<Sample> samples;
        samples.reserve((1u << d) + 1);
        Vec p(d);
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            for (int k = 0; k < d; ++k) p[k] = (mask >> k & 1u) ? hi[k] : lo[k];
            samples.push_back(sample(p));
        }
        samples.push_back(sample(0.5 * (lo + hi)));

        double scale = 0.0;
        int rank = n_;
        std::vector<double> dets;
        for (const auto& s : samples) {
            scale = std::max(scale, s.scale);
            rank = std::min(rank, s.rank);
            dets.push_back(s.fiber_det);
        }
        const double tiny = 1e-10 * scale;
        const bool rank_ok = rank == n_ && certified(dets, tiny);
        bool nondeg_ok = false;
        for (std::size_t m = 0; m < minor_cols_.size() && !nondeg_ok; ++m) {
            std::vector<double> v;
            for (const auto& s : samples) v.push_back(s.minors[m]);
            nondeg_ok = certified(v, tiny);
        }
        if (rank_ok && nondeg_ok) return;
        if (level < refine_) {
            const Vec mid = 0.5 * (lo + hi);
            Vec sl(d), sh(d);
            for (unsigned mask = 0; mask < (1u << d); ++mask) {
                for (int k = 0; k < d; ++k) {
                    const bool upper = mask >> k & 1u;
                    sl[k] = upper ? mid[k] : lo[k];
                    sh[k] = upper ? hi[k] : mid[k];
                }
                visit(sl, sh, level + 1, volume / (1u << d), min_rank, nondeg, degenerate_volume);
            }
            return;
        }
        if (!rank_ok) min_rank = std::min(min_rank, std::min(rank, n_ - 1));
        if (!nondeg_ok) {
            nondeg = false;
            degenerate_volume += volume;
        }
    }

    const ModelSystem& sys_;
    int n_;
    int refine_;
    std::vector<std::vector<int>> minor_cols_;
    double clamp_lo_ = 0.0, clamp_hi_ = 0.0;
};

bool interval_contains(double lo, double hi, double v) { return lo <= v && v <= hi; }

}  // namespace

int numerical_rank(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0;
    const double thr = kRankTol * std::max(s[0], 1e-12);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > thr) ++r;
    return r;
}

int fiber_rank(const ModelSystem& system, const Vec& x, const Vec& xi) {
    if (xi.size() == 0 || xi.norm() == 0.0) throw DomainError("fiber rank needs xi != 0");
    return numerical_rank(system.fiber_jacobian(x, xi));
}

Vec cosphere_point(const ModelSystem& system, const Vec& x, double phi) {
    Vec xi = Vec::Zero(system.dim());
    xi[0] = std::cos(phi);
    xi[1] = std::sin(phi);
    if (is_sor(system)) xi[1] *= system.volume_density(x);
    return xi;
}

ScanGrid default_scan_grid(const ModelSystem& system, int cells, int phi_cells) {
    const int n = system.dim();
    ScanGrid g;
    g.lower = Vec::Zero(n);
    g.upper = Vec::Constant(n, 2.0 * pi);
    g.cells.assign(n, 1);
    g.cells[0] = cells;
    g.phi_cells = phi_cells;
    switch (system.kind()) {
        case ModelKind::FlatTorus:
            break;
        case ModelKind::SurfaceOfRevolution:
            g.upper[0] = system.profile().length();
            break;
        case ModelKind::LiouvilleTorus:
            g.upper = Vec::Ones(n);
            g.cells.assign(n, std::max(1, cells / 2));
            break;
    }
    return g;
}

std::vector<bool> RankScanReport::full_rank_mask() const {
    std::vector<bool> m;
    for (const auto& c : cells) m.push_back(c.rank == dim);
    return m;
}

std::vector<bool> RankScanReport::nondegenerate_mask() const {
    std::vector<bool> m;
    for (const auto& c : cells) m.push_back(c.nondegenerate);
    return m;
}

std::size_t RankScanReport::degenerate_count() const {
    return std::count_if(cells.begin(), cells.end(), [](const ScanCell& c) { return !c.nondegenerate; });
}

std::size_t RankScanReport::rank_drop_count() const {
    return std::count_if(cells.begin(), cells.end(), [&](const ScanCell& c) { return c.rank < dim; });
}

std::vector<std::pair<double, double>> RankScanReport::degenerate_sigma_bands() const {
    std::vector<std::pair<double, double>> iv;
    for (const auto& c : cells)
        if (!c.nondegenerate) iv.emplace_back(c.lower[0], c.upper[0]);
    std::sort(iv.begin(), iv.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& v : iv) {
        if (!out.empty() && v.first <= out.back().second) out.back().second = std::max(out.back().second, v.second);
        else out.push_back(v);
    }
    return out;
}

void RankScanReport::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write scan table '" + path + "'");
    out.precision(12);
    for (int k = 0; k < dim; ++k) out << "x" << k + 1 << "_lo,x" << k + 1 << "_hi,";
    out << "phi_lo,phi_hi,rank,nondegenerate,min_singular_value,degenerate_fraction,"
           "sigma_zero,pole,critical_meridian\n";
    for (const auto& c : cells) {
        for (int k = 0; k < dim; ++k) out << c.lower[k] << "," << c.upper[k] << ",";
        out << c.phi_lo << "," << c.phi_hi << "," << c.rank << "," << (c.nondegenerate ? 1 : 0) << ","
            << c.min_singular << "," << c.degenerate_fraction << "," << (c.meets_sigma_zero ? 1 : 0) << ","
            << (c.meets_pole ? 1 : 0) << "," << (c.meets_critical ? 1 : 0) << "\n";
    }
    if (!out) throw Error("failed writing scan table '" + path + "'");
}

RankScanReport scan_regions(const ModelSystem& system, const ScanGrid& grid) {
    const int n = system.dim();
    if (grid.lower.size() != n || grid.upper.size() != n || static_cast<int>(grid.cells.size()) != n)
        throw ConfigError("scan grid dimension does not match the model");
    if (grid.phi_cells < 1) throw ConfigError("scan grid needs at least one angle cell");
    RankScanReport rep;
    rep.grid = grid;
    rep.dim = n;
    if (is_sor(system)) rep.critical_meridians = critical_set_scan(system.profile());

    std::vector<int> counts(grid.cells);
    counts.push_back(grid.phi_cells);
    std::size_t total = 1;
    for (int c : counts) total *= static_cast<std::size_t>(std::max(c, 1));
    rep.cells.resize(total);

    CellScanner scanner(system, grid.refine);
    const double L = is_sor(system) ? system.profile().length() : 0.0;
    parallel_for(total, [&](std::size_t idx) {
        Vec lo(n + 1), hi(n + 1);
        std::size_t rest = idx;
        for (int k = n; k >= 0; --k) {
            const int c = counts[k];
            const int i = static_cast<int>(rest % c);
            rest /= c;
            const double a = k < n ? grid.lower[k] : -pi;
            const double b = k < n ? grid.upper[k] : pi;
            lo[k] = a + (b - a) * i / c;
            hi[k] = a + (b - a) * (i + 1) / c;
        }
        ScanCell& cell = rep.cells[idx];
        cell.lower = lo.head(n);
        cell.upper = hi.head(n);
        cell.phi_lo = lo[n];
        cell.phi_hi = hi[n];
        scanner.scan(lo, hi, cell);
        if (is_sor(system)) {
            cell.meets_sigma_zero = interval_contains(lo[n], hi[n], pi / 2) || interval_contains(lo[n], hi[n], -pi / 2);
            cell.meets_pole = lo[0] <= 0.0 || hi[0] >= L;
            for (double s : rep.critical_meridians)
                if (interval_contains(lo[0], hi[0], s)) cell.meets_critical = true;
        }
    });
    return rep;
}

std::vector<double> critical_set_scan(const ProfileMetric& profile, int samples) {
    const double L = profile.length();
    std::vector<double> roots;
    double prev_s = L / samples, prev = profile.a_prime(prev_s);
    for (int i = 2; i < samples; ++i) {
        const double s = L * i / samples;
        const double v = profile.a_prime(s);
        if (prev == 0.0) {
            roots.push_back(prev_s);
        } else if ((prev < 0.0) != (v < 0.0) && v != 0.0) {
            std::uintmax_t iters = 100;
            auto r = boost::math::tools::toms748_solve([&](double t) { return profile.a_prime(t); }, prev_s, s,
                                                       prev, v, boost::math::tools::eps_tolerance<double>(50), iters);
            roots.push_back(0.5 * (r.first + r.second));
        }
        prev_s = s;
        prev = v;
    }
    return roots;
}

bool moment_image_contains(const ModelSystem& system, const AdmissibleBand& band, const Vec& eta) {
    if (eta.size() != system.dim() || eta.norm() == 0.0) return false;
    switch (system.kind()) {
        case ModelKind::FlatTorus:
            if (band.axis.size() == 0) return true;
            return vector_angle(eta, band.axis) <= band.half_angle;
        case ModelKind::SurfaceOfRevolution: {
            if (!(eta[0] > 0.0)) return false;
            double bound = band.c_max;
            if (band.sigma_hi > band.sigma_lo) {
                const auto& prof = system.profile();
                double amax = 0.0;
                for (int i = 0; i <= 256; ++i) {
                    const double s = band.sigma_lo + (band.sigma_hi - band.sigma_lo) * i / 256.0;
                    if (s > 0.0 && s < prof.length()) amax = std::max(amax, prof.a(s));
                }
                if (interval_contains(band.sigma_lo, band.sigma_hi, prof.sigma_at_max())) amax = prof.a_max();
                bound = std::min(bound, amax);
            }
            return std::abs(eta[1]) <= bound * eta[0];
        }
        case ModelKind::LiouvilleTorus: {
            // p2^2 / p1^2 = (U2 xi1^2 + U1 xi2^2) / |xi|^2 ranges over [U2, U1]
            if (!(eta[0] > 0.0) || eta[1] < 0.0) return false;
            const auto& p = system.liouville();
            const double q = eta[1] * eta[1] / (eta[0] * eta[0]);
            return q >= p.u2_mean - std::abs(p.u2_amp) && q <= p.u1_mean + std::abs(p.u1_amp);
        }
    }
    return false;
}

FiberChart fiber_chart(const ModelSystem& system, const Vec& x) {
    if (system.dim() != 2) throw DomainError("polar fiber charts need n = 2");
    FiberChart c;
    switch (system.kind()) {
        case ModelKind::FlatTorus:
            c.ray = [](double phi) {
                Vec v(2);
                v << std::cos(phi), std::sin(phi);
                return v;
            };
            c.breaks = [](const std::vector<double>& b) { return b; };
            break;
        case ModelKind::SurfaceOfRevolution: {
            const double a = system.volume_density(x);
            c.jacobian = a;
            c.ray = [a](double phi) {
                Vec v(2);
                v << 1.0, a * std::sin(phi);
                return v;
            };
            c.breaks = [a](const std::vector<double>& b) {
                std::vector<double> out{pi / 2, -pi / 2};
                for (double psi : b) {
                    if (!(std::abs(psi) < pi / 2)) continue;
                    const double t = std::tan(psi);
                    if (std::abs(t) >= a) continue;
                    const double phi = std::asin(t / a);
                    out.push_back(phi);
                    out.push_back(std::remainder(pi - phi, 2 * pi));
                }
                return out;
            };
            break;
        }
        case ModelKind::LiouvilleTorus:
            c.ray = [system, x](double phi) {
                Vec xi(2);
                xi << std::cos(phi), std::sin(phi);
                return system.symbols(x, xi);
            };
            c.breaks = [](const std::vector<double>&) {
                return std::vector<double>{0.0, pi / 2, -pi / 2};
            };
            break;
    }
    return c;
}

namespace {

std::vector<double> eta_breaks(const SpectralRegion& region, const CutoffSymbol& weight) {
    auto b = region.direction_breaks();
    auto w = weight.direction_breaks();
    b.insert(b.end(), w.begin(), w.end());
    return b;
}

double fiber_volume_impl(const FiberChart& chart, const std::vector<double>& ebreaks,
                         const SpectralRegion& region, const CutoffSymbol& weight, double rel_tol) {
    auto f = [&](double phi) {
        const Vec v = chart.ray(phi);
        const auto [r0, r1] = region.ray_interval(v);
        if (!(r1 > r0)) return 0.0;
        if (!std::isfinite(r1)) throw DomainError("liouville volume of an unbounded region");
        const double w = weight.weight(v);
        return w * w * 0.5 * (r1 * r1 - r0 * r0);
    };
    const auto br = chart.breaks(ebreaks);
    return chart.jacobian * quad::integrate(f, -pi, pi, rel_tol, br);
}

}  // namespace

double fiber_volume(const ModelSystem& system, const Vec& x, const SpectralRegion& region,
                    const CutoffSymbol& weight, double rel_tol) {
    return fiber_volume_impl(fiber_chart(system, x), eta_breaks(region, weight), region, weight, rel_tol);
}

double liouville_volume(const ModelSystem& system, const SpectralRegion& region, const CutoffSymbol& weight,
                        double rel_tol) {
    const int n = system.dim();
    if (region.dim() != n) throw DomainError("region dimension does not match the model");
    if (!std::isfinite(region.max_norm())) throw DomainError("liouville volume of an unbounded region");
    const double tau_n = std::pow(2.0 * pi, n);
    switch (system.kind()) {
        case ModelKind::FlatTorus: {
            const bool plain = weight.kind() == CutoffSymbol::Kind::None;
            if (plain && region.kind() != SpectralRegion::Kind::ConeSector)
                return tau_n * (region.upper() - region.lower()).prod();
            if (plain && region.is_ball()) {
                const double unit_ball = std::pow(pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
                return tau_n * unit_ball * std::pow(region.radius(), n);
            }
            if (n == 2) return tau_n * fiber_volume(system, Vec::Zero(2), region, weight, rel_tol);
            return liouville_volume_mc(system, region, weight, 4'000'000);
        }
        case ModelKind::SurfaceOfRevolution: {
            const auto& prof = system.profile();
            const double L = prof.length();
            const auto eb = eta_breaks(region, weight);
            // sigma where a crosses the slope of an eta-direction break
            std::vector<double> sb{prof.sigma_at_max()};
            const auto& as = prof.a_samples();
            const int gs = static_cast<int>(as.size()) - 1;
            for (double psi : eb) {
                if (!(std::abs(psi) < pi / 2)) continue;
                const double t = std::abs(std::tan(psi));
                for (int i = 0; i < gs; ++i) {
                    const double f0 = as[i] - t, f1 = as[i + 1] - t;
                    if ((f0 < 0.0) == (f1 < 0.0)) continue;
                    const double s0 = L * i / gs, s1 = L * (i + 1) / gs;
                    std::uintmax_t iters = 100;
                    auto r = boost::math::tools::toms748_solve([&](double s) { return prof.a(s) - t; }, s0, s1,
                                                               boost::math::tools::eps_tolerance<double>(50), iters);
                    sb.push_back(0.5 * (r.first + r.second));
                }
            }
            auto outer = [&](double sigma) {
                Vec x(2);
                x << sigma, 0.0;
                return fiber_volume_impl(fiber_chart(system, x), eb, region, weight, rel_tol * 0.1);
            };
            return 2.0 * pi * quad::integrate(outer, 0.0, L, rel_tol, sb, 12);
        }
        case ModelKind::LiouvilleTorus: {
            // periodic in x: the trapezoid rule converges geometrically
            constexpr int m = 48;
            std::vector<double> vals(m * m);
            parallel_for(vals.size(), [&](std::size_t k) {
                Vec x(2);
                x << (static_cast<double>(k % m) + 0.5) / m, (static_cast<double>(k / m) + 0.5) / m;
                vals[k] = fiber_volume(system, x, region, weight, rel_tol);
            });
            double s = 0.0;
            for (double v : vals) s += v;
            return s / (m * m);
        }
    }
    return 0.0;
}

double liouville_volume_mc(const ModelSystem& system, const SpectralRegion& region, const CutoffSymbol& weight,
                           std::size_t samples, unsigned seed) {
    const int n = system.dim();
    const double R = region.max_norm();
    if (!std::isfinite(R)) throw DomainError("liouville volume of an unbounded region");
    Vec xlo = Vec::Zero(n), xhi = Vec::Constant(n, 2.0 * pi);
    Vec klo = region.lower(), khi = region.upper();
    switch (system.kind()) {
        case ModelKind::FlatTorus:
            break;
        case ModelKind::SurfaceOfRevolution: {
            const double amax = system.profile().a_max();
            xhi[0] = system.profile().length();
            klo[0] = -R;
            khi[0] = R;
            klo[1] = std::max(klo[1], -amax * R);
            khi[1] = std::min(khi[1], amax * R);
            break;
        }
        case ModelKind::LiouvilleTorus: {
            const auto& p = system.liouville();
            const double dmax = p.u1_mean + std::abs(p.u1_amp) - p.u2_mean + std::abs(p.u2_amp);
            xhi = Vec::Ones(n);
            klo = Vec::Constant(n, -R * std::sqrt(dmax));
            khi = -klo;
            break;
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec x(n), xi(n);
    double acc = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (int k = 0; k < n; ++k) x[k] = xlo[k] + (xhi[k] - xlo[k]) * u(rng);
        for (int k = 0; k < n; ++k) xi[k] = klo[k] + (khi[k] - klo[k]) * u(rng);
        if (system.kind() == ModelKind::SurfaceOfRevolution && !(x[0] > 0.0)) continue;
        if (xi.norm() == 0.0) continue;
        const Vec eta = system.symbols(x, xi);
        if (!region.contains(eta)) continue;
        const double w = weight.weight(eta);
        acc += w * w;
    }
    return (xhi - xlo).prod() * (khi - klo).prod() * acc / static_cast<double>(samples);
}

}  // namespace qci
