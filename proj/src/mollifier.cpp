#include "qci/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/interpolators/quintic_hermite.hpp>
#include <boost/math/tools/roots.hpp>

#include "qci/cutoff.hpp"
#include "qci/error.hpp"
#include "qci/quadrature.hpp"
#include "qci/simd.hpp"

namespace qci {

double plateau_symbol(double t) {
    const double a = std::abs(t);
    if (a <= 0.5) return 1.0;
    if (a >= 1.0) return 0.0;
    return smoothstep_exp((1.0 - a) / 0.5);
}

namespace detail {

// rho_1, its derivatives and antiderivative on u = i * du, 0 <= u <= u_max, by the trapezoid
// rule on K + 1 nodes of [0, 1] (spectrally accurate: the symbol is flat at both ends).
// du = 2 pi K / P makes every phase u_i t_j = 2 pi (i j mod P) / P, so the cosines come from
// one exact table.
struct MasterTable {
    static constexpr int K = 512;
    static constexpr std::int64_t P = 160850;
    static constexpr double u_max = 900.0;

    double du = 0.0;
    std::vector<double> rho, drho, d2rho, anti;
    std::vector<double> env;   // suffix sup of |rho|
    std::vector<double> mass;  // int_{u_i}^inf |rho|
    using Interp = boost::math::interpolators::cardinal_quintic_hermite<std::vector<double>>;
    std::unique_ptr<Interp> rho_i, anti_i;

    MasterTable() {
        du = 2.0 * std::numbers::pi * K / static_cast<double>(P);
        const int m = static_cast<int>(std::ceil(u_max / du)) + 1;
        std::vector<double> c(P), s(P);
        for (std::int64_t k = 0; k < P; ++k) {
            const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(P);
            c[k] = std::cos(ang);
            s[k] = std::sin(ang);
        }
        // node weights (trapezoid on [0, 1], doubled by evenness, over 2 pi)
        std::vector<double> w0(K + 1), w1(K + 1), w2(K + 1), wa(K + 1);
        for (int j = 0; j <= K; ++j) {
            const double t = static_cast<double>(j) / K;
            const double h = (j == 0 || j == K) ? 0.5 / K : 1.0 / K;
            const double f = plateau_symbol(t) * h / std::numbers::pi;
            w0[j] = f;
            w1[j] = -f * t;
            w2[j] = -f * t * t;
            wa[j] = j == 0 ? 0.0 : f / t;
        }
        rho.resize(m);
        drho.resize(m);
        d2rho.resize(m);
        anti.resize(m);
        std::vector<double> cb(K + 1), sb(K + 1);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j <= K; ++j) {
                const std::int64_t k = (static_cast<std::int64_t>(i) * j) % P;
                cb[j] = c[k];
                sb[j] = s[k];
            }
            const double u = i * du;
            rho[i] = simd::dot2(w0, cb);
            drho[i] = simd::dot2(w1, sb);
            d2rho[i] = simd::dot2(w2, cb);
            anti[i] = 0.5 + w0[0] * u + simd::dot2(wa, sb);
        }
        env.resize(m);
        double run = 0.0;
        for (int i = m - 1; i >= 0; --i) {
            run = std::max(run, std::abs(rho[i]));
            env[i] = run;
        }
        mass.assign(m, 0.0);
        for (int i = m - 2; i >= 0; --i)
            mass[i] = mass[i + 1] + 0.5 * du * (std::abs(rho[i]) + std::abs(rho[i + 1]));
        rho_i = std::make_unique<Interp>(std::vector<double>(rho), std::vector<double>(drho),
                                         std::vector<double>(d2rho), 0.0, du);
        anti_i = std::make_unique<Interp>(std::vector<double>(anti), std::vector<double>(rho),
                                          std::vector<double>(drho), 0.0, du);
    }

    double last() const { return du * static_cast<double>(rho.size() - 1); }

    double rho1(double u) const {
        u = std::abs(u);
        return u >= last() ? 0.0 : (*rho_i)(u);
    }
    double anti1(double u) const {
        const double a = std::abs(u);
        const double v = a >= last() ? 1.0 : (*anti_i)(a);
        return u >= 0.0 ? v : 1.0 - v;
    }
};

}  // namespace detail

namespace {

std::shared_ptr<const detail::MasterTable> master() {
    static std::shared_ptr<const detail::MasterTable> table;
    static std::once_flag once;
    std::call_once(once, [] { table = std::make_shared<const detail::MasterTable>(); });
    return table;
}

std::vector<TailConstant> measure_tail(const Mollifier& m, double range) {
    std::vector<TailConstant> out;
    const int samples = 200000;
    for (int N : {2, 4, 8}) {
        double c = 0.0;
        for (int i = 0; i <= samples; ++i) {
            const double s = range * i / samples;
            c = std::max(c, std::abs(m.rho(s)) * std::pow(1.0 + s, N));
        }
        // headroom for values between samples
        out.push_back({N, 1.01 * c});
    }
    return out;
}

}  // namespace

Mollifier make_mollifier(double delta0) {
    if (!(delta0 > 0.0)) throw ConfigError("mollifier delta0 must be positive");
    Mollifier m;
    m.kind_ = Mollifier::Kind::Plateau;
    m.delta_ = delta0;
    m.table_ = master();
    m.scale_ = delta0;
    m.tail_range_ = 200.0 / delta0;
    m.tail_ = measure_tail(m, m.tail_range_);
    return m;
}

Mollifier make_fejer(double delta) {
    if (!(delta > 0.0)) throw ConfigError("Fejer delta must be positive");
    Mollifier m;
    m.kind_ = Mollifier::Kind::Fejer;
    m.delta_ = delta;
    m.table_ = master();
    m.scale_ = 0.5 * delta;
    const double r0 = m.table_->rho1(0.0);
    m.norm_ = 1.0 / (r0 * r0);
    m.tail_range_ = 200.0 / delta;
    m.tail_ = measure_tail(m, m.tail_range_);
    return m;
}

Mollifier Mollifier::scaled(double factor) const {
    Mollifier m = *this;
    m.amplitude_ *= factor;
    for (auto& t : m.tail_) t.C *= std::abs(factor);
    return m;
}

double Mollifier::rho(double s) const {
    const double v = table_->rho1(scale_ * s);
    if (kind_ == Kind::Fejer) return amplitude_ * norm_ * v * v;
    return amplitude_ * delta_ * v;
}

double Mollifier::rho_hat(double t) const {
    if (kind_ == Kind::Plateau) return amplitude_ * plateau_symbol(t / delta_);
    // beta_hat = (gamma_hat * gamma_hat) / (2 pi rho_1(0)^2) with gamma_hat(t) = rho_hat_1(t / scale) / scale
    const double h = 0.5 * delta_;
    const double lo = std::max(-h, t - h), hi = std::min(h, t + h);
    if (!(hi > lo)) return 0.0;
    auto f = [&](double u) { return plateau_symbol(u / h) * plateau_symbol((t - u) / h); };
    const double conv = quad::integrate(f, lo, hi, 1e-12) / (h * h);
    return amplitude_ * norm_ * conv / (2.0 * std::numbers::pi);
}

double Mollifier::antiderivative(double s) const {
    if (kind_ != Kind::Plateau) throw DomainError("antiderivative is only tabulated for plateau mollifiers");
    return amplitude_ * table_->anti1(scale_ * s);
}

double Mollifier::window(double tau, double half_width) const {
    if (kind_ != Kind::Plateau) throw DomainError("window is only tabulated for plateau mollifiers");
    const double a = scale_ * (tau - half_width), b = scale_ * (tau + half_width);
    // subtract on the side where the antiderivative is small to keep precision
    if (a >= 0.0) return amplitude_ * ((1.0 - table_->anti1(a)) - (1.0 - table_->anti1(b)));
    if (b <= 0.0) return amplitude_ * (table_->anti1(b) - table_->anti1(a));
    return amplitude_ * (1.0 - table_->anti1(a) - (1.0 - table_->anti1(b)));
}

double Mollifier::tail_bound(double d) const {
    d = std::abs(d);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : tail_) best = std::min(best, t.C * std::pow(1.0 + d, -t.N));
    return best;
}

double Mollifier::envelope_raw(double u) const {
    const auto& env = table_->env;
    const double x = std::abs(u) / table_->du;
    const std::size_t i = static_cast<std::size_t>(std::floor(x));
    if (i >= env.size()) return 0.0;
    return env[i];
}

double Mollifier::envelope(double d) const {
    d = std::abs(d);
    const double u = scale_ * d;
    if (u >= table_->last() || d > tail_range_) return tail_bound(d);
    const double e = envelope_raw(u);
    if (kind_ == Kind::Fejer) return std::abs(amplitude_) * norm_ * e * e;
    return std::abs(amplitude_) * delta_ * e;
}

double Mollifier::tail_mass(double d) const {
    d = std::abs(d);
    if (kind_ != Kind::Plateau) throw DomainError("tail mass is only tabulated for plateau mollifiers");
    const double u = scale_ * d;
    const std::size_t i = static_cast<std::size_t>(std::floor(u / table_->du));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : tail_) best = std::min(best, t.C * std::pow(1.0 + d, 1 - t.N) / (t.N - 1));
    if (i < table_->mass.size()) best = std::min(best, std::abs(amplitude_) * table_->mass[i]);
    return best;
}

double Mollifier::l1_norm() const { return 2.0 * tail_mass(0.0); }

double Mollifier::window_defect_bound(double d) const { return 2.0 * tail_mass(d); }

double Mollifier::support_radius(double eps) const {
    const double target = eps * std::abs(rho(0.0));
    double lo = 0.0, hi = 1.0;
    while (envelope(hi) > target) hi *= 2.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (envelope(mid) > target ? lo : hi) = mid;
    }
    return hi;
}

double Mollifier::cover_radius(int n) const {
    if (kind_ != Kind::Fejer) throw DomainError("cover radius needs a Fejer mollifier");
    const double level = std::pow(0.5, 1.0 / n) * amplitude_;
    // beta decreases from 1 on [0, first zero of rho_1]; bracket the crossing
    double hi = 0.1 / scale_;
    while (rho(hi) > level) hi *= 1.5;
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve([&](double s) { return rho(s) - level; }, 0.0, hi,
                                               boost::math::tools::eps_tolerance<double>(52), iters);
    return r.first;
}

std::string Mollifier::describe() const {
    std::ostringstream os;
    os.precision(10);
    os << (kind_ == Kind::Plateau ? "plateau" : "fejer") << "(delta=" << delta_;
    if (amplitude_ != 1.0) os << ", amplitude=" << amplitude_;
    os << ", tail=[";
    for (std::size_t i = 0; i < tail_.size(); ++i)
        os << (i ? ", " : "") << "C" << tail_[i].N << "=" << tail_[i].C;
    os << "])";
    return os.str();
}

}  // namespace qci
