#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "qci/error.hpp"
#include "qci/kernels.hpp"
#include "qci/mollifier.hpp"
#include "qci/spectrum.hpp"
#include "support.hpp"

using namespace qci;
using qci::test::uniform;
using qci::test::v2;

namespace {

constexpr double pi = std::numbers::pi;

// sum_{|k| <= K} e^{ikd} / (2 pi), summed term by term
double dirichlet_direct(int K, double d) {
    double s = 1.0;
    for (int k = 1; k <= K; ++k) s += 2.0 * std::cos(k * d);
    return s / (2 * pi);
}

const JointSpectrum& sphere_spec() {
    static const JointSpectrum s = [] {
        SorSpectrumOptions o;
        o.keep_samples = true;
        return build_sor_spectrum(builtin_profile("sphere", {}), 12.0, o);
    }();
    return s;
}

}  // namespace

TEST_CASE("torus box projector on the diagonal") {
    const auto region = SpectralRegion::box(2.0, v2(0.6, 0.8));
    const auto spec = enumerate_torus(2, region);
    const auto v = projector_kernel(spec, region, CutoffSymbol::none(), v2(1.0, 2.0), v2(1.0, 2.0));
    CHECK(v.real() == doctest::Approx(9.0 / (4 * pi * pi)).epsilon(1e-14));
    CHECK(v.imag() == 0.0);
}

TEST_CASE("one-dimensional Dirichlet kernel") {
    Vec c(1);
    c << 1.0;
    for (int K : {0, 3, 17, 60}) {
        const auto region = SpectralRegion::box(K + 0.5, c);
        const auto spec = enumerate_torus(1, region);
        for (double d : {0.1, 1.0, 2.9, 5.5}) {
            Vec x(1), y(1);
            x << 0.3 + d;
            y << 0.3;
            const double closed = std::sin((K + 0.5) * d) / (2 * pi * std::sin(d / 2));
            CHECK(std::abs(dirichlet_direct(K, d) - closed) <= 1e-12);
            CHECK(std::abs(projector_kernel(spec, region, CutoffSymbol::none(), x, y) - closed) <= 1e-12);
        }
    }
}

TEST_CASE("torus projector equals the product of Dirichlet kernels") {
    const Vec c = v2(0.6, 0.8);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double lam = uniform(3.0, 60.0) + 1e-3;
        const auto region = SpectralRegion::box(lam, c);
        const auto spec = enumerate_torus(2, region);
        const Vec x = v2(uniform(0, 2 * pi), uniform(0, 2 * pi)), y = v2(uniform(0, 2 * pi), uniform(0, 2 * pi));
        const int K1 = static_cast<int>(std::floor(0.6 * lam)), K2 = static_cast<int>(std::floor(0.8 * lam));
        const double oracle = dirichlet_direct(K1, x[0] - y[0]) * dirichlet_direct(K2, x[1] - y[1]);
        worst = std::max(worst, std::abs(projector_kernel(spec, region, CutoffSymbol::none(), x, y) - oracle));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("sphere projector below lambda = 5 follows the addition theorem") {
    const auto& spec = sphere_spec();
    Vec lo = v2(-5.0, -5.5), hi = v2(5.0, 5.5);
    const auto region = SpectralRegion::window(lo, hi);
    for (double sigma : {0.4, 1.0, 1.55, 2.7}) {
        const Vec x = v2(sigma, 1.1);
        const auto v = projector_kernel(spec, region, CutoffSymbol::none(), x, x);
        CHECK(v.real() == doctest::Approx(25.0 / (4 * pi)).epsilon(1e-6));
    }
}

TEST_CASE("incomplete spectra are refused") {
    const auto spec = build_sor_spectrum(builtin_profile("sphere", {}), 5.0);
    const auto region = SpectralRegion::box(20.0, v2(0.8, 0.6));
    CHECK_THROWS_AS(projector_kernel(spec, region, CutoffSymbol::none(), v2(1, 0), v2(1, 0)), IncompleteSpectrumError);
}

TEST_CASE("unit-box projectors") {
    const auto torus = enumerate_torus_window(2, v2(-30, -30), v2(30, 30));
    for (int trial = 0; trial < 100; ++trial) {
        const Vec mu = v2(std::round(uniform(-25, 24)) + (trial % 3 == 0 ? 0.0 : uniform(0, 1)),
                          std::round(uniform(-25, 24)) + (trial % 4 == 0 ? 0.0 : uniform(0, 1)));
        int count = 0;
        for (int i = -30; i <= 30; ++i)
            for (int j = -30; j <= 30; ++j) count += i >= mu[0] && i <= mu[0] + 1 && j >= mu[1] && j <= mu[1] + 1;
        const double v = unit_box_diag(torus, mu, CutoffSymbol::none(), v2(uniform(0, 6), uniform(0, 6)));
        CHECK(v == doctest::Approx(count / (4 * pi * pi)).epsilon(1e-13));
        CHECK(v >= 0.0);
    }
    const auto& sphere = sphere_spec();
    const auto cut = CutoffSymbol::sor_ratio(0.0, 0.5, 0.1);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec mu = v2(uniform(0, 10), uniform(-5, 4));
        CHECK(unit_box_diag(sphere, mu, cut, v2(uniform(0.3, 2.8), uniform(0, 6))) >= 0.0);
    }
    // far outside the cutoff cone
    CHECK(std::abs(unit_box_diag(sphere, v2(6.0, -6.0), cut, v2(1.2, 0.0))) <= 1e-10);
}

TEST_CASE("kernels are Hermitian and nonnegative on the diagonal") {
    const auto& spec = sphere_spec();
    const auto cut = CutoffSymbol::sor_ratio(0.0, 0.5, 0.1);
    const auto mol = make_mollifier(3.0);
    const auto fej = make_fejer(3.0);
    const auto box = SpectralRegion::box(10.0 + 1e-4, v2(0.8, 0.6));
    for (int trial = 0; trial < 20; ++trial) {
        const Vec x = v2(uniform(0.5, 2.6), uniform(0, 6)), y = v2(uniform(0.5, 2.6), uniform(0, 6));
        const Vec mu = v2(uniform(0, 6), uniform(-2, 2));
        auto herm = [](std::complex<double> a, std::complex<double> b) { return std::abs(a - std::conj(b)); };
        CHECK(herm(projector_kernel(spec, box, cut, x, y), projector_kernel(spec, box, cut, y, x)) <= 1e-12);
        CHECK(herm(smoothed_measure_kernel(spec, mu, mol, cut, x, y).value,
                   smoothed_measure_kernel(spec, mu, mol, cut, y, x).value) <= 1e-12);
        CHECK(herm(smoothed_projector_kernel(spec, 4.0, v2(0.8, 0.6), mol, cut, x, y).value,
                   smoothed_projector_kernel(spec, 4.0, v2(0.8, 0.6), mol, cut, y, x).value) <= 1e-12);
        CHECK(tauberian_gap(spec, 4.0, v2(0.8, 0.6), mol, cut, x, y).gap ==
              doctest::Approx(tauberian_gap(spec, 4.0, v2(0.8, 0.6), mol, cut, y, x).gap).epsilon(1e-12));
        const auto d = projector_kernel(spec, box, cut, x, x);
        CHECK(d.real() >= -1e-12);
        CHECK(d.imag() == 0.0);
        CHECK(smoothed_measure_kernel(spec, mu, fej, cut, x, x).value.real() >= -1e-12);
    }
}

TEST_CASE("enlarging the region never lowers the diagonal") {
    const auto& spec = sphere_spec();
    const auto cut = CutoffSymbol::sor_ratio(0.0, 0.5, 0.1);
    const Vec x = v2(1.3, 0.2);
    double prev = 0.0;
    for (double lam = 1.0; lam < 12.0; lam += 0.731) {
        const double v = projector_kernel(spec, SpectralRegion::box(lam, v2(0.8, 0.6)), cut, x, x).real();
        CHECK(v >= prev - 1e-14);
        prev = v;
    }
}

TEST_CASE("smoothed measure on the torus is exactly 1/(2 pi)^2") {
    // Poisson summation: sum_k rho(k - mu) = rho_hat(0) when supp rho_hat lies inside (-2 pi, 2 pi)
    const auto mol = make_mollifier(0.75);
    const double r = mol.support_radius(1e-13);
    for (const Vec& mu : {v2(0.0, 0.0), v2(13.3, -7.9), v2(60.0, 80.0)}) {
        const auto spec = enumerate_torus_window(2, (mu.array() - r).floor().matrix(), (mu.array() + r).ceil().matrix());
        const auto k = smoothed_measure_kernel(spec, mu, mol, CutoffSymbol::none(), v2(1, 2), v2(1, 2));
        CHECK(k.value.real() == doctest::Approx(1 / (4 * pi * pi)).epsilon(1e-10));
        CHECK(k.truncation_bound <= 1e-10);
        const auto k2 = smoothed_measure_kernel(spec, mu, mol.scaled(2.0), CutoffSymbol::none(), v2(1, 2), v2(1, 2));
        CHECK(k2.value.real() == doctest::Approx(4.0 * k.value.real()).epsilon(1e-13));
    }
}

TEST_CASE("smoothed measure decays away from the cutoff cone") {
    const auto mol = make_mollifier(3.0);
    const auto cut = CutoffSymbol::torus_cone(v2(0.6, 0.8), 0.4, 0.1);
    const double C8 = mol.tail()[2].C;
    std::vector<double> certs;
    for (double R : {5.0, 10.0, 20.0, 40.0}) {
        const Vec mu = -R * v2(0.6, 0.8);
        const double r = 300.0;
        const auto spec = enumerate_torus_window(2, (mu.array() - r).floor().matrix(), (mu.array() + r).ceil().matrix());
        const auto k = smoothed_measure_kernel(spec, mu, mol, cut, v2(1, 2), v2(1, 2));
        // certificate: sum of w^2 C8^2 prod (1 + |lam_k - mu_k|)^-8 / (2 pi)^2
        double cert = 0.0;
        for (std::size_t j = 0; j < spec.size(); ++j) {
            const double w = cut.weight(spec.lam_vec(j));
            if (w == 0.0) continue;
            cert += w * w * C8 * C8 * std::pow((1 + std::abs(spec.lam[0][j] - mu[0])) * (1 + std::abs(spec.lam[1][j] - mu[1])), -8);
        }
        cert /= 4 * pi * pi;
        CHECK(std::abs(k.value) <= cert + k.truncation_bound);
        certs.push_back(cert);
    }
    // the certificate itself falls off at least like R^-8 between dyadic steps
    for (std::size_t i = 0; i + 1 < certs.size(); ++i) CHECK(certs[i + 1] <= certs[i] * std::pow(2.0, -6));
}

TEST_CASE("smoothed projector windows and the Tauberian majorant") {
    const double lam = 30.0 + 1e-3;
    const Vec c = v2(0.6, 0.8);
    const auto mol = make_mollifier(0.75);
    const double r = 500.0;
    const auto spec = enumerate_torus_window(2, v2(-18 - r, -24 - r), v2(18 + r, 24 + r));
    const auto t = tauberian_gap(spec, lam, c, mol, CutoffSymbol::none(), v2(1, 2), v2(1, 2), 100);
    REQUIRE(t.top_terms.size() == 100);
    for (const auto& term : t.top_terms) {
        CHECK(std::abs(term.h) <= term.majorant * (1 + 1e-9) + 1e-15);
        // weight of an eigenvalue deep inside the box is close to one
        const double inside = std::min(18.0 - std::abs(term.lam[0]), 24.0 - std::abs(term.lam[1]));
        if (inside > 10.0) CHECK(std::abs(term.h) <= 2 * mol.window_defect_bound(inside));
    }
    const auto rough = projector_kernel(spec, SpectralRegion::box(lam, c), CutoffSymbol::none(), v2(1, 2), v2(1, 2));
    CHECK(std::abs(t.rough - rough) <= 1e-12);
    CHECK(t.gap == doctest::Approx(std::abs(t.rough - t.smooth)));
}

TEST_CASE("covering bound dominates the unit box") {
    const auto fej = make_fejer(0.75);
    const double r = 300.0;
    for (const Vec& mu : {v2(3.0, 4.0), v2(17.2, 22.9)}) {
        const auto spec = enumerate_torus_window(2, (mu.array() - r).floor().matrix(), (mu.array() + r).ceil().matrix());
        const double v = unit_box_diag(spec, mu, CutoffSymbol::none(), v2(0.5, 0.5));
        const auto cb = unit_box_cover_bound(spec, mu, fej, CutoffSymbol::none(), v2(0.5, 0.5));
        CHECK(v <= cb.bound + cb.truncation_bound);
        CHECK(cb.per_axis == 1);
    }
    const auto& sphere = sphere_spec();
    const auto fs = make_fejer(3.0);
    const auto cut = CutoffSymbol::sor_ratio(0.0, 0.5, 0.1);
    const double v = unit_box_diag(sphere, v2(4.0, 0.5), cut, v2(1.2, 0.0));
    const auto cb = unit_box_cover_bound(sphere, v2(4.0, 0.5), fs, cut, v2(1.2, 0.0));
    CHECK(v <= cb.bound + cb.truncation_bound);
}
