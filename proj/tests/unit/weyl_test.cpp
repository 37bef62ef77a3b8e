#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qci/config.hpp"
#include "qci/error.hpp"
#include "qci/fit.hpp"
#include "qci/geometry.hpp"
#include "qci/kernels.hpp"
#include "qci/spectrum.hpp"
#include "qci/weyl.hpp"
#include "support.hpp"

using namespace qci;
using qci::test::uniform;
using qci::test::v2;

namespace {

constexpr double pi = std::numbers::pi;

ModelSystem sphere() { return make_surface_of_revolution(builtin_profile("sphere", {})); }

// composite Simpson on [0, 2 pi] of chi(sin phi)^2
double polar_angle_integral(const CutoffSymbol& cut) {
    const int n = 200000;
    const double h = 2 * pi / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = std::pow(cut.ratio_weight(std::sin(i * h)), 2);
        s += w * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
    }
    return s * h / 3;
}

}  // namespace

TEST_CASE("torus diagonal leading term is the box area over (2 pi)^2") {
    const auto t = make_torus(2);
    for (double lam : {3.0, 25.0, 400.0})
        CHECK(leading_term_diagonal(t, CutoffSymbol::none(), lam, v2(0.6, 0.8), v2(1, 2)) ==
              doctest::Approx(4 * 0.6 * 0.8 * lam * lam / (4 * pi * pi)).epsilon(1e-10));
}

TEST_CASE("sphere equator: polar reduction oracle") {
    const auto s = sphere();
    const auto cut = CutoffSymbol::sor_ratio(0.0, 0.5, 0.1);
    const double angular = polar_angle_integral(cut);
    for (double lam : {10.0, 25.0, 200.0}) {
        const double oracle = lam * lam * 0.8 * 0.8 / 2 * angular / (4 * pi * pi);
        const double v = leading_term_diagonal(s, cut, lam, v2(0.8, 0.6), v2(pi / 2, 0.3));
        CHECK(std::abs(v - oracle) <= 1e-6 * oracle);
    }
}

TEST_CASE("diagonal leading term is homogeneous of degree two") {
    const auto s = make_surface_of_revolution(builtin_profile("bump", {0.2}));
    const auto cut = CutoffSymbol::sor_ratio(0.0, 0.5, 0.1);
    for (double sigma : {1.0, 1.3, 2.1}) {
        const double a = leading_term_diagonal(s, cut, 25.0, v2(0.8, 0.6), v2(sigma, 0.0));
        const double b = leading_term_diagonal(s, cut, 50.0, v2(0.8, 0.6), v2(sigma, 0.0));
        CHECK(b / a == doctest::Approx(4.0).epsilon(1e-6));
    }
}

TEST_CASE("torus off-diagonal terms are sine products") {
    const auto t = make_torus(2);
    for (int trial = 0; trial < 10; ++trial) {
        const double lam = uniform(20, 200);
        const Vec x = v2(uniform(0, 6), uniform(0, 6));
        const Vec y = x + v2(uniform(-1, 1), uniform(-1, 1)) * (0.4 / lam);
        const Vec c = v2(0.6, 0.8);
        double oracle = 1.0;
        for (int k = 0; k < 2; ++k) oracle *= 2 * std::sin(c[k] * lam * (x[k] - y[k])) / (2 * pi * (x[k] - y[k]));
        const auto full = leading_term_offdiag(t, CutoffSymbol::none(), lam, c, x, y, OffdiagMode::FullPhase);
        const auto lin = leading_term_offdiag(t, CutoffSymbol::none(), lam, c, x, y, OffdiagMode::Linearized);
        CHECK(std::abs(full - oracle) <= 1e-8);
        CHECK(std::abs(lin - full) <= 1e-8);
        CHECK(torus_sine_product(lam, c, x, y) == doctest::Approx(oracle).epsilon(1e-12));
    }
}

TEST_CASE("off-diagonal terms reduce to the diagonal at x = y") {
    const auto s = sphere();
    const auto cut = CutoffSymbol::sor_ratio(0.0, 0.5, 0.1);
    const Vec x = v2(1.4, 0.2);
    const double d = leading_term_diagonal(s, cut, 40.0, v2(0.8, 0.6), x);
    for (auto mode : {OffdiagMode::FullPhase, OffdiagMode::Linearized}) {
        const auto o = leading_term_offdiag(s, cut, 40.0, v2(0.8, 0.6), x, x, mode);
        CHECK(std::abs(o - d) <= 1e-8 * d);
    }
}

TEST_CASE("full and linearised phases agree to order lambda^(n-1) at distance 0.5/lambda") {
    const auto s = make_surface_of_revolution(builtin_profile("bump", {0.2}));
    const auto cut = CutoffSymbol::sor_ratio(0.0, 0.5, 0.1);
    std::vector<double> lams{25, 50, 100, 200}, diffs;
    const Vec x = v2(1.3, 0.4), dir = v2(0.6, 0.8);
    for (double lam : lams) {
        const Vec y = x + dir * (0.5 / lam);
        const auto f = leading_term_offdiag(s, cut, lam, v2(0.8, 0.6), x, y, OffdiagMode::FullPhase);
        const auto l = leading_term_offdiag(s, cut, lam, v2(0.8, 0.6), x, y, OffdiagMode::Linearized);
        diffs.push_back(std::abs(f - l));
    }
    CHECK(fit_exponent(lams, diffs).beta <= 1.2);
}

TEST_CASE("integrated predictions") {
    const auto t = make_torus(2);
    const double lam = 13.0;
    CHECK(integrated_prediction(t, SpectralRegion::box(lam, v2(0.6, 0.8))) ==
          doctest::Approx(4 * 0.6 * 0.8 * lam * lam).epsilon(1e-12));
    const double ball = integrated_prediction(t, SpectralRegion::ball(2, 10.0));
    CHECK(ball == doctest::Approx(100 * pi).epsilon(1e-12));
    const auto spec = enumerate_torus(2, SpectralRegion::ball(2, 10.0 * (1 + 1e-9)));
    CHECK(static_cast<double>(spec.size()) - ball == doctest::Approx(2.840734641).epsilon(1e-8));
    const auto s = sphere();
    const auto cut = CutoffSymbol::sor_ratio(0.0, 0.5, 0.1);
    const double a = integrated_prediction(s, SpectralRegion::box(10.0, v2(0.8, 0.6)), cut);
    const double b = integrated_prediction(s, SpectralRegion::box(20.0, v2(0.8, 0.6)), cut);
    CHECK(b / a == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("verify reproduces the module-level values") {
    auto cfg = parse_config(R"(schema: 1
target: pointwise_diag
system: {kind: torus, dim: 2}
c_bar: [0.6, 0.8]
lambda: [25.3, 50.3, 100.3, 200.3]
points: [[1.0, 2.0]]
)");
    const auto rep = verify(cfg);
    REQUIRE(rep.rows.size() == 4);
    CHECK(rep.used_lambdas == rep.lambdas);
    for (const auto& row : rep.rows) {
        const auto region = SpectralRegion::box(row.lambda, cfg.c_bar);
        const auto spec = enumerate_torus(2, region);
        CHECK(row.actual == projector_kernel(spec, region, CutoffSymbol::none(), v2(1, 2), v2(1, 2)));
        CHECK(row.predicted.real() == leading_term_diagonal(make_torus(2), CutoffSymbol::none(), region, v2(1, 2)));
        CHECK(row.remainder_abs == std::abs(row.actual - row.predicted));
    }
    CHECK(rep.pass);
}

TEST_CASE("torus trace identity: the integrated diagonal remainder is the counting remainder") {
    const auto t = make_torus(2);
    const Vec c = v2(0.6, 0.8);
    for (double lam : {25.3, 77.7}) {
        const auto region = SpectralRegion::box(lam, c);
        const auto spec = enumerate_torus(2, region);
        const double count_rem = projector_count(spec, region, CutoffSymbol::none()) - integrated_prediction(t, region);
        // the diagonal is translation invariant, so a 4 x 4 midpoint rule is exact
        double integral = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const Vec x = v2((i + 0.5) * pi / 2, (j + 0.5) * pi / 2);
                integral += (projector_kernel(spec, region, CutoffSymbol::none(), x, x).real() -
                             leading_term_diagonal(t, CutoffSymbol::none(), region, x)) *
                            (pi / 2) * (pi / 2);
            }
        CHECK(std::abs(integral - count_rem) <= 1e-9 * std::max(1.0, std::abs(count_rem)));
    }
}

TEST_CASE("verify errors") {
    auto liou = parse_config(R"(schema: 1
target: pointwise_diag
system: {kind: liouville_torus}
c_bar: [0.6, 0.8]
lambda: [25, 50, 100, 200]
)");
    CHECK_THROWS_AS(verify(liou), ConfigError);
    auto short_grid = parse_config(R"(schema: 1
target: pointwise_diag
system: {kind: torus, dim: 2}
c_bar: [0.6, 0.8]
lambda: [25.3, 50.3, 100.3]
)");
    CHECK_THROWS_AS(verify(short_grid), NumericError);
}
