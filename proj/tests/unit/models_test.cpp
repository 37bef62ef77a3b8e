#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qci/error.hpp"
#include "qci/geometry.hpp"
#include "qci/models.hpp"
#include "support.hpp"

using namespace qci;
using qci::test::uniform;
using qci::test::v2;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("torus symbols, phase and homogeneity") {
    const auto t = make_torus(2);
    const Vec x = v2(0.4, 5.0);
    CHECK(t.symbols(x, v2(3, -1)) == v2(3, -1));
    CHECK(t.symbols(x, v2(2, 2)) == 2.0 * t.symbols(x, v2(1, 1)));
    const auto gf = generating_function(t, 0.0);
    CHECK(gf.value(x, v2(2.0, -3.0)) == doctest::Approx(0.4 * 2.0 - 5.0 * 3.0));
    CHECK(gf.gradient(x, v2(2.0, -3.0)) == v2(2.0, -3.0));
    CHECK_THROWS_AS(make_torus(0), ConfigError);
    CHECK_THROWS_AS(make_torus(5), ConfigError);
    CHECK(make_torus(4).dim() == 4);
}

TEST_CASE("sphere symbols at the equator") {
    const auto s = make_surface_of_revolution(builtin_profile("sphere", {}));
    const Vec x = v2(pi / 2, 0.0);
    const Vec p = s.symbols(x, v2(0, 3));
    CHECK(p[0] == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(p[1] == 3.0);
    const Vec q = s.symbols(x, v2(4, 3));
    CHECK(q[0] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(s.volume_density(v2(1.0, 0.0)) == doctest::Approx(std::sin(1.0)));
}

TEST_CASE("symbols are homogeneous of degree one on every model") {
    const ModelSystem systems[] = {make_torus(2), make_torus(3),
                                   make_surface_of_revolution(builtin_profile("sphere", {})),
                                   make_surface_of_revolution(builtin_profile("bump", {0.2})),
                                   make_liouville_torus()};
    for (const auto& sys : systems) {
        const int n = sys.dim();
        for (int trial = 0; trial < 100; ++trial) {
            Vec x(n), xi(n);
            for (int k = 0; k < n; ++k) {
                x[k] = uniform(0.1, 0.9) * (sys.kind() == ModelKind::SurfaceOfRevolution && k == 0 ? pi : 1.0);
                xi[k] = uniform(-5, 5);
            }
            const double t = trial == 0 ? 7.0 : uniform(0.1, 10.0);
            const Vec a = sys.symbols(x, t * xi), b = t * sys.symbols(x, xi);
            const double tol = sys.kind() == ModelKind::FlatTorus ? 1e-10 : 1e-8;
            CHECK((a - b).norm() <= tol * b.norm());
        }
    }
}

TEST_CASE("built-in profiles") {
    const auto sphere = builtin_profile("sphere", {});
    CHECK(sphere.length() == doctest::Approx(pi));
    CHECK(sphere.a(pi / 2) == 1.0);
    CHECK(std::abs(sphere.a_prime(pi / 2)) < 1e-16);
    CHECK(sphere.a(0.0) == 0.0);
    CHECK(std::abs(sphere.a(sphere.length())) < 1e-15);
    CHECK(sphere.derivative_consistency() < 1.0);

    const auto ell = builtin_profile("ellipsoid", {1.0});
    double dev = 0.0;
    for (std::size_t i = 0; i < ell.a_samples().size(); ++i)
        dev = std::max(dev, std::abs(ell.a_samples()[i] - sphere.a_samples()[i]));
    CHECK(dev == 0.0);
    // aspect -> 1 converges pointwise
    double prev = 1.0;
    for (double eps : {0.1, 0.01, 0.001}) {
        const auto e = builtin_profile("ellipsoid", {1.0 + eps});
        double worst = 0.0;
        for (double u = 0.05; u < 1.0; u += 0.05) worst = std::max(worst, std::abs(e.a(u * e.length()) - sphere.a(u * pi)));
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 1e-2);

    const auto bump = builtin_profile("bump", {0.2});
    CHECK(bump.a(1.0) == doctest::Approx(std::sin(1.0) * (1 + 0.2 * std::pow(std::sin(1.0), 2))));
    CHECK(critical_set_scan(bump).size() == 1);
    CHECK_THROWS_AS(builtin_profile("torus", {}), ConfigError);
    CHECK_THROWS_AS(builtin_profile("bump", {0.7}), ConfigError);
}

TEST_CASE("tabulated profiles follow the sampled function") {
    std::vector<double> s, a;
    for (int i = 0; i <= 400; ++i) {
        s.push_back(pi * i / 400);
        a.push_back(std::sin(s.back()));
    }
    const auto p = tabulated_profile(s, a);
    CHECK(p.length() == doctest::Approx(pi));
    CHECK(p.a(1.234) == doctest::Approx(std::sin(1.234)).epsilon(1e-6));
    CHECK(p.a_prime(1.234) == doctest::Approx(std::cos(1.234)).epsilon(1e-4));
    a[200] = -0.1;
    CHECK_THROWS_AS(tabulated_profile(s, a), ConfigError);
}

TEST_CASE("generating function on the sphere") {
    const auto sys = make_surface_of_revolution(builtin_profile("sphere", {}));
    const auto gf = generating_function(sys, pi / 2);
    const Vec g = gf.gradient(v2(pi / 2, 0.0), v2(5, 3));
    CHECK(g[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(g[1] == 3.0);
    CHECK(sys.symbols(v2(pi / 2, 0.0), g)[0] == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(sys.symbols(v2(1.2, 0.0), gf.gradient(v2(1.2, 0.0), v2(2, 1)))[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK_THROWS_AS(gf.gradient(v2(0.3, 0.0), v2(1, 1)), OutOfBandError);
    // homogeneity and basepoint independence of differences
    const Vec x = v2(1.1, 0.4), y = v2(1.7, 2.0), eta = v2(3.0, 1.2);
    CHECK(gf.value(x, 2.5 * eta) == doctest::Approx(2.5 * gf.value(x, eta)).epsilon(1e-9));
    const auto other = generating_function(sys, 1.3);
    CHECK(other.difference(x, y, eta) == doctest::Approx(gf.difference(x, y, eta)).epsilon(1e-9));
}

TEST_CASE("defining property on a 20 x 20 sample of the band") {
    const auto sys = make_surface_of_revolution(builtin_profile("bump", {0.2}));
    const auto gf = generating_function(sys, 1.55);
    const double c_max = 0.5;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double sigma = 1.0 + 1.1 * i / 19.0;
        for (int j = 0; j < 20; ++j) {
            const double eta1 = 1.0 + 9.0 * j / 19.0;
            const double eta2 = c_max * eta1 * (2.0 * ((i * 7 + j * 3) % 20) / 19.0 - 1.0);
            const Vec x = v2(sigma, 0.7), eta = v2(eta1, eta2);
            for (int branch : {1, -1}) {
                const Vec p = sys.symbols(x, gf.gradient(x, eta, branch));
                worst = std::max(worst, (p - eta).norm());
            }
        }
    }
    CHECK(worst <= 1e-7);
}
