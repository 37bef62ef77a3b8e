#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <set>

#include "qci/error.hpp"
#include "qci/spectrum.hpp"
#include "qci/spectrum_io.hpp"
#include "support.hpp"

using namespace qci;
using qci::test::v2;

namespace {

constexpr double pi = std::numbers::pi;

const ProfileMetric& sphere() {
    static const auto p = builtin_profile("sphere", {});
    return p;
}

// (l, m) with l(l+1) <= lam^2
int sphere_count(double lam) {
    int n = 0;
    for (int l = 0; l * (l + 1) <= lam * lam; ++l) n += 2 * l + 1;
    return n;
}

}  // namespace

TEST_CASE("torus lattice enumeration") {
    const auto box = enumerate_torus(2, SpectralRegion::box(2.0, v2(0.6, 0.8)));
    CHECK(box.size() == 9);
    const auto ball = enumerate_torus(2, SpectralRegion::ball(2, 10.0 * (1 + 1e-6)));
    int brute = 0;
    for (int i = -10; i <= 10; ++i)
        for (int j = -10; j <= 10; ++j) brute += i * i + j * j <= 100;
    CHECK(brute == 317);
    CHECK(ball.size() == 317);
    CHECK_THROWS_AS(enumerate_torus(2, SpectralRegion::box(25.0, v2(0.6, 0.8))), BoundaryTieError);
    std::set<std::pair<int, int>> keys;
    for (std::size_t j = 0; j < ball.size(); ++j) keys.insert({ball.qn[0][j], ball.qn[1][j]});
    CHECK(keys.size() == ball.size());
}

TEST_CASE("sphere radial channels reproduce l(l+1)") {
    const auto m0 = solve_radial_channel(sphere(), 0, 4.0, 4096);
    REQUIRE(m0.size() >= 4);
    const double expect[] = {0.0, 2.0, 6.0, 12.0};
    for (int i = 1; i < 4; ++i) CHECK(qci::test::rel_err(m0[i].lam[0] * m0[i].lam[0], expect[i]) <= 1e-5);
    const auto m2 = solve_radial_channel(sphere(), 2, 3.0, 4096);
    REQUIRE(!m2.empty());
    CHECK(qci::test::rel_err(m2[0].lam[0] * m2[0].lam[0], 6.0) <= 1e-5);
    const auto bump = builtin_profile("bump", {0.2});
    const auto p = solve_radial_channel(bump, 3, 12.0, 1024), q = solve_radial_channel(bump, -3, 12.0, 1024);
    REQUIRE(p.size() == q.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(p[i].lam[0] == q[i].lam[0]);
        CHECK(q[i].lam[1] == -3.0);
    }
    CHECK(solve_radial_channel(sphere(), 40, 5.0, 512).empty());
}

TEST_CASE("sphere spectrum to lambda 5 has 25 pairs") {
    CHECK(sphere_count(5.0) == 25);
    const auto s = build_sor_spectrum(sphere(), 5.0);
    CHECK(s.size() == 25);
    std::map<int, int> per_m;
    for (std::size_t j = 0; j < s.size(); ++j) {
        CHECK(s.lam[0][j] <= 5.0);
        CHECK(s.lam[1][j] == static_cast<double>(s.qn[0][j]));
        CHECK(s.norm_cert[j] <= 1e-8);
        ++per_m[s.qn[0][j]];
    }
    for (const auto& [m, c] : per_m) CHECK(per_m[-m] == c);
}

TEST_CASE("channel counts follow the sphere's cumulative (l+1)^2") {
    const auto s = build_sor_spectrum(sphere(), 12.0);
    CHECK(s.size() == static_cast<std::size_t>(sphere_count(12.0)));
    for (double lam : {3.0, 6.5, 9.9, 11.9}) {
        std::size_t n = 0;
        for (std::size_t j = 0; j < s.size(); ++j) n += s.lam[0][j] <= lam;
        CHECK(n == static_cast<std::size_t>(sphere_count(lam)));
    }
    SorSpectrumOptions wider;
    wider.m_cap = s.m_cap + 2;
    const auto w = build_sor_spectrum(sphere(), 12.0, wider);
    CHECK(w.size() == s.size());
}

TEST_CASE("eigenfunctions: torus characters and sphere harmonics") {
    const auto t = enumerate_torus(2, SpectralRegion::box(1.5, v2(0.6, 0.8)));
    for (std::size_t j = 0; j < t.size(); ++j)
        if (t.qn[0][j] == 0 && t.qn[1][j] == 0)
            CHECK(std::abs(eval_eigenfunction(t, j, v2(1.0, 2.0)) - 1.0 / (2 * pi)) < 1e-15);

    SorSpectrumOptions o;
    o.keep_samples = true;
    const auto s = build_sor_spectrum(sphere(), 3.0, o);
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (s.qn[0][j] == 0 && s.qn[1][j] == 1) {
            // l = 1, m = 0: proportional to cos(sigma)
            CHECK(std::abs(eval_eigenfunction(s, j, v2(pi / 2, 0.0))) < 1e-6);
            const double f1 = std::abs(eval_eigenfunction(s, j, v2(0.4, 0.0)));
            const double norm = std::sqrt(3.0 / (4 * pi));
            CHECK(f1 == doctest::Approx(norm * std::cos(0.4)).epsilon(1e-4));
        }
        if (s.qn[0][j] == 2) {
            const auto a = eval_eigenfunction(s, j, v2(1.0, 0.0)), b = eval_eigenfunction(s, j, v2(1.0, 2.5));
            CHECK(std::abs(a) == doctest::Approx(std::abs(b)).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(eval_eigenfunction(s, 0, v2(4.0, 0.0)), DomainError);
}

TEST_CASE("orthonormality within one channel") {
    const auto bump = builtin_profile("bump", {0.2});
    const int n = 2048;
    const auto ch = solve_radial_channel(bump, 1, 60.0, n);
    REQUIRE(ch.size() >= 50);
    const double h = bump.length() / n;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i)
        for (int j = i; j < 50; ++j) {
            double ip = 0.0;
            for (int k = 0; k < n; ++k)
                ip += ch[i].radial_samples[k] * ch[j].radial_samples[k] * bump.a((k + 0.5) * h) * h;
            worst = std::max(worst, std::abs(ip - (i == j ? 1.0 : 0.0)));
        }
    CHECK(worst <= 1e-6);
}

TEST_CASE("grid convergence is second order") {
    ChannelOptions raw;
    raw.richardson = false;
    raw.keep_samples = false;
    std::vector<double> drift;
    for (int n : {256, 512, 1024}) {
        const auto a = solve_radial_channel(sphere(), 1, 5.0, n, raw);
        const auto b = solve_radial_channel(sphere(), 1, 5.0, 2 * n, raw);
        drift.push_back(std::abs(a[2].lam[0] - b[2].lam[0]));
    }
    for (std::size_t i = 0; i + 1 < drift.size(); ++i) {
        const double order = std::log2(drift[i] / drift[i + 1]);
        CHECK(order >= 1.8);
        CHECK(order <= 2.2);
    }
}

TEST_CASE("spectrum tables round-trip") {
    SorSpectrumOptions o;
    o.keep_samples = true;
    o.grid_size = 512;
    const auto s = build_sor_spectrum(builtin_profile("bump", {0.2}), 6.0, o);
    const auto dir = std::filesystem::temp_directory_path() / "qci_spectrum_io";
    std::filesystem::create_directories(dir);
    const auto csv = (dir / "s.csv").string(), bin = (dir / "s.bin").string();
    write_spectrum_table(s, csv, bin);
    const auto r = read_spectrum_table(csv, bin);
    REQUIRE(r.size() == s.size());
    CHECK(r.lam[0] == s.lam[0]);
    CHECK(r.qn == s.qn);
    CHECK(r.samples == s.samples);
    CHECK(r.system.profile().name() == "bump");
    const auto t = enumerate_torus(2, SpectralRegion::ball(2, 4.5));
    write_spectrum_table(t, (dir / "t.csv").string());
    CHECK(read_spectrum_table((dir / "t.csv").string()).qn == t.qn);
}

TEST_CASE("the constant mode has eigenvalue exactly zero") {
    for (const char* name : {"sphere", "bump"}) {
        const auto prof = builtin_profile(name, name == std::string("bump") ? std::vector<double>{0.2} : std::vector<double>{});
        for (bool rich : {true, false}) {
            ChannelOptions o;
            o.richardson = rich;
            const auto ch = solve_radial_channel(prof, 0, 3.0, 1024, o);
            REQUIRE(!ch.empty());
            CHECK(ch[0].lam[0] == 0.0);
            CHECK(ch[1].lam[0] > 1.0);
        }
    }
}

TEST_CASE("joint multiplicity") {
    CHECK(max_joint_multiplicity(enumerate_torus(2, SpectralRegion::ball(2, 7.5))) == 1);
    JointSpectrum s;
    s.lam = {{1.0, 2.0, 1.0 + 1e-12, 1.0}, {0.0, 0.0, 0.0, 0.5}};
    CHECK(max_joint_multiplicity(s) == 2);
    CHECK(max_joint_multiplicity(JointSpectrum{}) == 0);
}
