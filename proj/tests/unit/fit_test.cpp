#include <doctest.h>

#include <cmath>
#include <vector>

#include "qci/error.hpp"
#include "qci/fit.hpp"

using namespace qci;

TEST_CASE("synthetic power law recovers its exponent") {
    std::vector<double> lam{25, 50, 100, 200, 400}, val;
    for (double l : lam) val.push_back(3.0 * l);
    const auto f = fit_exponent(lam, val);
    CHECK(f.beta == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::exp(f.log_c) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(f.points == 5);
    CHECK(f.span == doctest::Approx(16.0));
    CHECK(f.ci_lo <= f.beta);
    CHECK(f.ci_hi >= f.beta);
}

TEST_CASE("noisy data: the band widens but brackets the slope") {
    std::vector<double> lam{10, 20, 40, 80, 160, 320}, val;
    const double noise[] = {1.1, 0.9, 1.05, 0.95, 1.1, 0.92};
    for (std::size_t i = 0; i < lam.size(); ++i) val.push_back(noise[i] * lam[i] * lam[i]);
    const auto f = fit_exponent(lam, val);
    CHECK(f.ci_hi - f.ci_lo > 0.0);
    CHECK(f.ci_lo < 2.0);
    CHECK(f.ci_hi > 2.0);
}

TEST_CASE("zero values are dropped and short grids rejected") {
    std::vector<double> lam{25, 50, 100, 200, 400}, val{1, 0, 2, 4, 8};
    CHECK(fit_exponent(lam, val).points == 4);
    std::vector<double> lam3{25, 50, 100}, val3{1, 2, 3};
    CHECK_THROWS_AS(fit_exponent(lam3, val3), NumericError);
    std::vector<double> narrow{10, 11, 12, 13, 14}, v5{1, 2, 3, 4, 5};
    CHECK_THROWS_AS(fit_exponent(narrow, v5), NumericError);
}
