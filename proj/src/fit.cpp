#include "qci/fit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "qci/error.hpp"

namespace qci {

ExponentFit fit_exponent(std::span<const double> lambda, std::span<const double> value) {
    if (lambda.size() != value.size()) throw NumericError("fit: lambda and value lengths differ");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (value[i] == 0.0 || !std::isfinite(value[i])) continue;
        if (!(lambda[i] > 0.0)) throw NumericError("fit: lambda must be positive");
        lx.push_back(std::log(lambda[i]));
        ly.push_back(std::log(std::abs(value[i])));
    }
    const std::size_t n = lx.size();
    if (n < 4) throw NumericError("fit needs at least 4 nonzero values, got " + std::to_string(n));
    const auto [mn, mx] = std::minmax_element(lx.begin(), lx.end());
    ExponentFit f;
    f.points = n;
    f.span = std::exp(*mx - *mn);
    if (f.span < 4.0 * (1.0 - 1e-12)) throw NumericError("fit needs lambda values spanning a factor of 4");

    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
    }
    const double xm = sx / n, ym = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - xm) * (lx[i] - xm);
        sxy += (lx[i] - xm) * (ly[i] - ym);
    }
    f.beta = sxy / sxx;
    f.log_c = ym - f.beta * xm;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - f.log_c - f.beta * lx[i];
        rss += r * r;
    }
    const double dof = static_cast<double>(n - 2);
    f.std_error = std::sqrt(rss / dof / sxx);
    const double t = boost::math::quantile(boost::math::students_t(dof), 0.975);
    f.ci_lo = f.beta - t * f.std_error;
    f.ci_hi = f.beta + t * f.std_error;
    return f;
}

std::string ExponentFit::describe() const {
    std::ostringstream os;
    os.precision(4);
    os << "beta=" << beta << " [" << ci_lo << ", " << ci_hi << "] over " << points << " points (span " << span
       << "x)";
    return os.str();
}

}  // namespace qci
