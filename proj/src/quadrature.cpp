#include "qci/quadrature.hpp"

namespace qci::quad {
namespace {

double simpson_step(const std::function<double(double)>& f, double a, double fa, double m, double fm,
                    double b, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_step(f, a, fa, m, fm, b, fb, whole, abs_tol, max_depth);
}

std::vector<double> split_points(double a, double b, std::span<const double> interior) {
    std::vector<double> pts{a, b};
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double eps = 1e-13 * std::max(1.0, hi - lo);
    for (double x : interior)
        if (x > lo + eps && x < hi - eps) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [eps](double u, double v) { return v - u <= eps; }),
              pts.end());
    if (a > b) std::reverse(pts.begin(), pts.end());
    return pts;
}

}  // namespace qci::quad
