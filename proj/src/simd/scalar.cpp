#include "qci/simd.hpp"

#include <cmath>

#include "eft.hpp"

namespace qci::simd {
namespace {

void sturm_count_scalar(std::span<const double> diag, std::span<const double> offdiag_sq,
                        std::span<const double> shifts, double pivmin,
                        std::span<std::int32_t> counts) {
    const std::size_t n = diag.size();
    for (std::size_t s = 0; s < shifts.size(); ++s) {
        const double x = shifts[s];
        std::int32_t count = 0;
        double q = diag[0] - x;
        if (std::fabs(q) < pivmin) q = -pivmin;
        count += q < 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            q = (diag[i] - x) - offdiag_sq[i - 1] / q;
            if (std::fabs(q) < pivmin) q = -pivmin;
            count += q < 0.0;
        }
        counts[s] = count;
    }
}

double dot2_scalar(std::span<const double> a, std::span<const double> b) {
    eft::Dot2Acc acc;
    for (std::size_t i = 0; i < a.size(); ++i) acc.add_product(a[i], b[i]);
    return acc.value();
}

double dot3_scalar(std::span<const double> w, std::span<const double> a,
                   std::span<const double> b) {
    eft::Dot2Acc acc;
    for (std::size_t i = 0; i < w.size(); ++i) acc.add_product(w[i] * a[i], b[i]);
    return acc.value();
}

}  // namespace

namespace detail {
const KernelTable kScalarTable{Isa::Scalar, &sturm_count_scalar, &dot2_scalar, &dot3_scalar};
}

}  // namespace qci::simd
