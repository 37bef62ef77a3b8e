#include "qci/simd.hpp"

#include <arm_neon.h>

#include <array>
#include <cmath>

#include "eft.hpp"

namespace qci::simd {
namespace {

void sturm_count_neon(std::span<const double> diag, std::span<const double> offdiag_sq,
                      std::span<const double> shifts, double pivmin,
                      std::span<std::int32_t> counts) {
    const std::size_t n = diag.size();
    const float64x2_t vpiv = vdupq_n_f64(pivmin);
    const float64x2_t vneg = vdupq_n_f64(-pivmin);
    const float64x2_t zero = vdupq_n_f64(0.0);
    auto guard = [&](float64x2_t q) {
        return vbslq_f64(vcltq_f64(vabsq_f64(q), vpiv), vneg, q);
    };
    std::size_t s = 0;
    for (; s + 2 <= shifts.size(); s += 2) {
        const float64x2_t x = vld1q_f64(shifts.data() + s);
        float64x2_t q = guard(vsubq_f64(vdupq_n_f64(diag[0]), x));
        int64x2_t c = vreinterpretq_s64_u64(vcltq_f64(q, zero));
        for (std::size_t i = 1; i < n; ++i) {
            q = vsubq_f64(vsubq_f64(vdupq_n_f64(diag[i]), x),
                          vdivq_f64(vdupq_n_f64(offdiag_sq[i - 1]), q));
            q = guard(q);
            c = vaddq_s64(c, vreinterpretq_s64_u64(vcltq_f64(q, zero)));
        }
        counts[s] = static_cast<std::int32_t>(-vgetq_lane_s64(c, 0));
        counts[s + 1] = static_cast<std::int32_t>(-vgetq_lane_s64(c, 1));
    }
    if (s < shifts.size())
        detail::kScalarTable.sturm_count(diag, offdiag_sq, shifts.subspan(s), pivmin,
                                         counts.subspan(s));
}

struct Dot2Lanes {
    float64x2_t hi = vdupq_n_f64(0.0);
    float64x2_t lo = vdupq_n_f64(0.0);

    void add_product(float64x2_t a, float64x2_t b) {
        const float64x2_t h = vmulq_f64(a, b);
        const float64x2_t rr = vfmaq_f64(vnegq_f64(h), a, b);
        const float64x2_t s = vaddq_f64(hi, h);
        const float64x2_t z = vsubq_f64(s, hi);
        const float64x2_t q = vaddq_f64(vsubq_f64(hi, vsubq_f64(s, z)), vsubq_f64(h, z));
        hi = s;
        lo = vaddq_f64(lo, vaddq_f64(q, rr));
    }
    eft::Dot2Acc reduce() const {
        eft::Dot2Acc acc;
        acc.add(vgetq_lane_f64(hi, 0));
        acc.add(vgetq_lane_f64(hi, 1));
        acc.lo += vgetq_lane_f64(lo, 0);
        acc.lo += vgetq_lane_f64(lo, 1);
        return acc;
    }
};

double dot2_neon(std::span<const double> a, std::span<const double> b) {
    Dot2Lanes lanes;
    std::size_t i = 0;
    for (; i + 2 <= a.size(); i += 2)
        lanes.add_product(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i));
    eft::Dot2Acc acc = lanes.reduce();
    for (; i < a.size(); ++i) acc.add_product(a[i], b[i]);
    return acc.value();
}

double dot3_neon(std::span<const double> w, std::span<const double> a,
                 std::span<const double> b) {
    Dot2Lanes lanes;
    std::size_t i = 0;
    for (; i + 2 <= w.size(); i += 2)
        lanes.add_product(vmulq_f64(vld1q_f64(w.data() + i), vld1q_f64(a.data() + i)),
                          vld1q_f64(b.data() + i));
    eft::Dot2Acc acc = lanes.reduce();
    for (; i < w.size(); ++i) acc.add_product(w[i] * a[i], b[i]);
    return acc.value();
}

}  // namespace

namespace detail {
const KernelTable kNeonTable{Isa::Neon, &sturm_count_neon, &dot2_neon, &dot3_neon};
}

}  // namespace qci::simd
