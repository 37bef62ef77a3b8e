// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "qci/simd.hpp"

#include <immintrin.h>

#include <array>
#include <cmath>

#include "eft.hpp"

namespace qci::simd {
namespace {

inline __m256d guard_pivot(__m256d q, __m256d pivmin, __m256d neg_pivmin, __m256d abs_mask) {
    const __m256d small = _mm256_cmp_pd(_mm256_and_pd(q, abs_mask), pivmin, _CMP_LT_OQ);
    return _mm256_blendv_pd(q, neg_pivmin, small);
}

// Four vectors (16 shifts) per sweep hide the division latency of the recurrence.
template <int V>
void sturm_block(const double* diag, const double* offdiag_sq, std::size_t n,
                 const double* shifts, double pivmin, std::int32_t* counts) {
    const __m256d vpiv = _mm256_set1_pd(pivmin);
    const __m256d vneg = _mm256_set1_pd(-pivmin);
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d zero = _mm256_setzero_pd();

    __m256d x[V], q[V];
    __m256i c[V];
    const __m256d d0 = _mm256_set1_pd(diag[0]);
    for (int v = 0; v < V; ++v) {
        x[v] = _mm256_loadu_pd(shifts + 4 * v);
        q[v] = guard_pivot(_mm256_sub_pd(d0, x[v]), vpiv, vneg, abs_mask);
        c[v] = _mm256_castpd_si256(_mm256_cmp_pd(q[v], zero, _CMP_LT_OQ));
    }
    for (std::size_t i = 1; i < n; ++i) {
        const __m256d di = _mm256_set1_pd(diag[i]);
        const __m256d e2 = _mm256_set1_pd(offdiag_sq[i - 1]);
        for (int v = 0; v < V; ++v) {
            q[v] = _mm256_sub_pd(_mm256_sub_pd(di, x[v]), _mm256_div_pd(e2, q[v]));
            q[v] = guard_pivot(q[v], vpiv, vneg, abs_mask);
            const __m256i neg = _mm256_castpd_si256(_mm256_cmp_pd(q[v], zero, _CMP_LT_OQ));
            c[v] = _mm256_add_epi64(c[v], neg);
        }
    }
    for (int v = 0; v < V; ++v) {
        alignas(32) std::array<std::int64_t, 4> lanes;
        _mm256_store_si256(reinterpret_cast<__m256i*>(lanes.data()), c[v]);
        for (int l = 0; l < 4; ++l) counts[4 * v + l] = static_cast<std::int32_t>(-lanes[l]);
    }
}

void sturm_count_avx2(std::span<const double> diag, std::span<const double> offdiag_sq,
                      std::span<const double> shifts, double pivmin,
                      std::span<std::int32_t> counts) {
    const std::size_t n = diag.size();
    std::size_t s = 0;
    for (; s + 16 <= shifts.size(); s += 16)
        sturm_block<4>(diag.data(), offdiag_sq.data(), n, shifts.data() + s, pivmin,
                       counts.data() + s);
    for (; s + 4 <= shifts.size(); s += 4)
        sturm_block<1>(diag.data(), offdiag_sq.data(), n, shifts.data() + s, pivmin,
                       counts.data() + s);
    if (s < shifts.size()) {
        std::array<double, 4> pad{};
        std::array<std::int32_t, 4> out{};
        const std::size_t rest = shifts.size() - s;
        for (std::size_t l = 0; l < 4; ++l) pad[l] = shifts[s + (l < rest ? l : rest - 1)];
        sturm_block<1>(diag.data(), offdiag_sq.data(), n, pad.data(), pivmin, out.data());
        for (std::size_t l = 0; l < rest; ++l) counts[s + l] = out[l];
    }
}

struct Dot2Lanes {
    __m256d hi = _mm256_setzero_pd();
    __m256d lo = _mm256_setzero_pd();

    void add_product(__m256d a, __m256d b) {
        const __m256d h = _mm256_mul_pd(a, b);
        const __m256d r = _mm256_fmsub_pd(a, b, h);
        const __m256d s = _mm256_add_pd(hi, h);
        const __m256d z = _mm256_sub_pd(s, hi);
        const __m256d q = _mm256_add_pd(_mm256_sub_pd(hi, _mm256_sub_pd(s, z)), _mm256_sub_pd(h, z));
        hi = s;
        lo = _mm256_add_pd(lo, _mm256_add_pd(q, r));
    }

    // Lane order is fixed, so the reduction is deterministic.
    eft::Dot2Acc reduce() const {
        alignas(32) std::array<double, 4> h, l;
        _mm256_store_pd(h.data(), hi);
        _mm256_store_pd(l.data(), lo);
        eft::Dot2Acc acc;
        for (int i = 0; i < 4; ++i) acc.add(h[i]);
        for (int i = 0; i < 4; ++i) acc.lo += l[i];
        return acc;
    }
};

double dot2_avx2(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    Dot2Lanes lanes;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        lanes.add_product(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    eft::Dot2Acc acc = lanes.reduce();
    for (; i < n; ++i) acc.add_product(a[i], b[i]);
    return acc.value();
}

double dot3_avx2(std::span<const double> w, std::span<const double> a,
                 std::span<const double> b) {
    const std::size_t n = w.size();
    Dot2Lanes lanes;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), _mm256_loadu_pd(a.data() + i));
        lanes.add_product(wa, _mm256_loadu_pd(b.data() + i));
    }
    eft::Dot2Acc acc = lanes.reduce();
    for (; i < n; ++i) acc.add_product(w[i] * a[i], b[i]);
    return acc.value();
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table{Isa::Avx2, &sturm_count_avx2, &dot2_avx2, &dot3_avx2};
}

}  // namespace qci::simd
