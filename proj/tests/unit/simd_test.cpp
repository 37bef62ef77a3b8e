#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qci/simd.hpp"
#include "support.hpp"

using namespace qci;
using qci::test::uniform;

namespace {

std::vector<const simd::KernelTable*> variants() {
    std::vector<const simd::KernelTable*> out{&simd::scalar_kernels()};
    for (auto isa : {simd::Isa::Avx2, simd::Isa::Neon})
        if (const auto* t = simd::kernels_for(isa)) out.push_back(t);
    return out;
}

// Sturm count by the textbook LDL^T recurrence.
int sturm_reference(const std::vector<double>& d, const std::vector<double>& e2, double shift, double pivmin) {
    int count = 0;
    double q = d[0] - shift;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
    for (std::size_t i = 1; i < d.size(); ++i) {
        q = d[i] - shift - e2[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0) ++count;
    }
    return count;
}

}  // namespace

TEST_CASE("every kernel variant reproduces the scalar Sturm counts exactly") {
    for (std::size_t n : {1u, 2u, 7u, 64u, 1001u}) {
        std::vector<double> d(n), e(n), e2(n > 1 ? n - 1 : 0);
        for (auto& x : d) x = uniform(-4.0, 4.0);
        for (auto& x : e2) x = std::pow(uniform(-1.0, 1.0), 2);
        std::vector<double> shifts(37);
        for (auto& s : shifts) s = uniform(-6.0, 6.0);
        shifts[0] = d[0];  // exact zero pivot
        const double pivmin = 1e-300;
        std::vector<std::int32_t> ref(shifts.size());
        for (std::size_t k = 0; k < shifts.size(); ++k) ref[k] = sturm_reference(d, e2, shifts[k], pivmin);
        for (const auto* t : variants()) {
            std::vector<std::int32_t> got(shifts.size());
            t->sturm_count(d, e2, shifts, pivmin, got);
            CHECK_MESSAGE(got == ref, simd::isa_name(t->isa));
        }
    }
}

TEST_CASE("compensated dot products agree across variants and survive cancellation") {
    // 1e16 + 1 - 1e16 is 0 in naive double arithmetic
    const std::vector<double> a{1e16, 1.0, -1e16, 3.0}, b{1.0, 1.0, 1.0, 0.5};
    for (const auto* t : variants()) CHECK(t->dot2(a, b) == 2.5);

    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
        std::vector<double> x(n), y(n), w(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = uniform(-1, 1) * std::pow(10.0, uniform(-8, 8));
            y[i] = uniform(-1, 1);
            w[i] = uniform(0, 2);
        }
        long double ref2 = 0.0L, ref3 = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            ref2 += static_cast<long double>(x[i]) * y[i];
            ref3 += static_cast<long double>(w[i] * x[i] * y[i]);
        }
        const double scalar2 = simd::scalar_kernels().dot2(x, y);
        const double scalar3 = simd::scalar_kernels().dot3(w, x, y);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]) * (1.0 + w[i]);
        CHECK(std::abs(scalar2 - static_cast<double>(ref2)) <= 1e-15 * scale + 1e-300);
        CHECK(std::abs(scalar3 - static_cast<double>(ref3)) <= 1e-15 * scale + 1e-300);
        for (const auto* t : variants()) {
            CHECK(std::abs(t->dot2(x, y) - scalar2) <= 4 * std::numeric_limits<double>::epsilon() * scale);
            CHECK(std::abs(t->dot3(w, x, y) - scalar3) <= 4 * std::numeric_limits<double>::epsilon() * scale);
        }
    }
}

TEST_CASE("active table can be forced and restored") {
    const auto& before = simd::active();
    const auto& prev = simd::set_active(simd::scalar_kernels());
    CHECK(&prev == &before);
    CHECK(simd::active().isa == simd::Isa::Scalar);
    simd::set_active(before);
    CHECK(&simd::active() == &before);
}
