#pragma once

// Data-parallel inner loops with a portable scalar reference and SIMD variants
// chosen once at runtime. Every variant must agree with the scalar kernel:
// sturm counts exactly, compensated dot products to a few ulps.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace qci::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

/// Number of eigenvalues of the symmetric tridiagonal matrix (diag, offdiag)
/// strictly below each shift. offdiag_sq[i] = offdiag[i]^2 for i < n-1.
/// Pivots smaller in magnitude than pivmin are replaced by -pivmin.
using SturmCountFn = void (*)(std::span<const double> diag, std::span<const double> offdiag_sq,
                              std::span<const double> shifts, double pivmin,
                              std::span<std::int32_t> counts);

/// sum_i a[i]*b[i] evaluated with error-free transformations (Dot2 of Ogita, Rump, Oishi).
using Dot2Fn = double (*)(std::span<const double> a, std::span<const double> b);

/// sum_i w[i]*a[i]*b[i]; the triple products are rounded once, the sum is compensated.
using Dot3Fn = double (*)(std::span<const double> w, std::span<const double> a,
                          std::span<const double> b);

struct KernelTable {
    Isa isa;
    SturmCountFn sturm_count;
    Dot2Fn dot2;
    Dot3Fn dot3;
};

/// The scalar reference kernels; always available.
const KernelTable& scalar_kernels() noexcept;

/// Kernels for a specific ISA, or nullptr when not compiled in or not supported by the CPU.
const KernelTable* kernels_for(Isa isa) noexcept;

/// Best supported table. QCI_SIMD=scalar|avx2|neon in the environment overrides the choice
/// when the requested ISA is usable.
const KernelTable& active() noexcept;

/// Force a table for the rest of the process (tests, benchmarks). Returns the previous one.
const KernelTable& set_active(const KernelTable& table) noexcept;

// Convenience wrappers over active().
inline void sturm_count(std::span<const double> diag, std::span<const double> offdiag_sq,
                        std::span<const double> shifts, double pivmin,
                        std::span<std::int32_t> counts) {
    active().sturm_count(diag, offdiag_sq, shifts, pivmin, counts);
}
inline double dot2(std::span<const double> a, std::span<const double> b) {
    return active().dot2(a, b);
}
inline double dot3(std::span<const double> w, std::span<const double> a,
                   std::span<const double> b) {
    return active().dot3(w, a, b);
}

namespace detail {
// Implemented per ISA translation unit.
extern const KernelTable kScalarTable;
#if defined(QCI_HAVE_AVX2_KERNELS)
extern const KernelTable kAvx2Table;
#endif
#if defined(QCI_HAVE_NEON_KERNELS)
extern const KernelTable kNeonTable;
#endif
}  // namespace detail

}  // namespace qci::simd
