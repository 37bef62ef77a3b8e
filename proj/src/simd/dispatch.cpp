#include <atomic>
#include <cstdlib>
#include <string>

#include "qci/simd.hpp"

namespace qci::simd {
namespace {

bool cpu_supports(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar:
            return true;
        case Isa::Avx2:
#if defined(QCI_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(QCI_HAVE_NEON_KERNELS)
            return true;  // mandatory on aarch64
#else
            return false;
#endif
    }
    return false;
}

const KernelTable* choose_default() noexcept {
    if (const char* env = std::getenv("QCI_SIMD")) {
        const std::string want(env);
        Isa isa = Isa::Scalar;
        if (want == "avx2") isa = Isa::Avx2;
        else if (want == "neon") isa = Isa::Neon;
        if (const KernelTable* t = kernels_for(isa)) return t;
    }
    if (const KernelTable* t = kernels_for(Isa::Avx2)) return t;
    if (const KernelTable* t = kernels_for(Isa::Neon)) return t;
    return &detail::kScalarTable;
}

std::atomic<const KernelTable*>& current() noexcept {
    static std::atomic<const KernelTable*> table{choose_default()};
    return table;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

const KernelTable& scalar_kernels() noexcept { return detail::kScalarTable; }

const KernelTable* kernels_for(Isa isa) noexcept {
    if (!cpu_supports(isa)) return nullptr;
    switch (isa) {
        case Isa::Scalar:
            return &detail::kScalarTable;
        case Isa::Avx2:
#if defined(QCI_HAVE_AVX2_KERNELS)
            return &detail::kAvx2Table;
#else
            return nullptr;
#endif
        case Isa::Neon:
#if defined(QCI_HAVE_NEON_KERNELS)
            return &detail::kNeonTable;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

const KernelTable& set_active(const KernelTable& table) noexcept {
    return *current().exchange(&table, std::memory_order_acq_rel);
}

}  // namespace qci::simd
