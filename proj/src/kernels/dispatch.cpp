#include "sps/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace sps::kernels {
namespace {

const KernelTable* initial_table() {
    if (const char* env = std::getenv("SPS_SIMD")) {
        const std::string_view want{env};
        if (want == "scalar") return &scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
        if (want == "avx2" && avx2_available()) return &avx2_table();
#endif
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_available()) return &avx2_table();
#endif
    return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    static const bool ok = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    return ok;
#else
    return false;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

bool select(std::string_view name) {
    if (name == "scalar") {
        current().store(&scalar_table());
        return true;
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2" && avx2_available()) {
        current().store(&avx2_table());
        return true;
    }
#endif
    return false;
}

}  // namespace sps::kernels
