#pragma once

// Data-parallel inner loops used by the quadrature, stencil and Krylov code.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The active table is chosen once at startup from CPUID and can be
// forced with SPS_SIMD=scalar|avx2. Reductions in the vector variants use a
// different summation order than the scalar ones, so results agree to
// rounding, not bitwise; for a fixed table every kernel is deterministic.

#include <cstddef>
#include <span>
#include <string_view>

namespace sps::kernels {

struct KernelTable {
    const char* name;

    // sum_i a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i w[i]*a[i]*b[i]
    double (*wdot)(const double* w, const double* a, const double* b, std::size_t n);
    // sum_{i=0}^{n} (x[i]-x[i-1])^2 with x[-1] = x[n] = 0
    double (*sum_sq_diff)(const double* x, std::size_t n);
    // out[i] = a[i]*b[i]
    void (*mul)(const double* a, const double* b, double* out, std::size_t n);
    // y[i] += alpha*x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // out[i] = scale*(x[i-1] - 2 x[i] + x[i+1]) with zero ends
    void (*second_difference)(const double* x, double* out, std::size_t n, double scale);
    // out[i] += scale*(lo[i] - 2 mid[i] + hi[i]); lo or hi may be null (treated as zero)
    void (*add_cross_difference)(const double* lo, const double* mid, const double* hi,
                                 double* out, std::size_t n, double scale);
};

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif

// True when the CPU supports the AVX2 + FMA variant.
bool avx2_available();

// Table in use for this process.
const KernelTable& active();

// Select a table by name ("scalar", "avx2"); returns false if unavailable.
bool select(std::string_view name);

// Span conveniences over the active table.
inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}
inline double wdot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
    return active().wdot(w.data(), a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void mul(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    active().mul(a.data(), b.data(), out.data(), a.size());
}

}  // namespace sps::kernels
