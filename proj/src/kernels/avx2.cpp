#include "sps/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#define SPS_AVX2 __attribute__((target("avx2,fma")))

namespace sps::kernels {
namespace {

SPS_AVX2 inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

SPS_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

SPS_AVX2 double wdot_avx2(const double* w, const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
        const __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(a + i + 4));
        acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
        acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

SPS_AVX2 double sum_sq_diff_avx2(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 1;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(x + i - 1));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc) + x[0] * x[0];
    for (; i < n; ++i) {
        const double d = x[i] - x[i - 1];
        s += d * d;
    }
    return s + x[n - 1] * x[n - 1];
}

SPS_AVX2 void mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

SPS_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

SPS_AVX2 void second_difference_avx2(const double* x, double* out, std::size_t n, double scale) {
    if (n < 6) {
        scalar_table().second_difference(x, out, n, scale);
        return;
    }
    out[0] = scale * (x[1] - 2.0 * x[0]);
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 1;
    for (; i + 4 < n; i += 4) {
        const __m256d l = _mm256_loadu_pd(x + i - 1);
        const __m256d m = _mm256_loadu_pd(x + i);
        const __m256d h = _mm256_loadu_pd(x + i + 1);
        const __m256d s = _mm256_sub_pd(_mm256_add_pd(l, h), _mm256_mul_pd(two, m));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(vs, s));
    }
    for (; i + 1 < n; ++i) out[i] = scale * (x[i - 1] - 2.0 * x[i] + x[i + 1]);
    out[n - 1] = scale * (x[n - 2] - 2.0 * x[n - 1]);
}

SPS_AVX2 void add_cross_difference_avx2(const double* lo, const double* mid, const double* hi,
                                        double* out, std::size_t n, double scale) {
    if (!lo || !hi) {
        scalar_table().add_cross_difference(lo, mid, hi, out, n, scale);
        return;
    }
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d s = _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(lo + i), _mm256_loadu_pd(hi + i)),
                                        _mm256_mul_pd(two, _mm256_loadu_pd(mid + i)));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vs, s, _mm256_loadu_pd(out + i)));
    }
    for (; i < n; ++i) out[i] += scale * (lo[i] - 2.0 * mid[i] + hi[i]);
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{
        "avx2",          dot_avx2,
        wdot_avx2,       sum_sq_diff_avx2,
        mul_avx2,        axpy_avx2,
        second_difference_avx2, add_cross_difference_avx2,
    };
    return table;
}

}  // namespace sps::kernels
#endif
