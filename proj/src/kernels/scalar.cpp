#include "sps/kernels.hpp"

namespace sps::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double wdot_scalar(const double* w, const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

double sum_sq_diff_scalar(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    double s = x[0] * x[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double d = x[i] - x[i - 1];
        s += d * d;
    }
    return s + x[n - 1] * x[n - 1];
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void second_difference_scalar(const double* x, double* out, std::size_t n, double scale) {
    if (n == 0) return;
    if (n == 1) {
        out[0] = -2.0 * scale * x[0];
        return;
    }
    out[0] = scale * (x[1] - 2.0 * x[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = scale * (x[i - 1] - 2.0 * x[i] + x[i + 1]);
    out[n - 1] = scale * (x[n - 2] - 2.0 * x[n - 1]);
}

void add_cross_difference_scalar(const double* lo, const double* mid, const double* hi, double* out,
                                 std::size_t n, double scale) {
    for (std::size_t i = 0; i < n; ++i) {
        const double l = lo ? lo[i] : 0.0;
        const double h = hi ? hi[i] : 0.0;
        out[i] += scale * (l - 2.0 * mid[i] + h);
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        "scalar",          dot_scalar,
        wdot_scalar,       sum_sq_diff_scalar,
        mul_scalar,        axpy_scalar,
        second_difference_scalar, add_cross_difference_scalar,
    };
    return table;
}

}  // namespace sps::kernels
