#include "sps/linalg.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

#include "fftw_util.hpp"
#include "sps/errors.hpp"

extern "C" {
void dgttrf_(const int* n, double* dl, double* d, double* du, double* du2, int* ipiv, int* info);
void dgttrs_(const char* trans, const int* n, const int* nrhs, const double* dl, const double* d, const double* du,
             const double* du2, const int* ipiv, double* b, const int* ldb, int* info, std::size_t trans_len);
}

namespace sps {

// ---------------------------------------------------------------------------
// GMRES

namespace {

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    if (w.empty()) {
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    } else {
        for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
    }
    return s;
}

}  // namespace

GmresResult gmres(const LinearMap& A, const LinearMap& M, std::span<const double> weights, std::span<const double> b,
                  std::span<double> x, const GmresOptions& opts) {
    const std::size_t n = b.size();
    if (x.size() != n || (!weights.empty() && weights.size() != n))
        throw InvalidArgument("gmres: vector sizes do not match");
    auto norm = [&](std::span<const double> v) { return std::sqrt(weighted_dot(weights, v, v)); };
    GmresResult res;
    const double bnorm = norm(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        res.converged = true;
        return res;
    }
    const int m = std::max(1, opts.restart);
    std::vector<std::vector<double>> V(static_cast<std::size_t>(m + 1), std::vector<double>(n));
    std::vector<std::vector<double>> H(static_cast<std::size_t>(m + 1), std::vector<double>(static_cast<std::size_t>(m)));
    std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m)), g(static_cast<std::size_t>(m + 1));
    std::vector<double> r(n), z(n), w(n);

    while (true) {
        A(x, w);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
        double beta = norm(r);
        res.relative_residual = beta / bnorm;
        if (res.relative_residual <= opts.rel_tol) {
            res.converged = true;
            return res;
        }
        if (res.iterations >= opts.max_iterations) return res;
        for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;
        int k = 0;
        for (; k < m && res.iterations < opts.max_iterations; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            M(V[ku], z);
            A(z, w);
            ++res.iterations;
            // Modified Gram-Schmidt with one reorthogonalization pass.
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t j = 0; j <= ku; ++j) {
                    const double hij = weighted_dot(weights, w, V[j]);
                    H[j][ku] += hij;
                    for (std::size_t i = 0; i < n; ++i) w[i] -= hij * V[j][i];
                }
            }
            const double hnext = norm(w);
            H[ku + 1][ku] = hnext;
            if (hnext > 0.0)
                for (std::size_t i = 0; i < n; ++i) V[ku + 1][i] = w[i] / hnext;
            for (std::size_t j = 0; j < ku; ++j) {
                const double t = cs[j] * H[j][ku] + sn[j] * H[j + 1][ku];
                H[j + 1][ku] = -sn[j] * H[j][ku] + cs[j] * H[j + 1][ku];
                H[j][ku] = t;
            }
            const double d = std::hypot(H[ku][ku], H[ku + 1][ku]);
            cs[ku] = d == 0.0 ? 1.0 : H[ku][ku] / d;
            sn[ku] = d == 0.0 ? 0.0 : H[ku + 1][ku] / d;
            H[ku][ku] = d;
            H[ku + 1][ku] = 0.0;
            g[ku + 1] = -sn[ku] * g[ku];
            g[ku] = cs[ku] * g[ku];
            res.relative_residual = std::abs(g[ku + 1]) / bnorm;
            if (res.relative_residual <= opts.rel_tol || hnext == 0.0) {
                ++k;
                break;
            }
        }
        // Back substitution and update x += M (V y).
        std::vector<double> y(static_cast<std::size_t>(k));
        for (int i = k - 1; i >= 0; --i) {
            const auto iu = static_cast<std::size_t>(i);
            double s = g[iu];
            for (std::size_t j = iu + 1; j < static_cast<std::size_t>(k); ++j) s -= H[iu][j] * y[j];
            y[iu] = H[iu][iu] != 0.0 ? s / H[iu][iu] : 0.0;
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j)
            for (std::size_t i = 0; i < n; ++i) w[i] += y[j] * V[j][i];
        M(w, z);
        for (std::size_t i = 0; i < n; ++i) x[i] += z[i];
        for (auto& row : H) std::fill(row.begin(), row.end(), 0.0);
        if (res.iterations >= opts.max_iterations) {
            // Report the true residual of the final iterate.
            A(x, w);
            for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
            res.relative_residual = norm(r) / bnorm;
            res.converged = res.relative_residual <= opts.rel_tol;
            return res;
        }
    }
}

// ---------------------------------------------------------------------------
// Tridiagonal

Tridiagonal::Tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper)
    : dl_(std::move(lower)), d_(std::move(diag)), du_(std::move(upper)) {
    const std::size_t n = d_.size();
    if (n == 0 || dl_.size() + 1 != n || du_.size() + 1 != n)
        throw InvalidArgument("tridiagonal: band lengths must be n-1, n, n-1");
    du2_.resize(n > 2 ? n - 2 : 1);
    ipiv_.resize(n);
    const int ni = static_cast<int>(n);
    if (dl_.empty()) {
        // LAPACK tolerates n = 1 but wants valid pointers.
        dl_.push_back(0.0);
        du_.push_back(0.0);
    }
    dgttrf_(&ni, dl_.data(), d_.data(), du_.data(), du2_.data(), ipiv_.data(), &info_);
    if (info_ < 0) throw InvalidArgument("tridiagonal: dgttrf rejected its arguments");
}

void Tridiagonal::solve(std::span<double> rhs) const {
    if (rhs.size() != d_.size()) throw InvalidArgument("tridiagonal: right-hand side has the wrong length");
    if (info_ != 0) throw SolverError("tridiagonal: matrix is singular");
    const int n = static_cast<int>(d_.size()), nrhs = 1;
    int info = 0;
    const char trans = 'N';
    dgttrs_(&trans, &n, &nrhs, dl_.data(), d_.data(), du_.data(), du2_.data(), ipiv_.data(), rhs.data(), &n, &info,
            1);
    if (info != 0) throw SolverError("tridiagonal: dgttrs failed");
}

// ---------------------------------------------------------------------------
// Shifted Laplacian

struct ShiftedLaplacianSolver::Impl {
    BoxGrid grid;
    double shift = 0.0;
    std::vector<double> eig;  // 1D eigenvalues of -d^2/dx^2 with Dirichlet ghosts
    fft::Buffer buf;
    fft::Plan plan;

    Impl(const BoxGrid& g, double s) : grid(g), shift(s) {
        if (g.boundary != BoxBoundary::dirichlet) throw InvalidArgument("shifted Laplacian: Dirichlet box required");
        const std::size_t n = g.n;
        const double h = g.spacing();
        eig.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = std::sin(0.5 * std::numbers::pi * static_cast<double>(k + 1) / static_cast<double>(n + 1));
            eig[k] = 4.0 * t * t / (h * h);
        }
        buf = fft::Buffer(n * n * n);
        const int ni = static_cast<int>(n);
        plan = fft::Plan([&] {
            return fftw_plan_r2r_3d(ni, ni, ni, buf.data(), buf.data(), FFTW_RODFT00, FFTW_RODFT00, FFTW_RODFT00,
                                    FFTW_ESTIMATE);
        });
    }

    void solve(std::span<const double> rhs, std::span<double> out) {
        const std::size_t n = grid.n;
        if (rhs.size() != grid.size() || out.size() != grid.size())
            throw InvalidArgument("shifted Laplacian: vector size does not match the grid");
        std::copy(rhs.begin(), rhs.end(), buf.begin());
        plan.execute();
        // RODFT00 applied twice multiplies by 2(n+1) per axis.
        const double norm = std::pow(2.0 * static_cast<double>(n + 1), -3.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    buf[grid.index(i, j, k)] *= norm / (eig[i] + eig[j] + eig[k] + shift);
        plan.execute();
        std::copy(buf.begin(), buf.end(), out.begin());
    }
};

ShiftedLaplacianSolver::ShiftedLaplacianSolver(const BoxGrid& grid, double shift)
    : impl_(std::make_unique<Impl>(grid, shift)) {}
ShiftedLaplacianSolver::~ShiftedLaplacianSolver() = default;
ShiftedLaplacianSolver::ShiftedLaplacianSolver(ShiftedLaplacianSolver&&) noexcept = default;
ShiftedLaplacianSolver& ShiftedLaplacianSolver::operator=(ShiftedLaplacianSolver&&) noexcept = default;
double ShiftedLaplacianSolver::shift() const { return impl_->shift; }
void ShiftedLaplacianSolver::set_shift(double s) { impl_->shift = s; }
void ShiftedLaplacianSolver::solve(std::span<const double> rhs, std::span<double> out) { impl_->solve(rhs, out); }

}  // namespace sps
