#pragma once

// Krylov and direct building blocks for the Newton solver: restarted GMRES
// in a weighted inner product, a LAPACK-backed tridiagonal LU, and the
// DST-diagonalized shifted Laplacian on Dirichlet boxes.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "sps/mesh.hpp"

namespace sps {

using LinearMap = std::function<void(std::span<const double> x, std::span<double> y)>;

struct GmresOptions {
    double rel_tol = 1e-8;
    int restart = 40;
    int max_iterations = 500;
};

struct GmresResult {
    bool converged = false;
    int iterations = 0;
    double relative_residual = 0.0;
};

// Solves A x = b with right preconditioning x = M y. `weights` defines the
// inner product sum w_i a_i b_i (empty = Euclidean). x holds the initial
// guess on entry.
GmresResult gmres(const LinearMap& A, const LinearMap& M, std::span<const double> weights, std::span<const double> b,
                  std::span<double> x, const GmresOptions& opts = {});

// General tridiagonal matrix with partial-pivoting LU (dgttrf/dgttrs).
class Tridiagonal {
public:
    // lower[i] = A(i+1, i), diag[i] = A(i, i), upper[i] = A(i, i+1).
    Tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper);
    std::size_t size() const { return d_.size(); }
    // False when the factorization hit an exactly zero pivot.
    bool ok() const { return info_ == 0; }
    void solve(std::span<double> rhs) const;

private:
    std::vector<double> dl_, d_, du_, du2_;
    std::vector<int> ipiv_;
    int info_ = 0;
};

// (-Delta_h + shift) on a Dirichlet box grid, inverted exactly by a
// three-dimensional DST-I. Not thread-safe (owns FFT buffers).
class ShiftedLaplacianSolver {
public:
    ShiftedLaplacianSolver(const BoxGrid& grid, double shift);
    ~ShiftedLaplacianSolver();
    ShiftedLaplacianSolver(ShiftedLaplacianSolver&&) noexcept;
    ShiftedLaplacianSolver& operator=(ShiftedLaplacianSolver&&) noexcept;

    double shift() const;
    void set_shift(double shift);
    void solve(std::span<const double> rhs, std::span<double> out);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sps
