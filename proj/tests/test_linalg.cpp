#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sps/errors.hpp"
#include "sps/linalg.hpp"

using namespace sps;

namespace {

struct Dense {
    std::size_t n;
    std::vector<double> a;
    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
    void apply(std::span<const double> x, std::span<double> y) const {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * x[j];
            y[i] = s;
        }
    }
};

Dense random_matrix(std::mt19937_64& rng, std::size_t n, double diag) {
    std::normal_distribution<double> nd;
    Dense m{n, std::vector<double>(n * n)};
    for (auto& v : m.a) v = nd(rng) / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) m(i, i) += diag * (1.0 + static_cast<double>(i % 7));
    return m;
}

double residual(const Dense& m, std::span<const double> x, std::span<const double> b) {
    std::vector<double> y(b.size());
    m.apply(x, y);
    double r = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        r += (y[i] - b[i]) * (y[i] - b[i]);
        nb += b[i] * b[i];
    }
    return std::sqrt(r / nb);
}

}  // namespace

TEST_CASE("gmres solves nonsymmetric systems") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    const std::size_t n = 120;
    const Dense m = random_matrix(rng, n, 2.0);
    std::vector<double> b(n), x(n, 0.0);
    for (auto& v : b) v = nd(rng);
    const LinearMap A = [&](std::span<const double> in, std::span<double> out) { m.apply(in, out); };
    const LinearMap I = [](std::span<const double> in, std::span<double> out) { std::copy(in.begin(), in.end(), out.begin()); };

    SUBCASE("no preconditioner, full restart") {
        const auto r = gmres(A, I, {}, b, x, {1e-12, 200, 500});
        CHECK(r.converged);
        CHECK(residual(m, x, b) < 1e-11);
    }
    SUBCASE("short restarts still converge") {
        const auto r = gmres(A, I, {}, b, x, {1e-10, 5, 2000});
        CHECK(r.converged);
        CHECK(residual(m, x, b) < 1e-9);
    }
    SUBCASE("Jacobi preconditioner cuts iterations") {
        const auto plain = gmres(A, I, {}, b, x, {1e-10, 200, 500});
        std::vector<double> x2(n, 0.0);
        const LinearMap J = [&](std::span<const double> in, std::span<double> out) {
            for (std::size_t i = 0; i < n; ++i) out[i] = in[i] / m(i, i);
        };
        const auto pre = gmres(A, J, {}, b, x2, {1e-10, 200, 500});
        CHECK(pre.converged);
        CHECK(pre.iterations < plain.iterations);
        CHECK(residual(m, x2, b) < 1e-9);
    }
    SUBCASE("weighted inner product") {
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(10.0, -6.0 * static_cast<double>(i) / n);
        const auto r = gmres(A, I, w, b, x, {1e-12, 200, 500});
        CHECK(r.converged);
        std::vector<double> y(n);
        m.apply(x, y);
        double rw = 0.0, bw = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rw += w[i] * (y[i] - b[i]) * (y[i] - b[i]);
            bw += w[i] * b[i] * b[i];
        }
        CHECK(std::sqrt(rw / bw) < 1e-11);
    }
    SUBCASE("iteration cap reports non-convergence") {
        const auto r = gmres(A, I, {}, b, x, {1e-14, 3, 3});
        CHECK_FALSE(r.converged);
        CHECK(r.iterations == 3);
        CHECK(r.relative_residual == doctest::Approx(residual(m, x, b)).epsilon(1e-8));
    }
    SUBCASE("zero right-hand side") {
        std::vector<double> z(n, 0.0);
        std::fill(x.begin(), x.end(), 3.0);
        CHECK(gmres(A, I, {}, z, x).converged);
        for (double v : x) CHECK(v == 0.0);
    }
}

TEST_CASE("tridiagonal LU") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    for (std::size_t n : {1u, 2u, 3u, 50u}) {
        std::vector<double> lo(n - 1), di(n), up(n - 1), b(n);
        for (auto& v : lo) v = nd(rng);
        for (auto& v : up) v = nd(rng);
        for (auto& v : di) v = nd(rng);  // indefinite, pivoting needed
        for (auto& v : b) v = nd(rng);
        const Tridiagonal t(lo, di, up);
        REQUIRE(t.ok());
        std::vector<double> x = b;
        t.solve(x);
        for (std::size_t i = 0; i < n; ++i) {
            double y = di[i] * x[i];
            if (i > 0) y += lo[i - 1] * x[i - 1];
            if (i + 1 < n) y += up[i] * x[i + 1];
            CHECK(y == doctest::Approx(b[i]).epsilon(1e-9));
        }
    }
    const Tridiagonal singular({1.0}, {1.0, 1.0}, {1.0});
    CHECK_FALSE(singular.ok());
    std::vector<double> r{1.0, 2.0};
    CHECK_THROWS_AS(singular.solve(r), SolverError);
    CHECK_THROWS_AS(Tridiagonal({1.0, 2.0}, {1.0, 1.0}, {1.0}), InvalidArgument);
}

TEST_CASE("shifted Laplacian inverse") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    const BoxGrid g = make_box_grid(2.0, 16);
    const Discretization d(g);
    for (double shift : {0.0, 3.5, 400.0}) {
        ShiftedLaplacianSolver s(g, shift);
        std::vector<double> b(g.size()), x(g.size()), lap(g.size());
        for (auto& v : b) v = nd(rng);
        s.solve(b, x);
        d.laplacian(x, lap);
        double err = 0.0, nb = 0.0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double y = -lap[i] + shift * x[i];
            err = std::max(err, std::abs(y - b[i]));
            nb = std::max(nb, std::abs(b[i]));
        }
        CHECK(err < 1e-10 * nb);
    }
    CHECK_THROWS_AS(ShiftedLaplacianSolver(make_box_grid(2.0, 16, BoxBoundary::periodic), 1.0), InvalidArgument);
}
