#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "sps/coulomb.hpp"
#include "sps/errors.hpp"
#include "support.hpp"

using namespace sps;
using testing::gaussian_field;
using testing::pi;
using testing::rel;

namespace {

// Closed-form potential and self-energy of the normalized Gaussian.
double gaussian_phi(double r, double a, double sigma) { return a * a * std::erf(r / sigma) / r; }
double gaussian_B(double a, double sigma) { return std::pow(a, 4) * std::sqrt(2.0 / pi) / sigma; }

// Independent nested oracle: B = 4 pi int rho(r) phi(r) r^2 dr with phi from
// the shell formula, both integrals by composite Simpson on a fine mesh.
double nested_B(double a, double sigma) {
    const int n = 20000;
    const double R = 12.0 * sigma, h = R / n;
    std::vector<double> r(n + 1), rho(n + 1), in(n + 1, 0.0), out(n + 1, 0.0);
    for (int i = 0; i <= n; ++i) {
        r[i] = i * h;
        const double u = testing::gaussian(r[i], a, sigma);
        rho[i] = u * u;
    }
    // Cumulative Simpson via pairs of trapezoid-corrected cubic segments.
    for (int i = 1; i <= n; ++i) {
        const double rm = 0.5 * (r[i - 1] + r[i]);
        const double um = testing::gaussian(rm, a, sigma);
        in[i] = in[i - 1] + h / 6.0 * (r[i - 1] * r[i - 1] * rho[i - 1] + 4.0 * rm * rm * um * um + r[i] * r[i] * rho[i]);
    }
    for (int i = n - 1; i >= 0; --i) {
        const double rm = 0.5 * (r[i] + r[i + 1]);
        const double um = testing::gaussian(rm, a, sigma);
        out[i] = out[i + 1] + h / 6.0 * (r[i] * rho[i] + 4.0 * rm * um * um + r[i + 1] * rho[i + 1]);
    }
    double b = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double phi = 4.0 * pi * (in[i] / r[i] + out[i]);
        const double phi0 = i > 1 ? 4.0 * pi * (in[i - 1] / r[i - 1] + out[i - 1]) : 4.0 * pi * out[0];
        b += 0.5 * h * (phi0 * rho[i - 1] * r[i - 1] * r[i - 1] + phi * rho[i] * r[i] * r[i]);
    }
    return 4.0 * pi * b;
}

}  // namespace

TEST_CASE("gaussian closed forms agree with the nested oracle") {
    CHECK(rel(nested_B(1.0, 1.0), gaussian_B(1.0, 1.0)) < 1e-7);
    CHECK(rel(nested_B(0.6, 2.0), gaussian_B(0.6, 2.0)) < 1e-7);
}

TEST_CASE("radial potential of a gaussian") {
    const double a = 0.8, sigma = 1.0;
    const Grid g = make_radial_grid(40.0 * sigma, 4096);
    const Field u = gaussian_field(g, a, sigma);
    const Field phi = solve_phi(u);
    const Discretization d(g);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = d.radius()[i];
        err = std::max(err, std::abs(phi.values()[i] - gaussian_phi(r, a, sigma)));
    }
    CHECK(err < 1e-8 * 2.0 * a * a / (sigma * std::sqrt(pi)));
    // phi(0) = 2 a^2 / (sigma sqrt(pi)) read off at the first node.
    CHECK(rel(phi.values()[0], 2.0 * a * a / (sigma * std::sqrt(pi))) < 1e-4);
    CHECK(rel(hartree_B(u), gaussian_B(a, sigma)) < 1e-6);
}

TEST_CASE("shell theorem for a uniform ball") {
    const double a = 1.3, R = 2.0;
    const Grid g = make_radial_grid(8.0, 4096);
    const double rho0 = a * a / (4.0 / 3.0 * pi * R * R * R);
    const Field u = Field::from_radial(g, [=](double r) { return r <= R ? std::sqrt(rho0) : 0.0; });
    const Field phi = solve_phi(u);
    const Discretization d(g);
    const double mass = lp_norm(u, 2.0) * lp_norm(u, 2.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = d.radius()[i];
        if (r < R + 0.1) continue;
        CHECK(rel(phi.values()[i], mass / r) < 1e-10);
    }
    CHECK(rel(mass, a * a) < 2e-3);
}

TEST_CASE("zero density and scaling") {
    const Grid g = make_radial_grid(10.0, 512);
    CHECK(hartree_B(Field::zeros(g)) == 0.0);
    const Field u = gaussian_field(g, 1.0, 1.0);
    for (double t : {0.3, 2.0, 5.0}) CHECK(rel(hartree_B(rescale(u, t)), t * hartree_B(u)) < 1e-12);
}

TEST_CASE("nonnegativity on random fields") {
    std::mt19937_64 rng(3);
    const Grid g = make_radial_grid(10.0, 800);
    for (int trial = 0; trial < 10; ++trial) {
        const Field u = testing::RandomSmooth(rng, 5.0, true).sample(g);
        const Field phi = solve_phi(u);
        for (double v : phi.values()) CHECK(v >= 0.0);
        CHECK(hartree_B(u) >= 0.0);
    }
}

TEST_CASE("discrete kernel is symmetric in the quadrature inner product") {
    std::mt19937_64 rng(9);
    for (const Grid& g : {Grid(make_radial_grid(10.0, 700)), Grid(make_box_grid(5.0, 16))}) {
        CAPTURE(describe(g));
        CoulombOperator op(g);
        const Discretization& d = op.discretization();
        const Field f = testing::RandomSmooth(rng, 3.0, is_radial(g)).sample(g);
        const Field q = testing::RandomSmooth(rng, 3.0, is_radial(g)).sample(g);
        std::vector<double> kf(f.size()), kq(f.size());
        op.potential(f.values(), kf);
        op.potential(q.values(), kq);
        const double lhs = d.inner(kf, q.values());
        const double rhs = d.inner(f.values(), kq);
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs));
    }
}

// The 1/|x| kernel gives -Laplace(phi) = 4 pi u^2.
TEST_CASE("radial Poisson residual is second order") {
    auto residual = [](std::size_t n) {
        const Grid g = make_radial_grid(12.0, n);
        const Field u = gaussian_field(g, 1.0, 1.0);
        const Field lphi = apply_laplacian(solve_phi(u));
        double s = 0.0;
        const Discretization d(g);
        // The last node's stencil sees w(r_max) = 0 rather than phi's Coulomb tail.
        for (std::size_t i = 0; i + 1 < u.size(); ++i) {
            const double e = lphi.values()[i] + 4.0 * pi * u.values()[i] * u.values()[i];
            s += d.weights()[i] * e * e;
        }
        return std::sqrt(s);
    };
    const double r1 = residual(256), r2 = residual(512), r3 = residual(1024);
    CHECK(std::log2(r1 / r2) > 1.8);
    CHECK(std::log2(r2 / r3) > 1.8);
}

TEST_CASE("box convolution against the radial oracle") {
    const double a = 1.0, sigma = 1.0;
    const Grid box = make_box_grid(6.0, 64);
    const Field u = gaussian_field(box, a, sigma);
    const Field phi = solve_phi(u);
    const Discretization d(box);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double want = gaussian_phi(d.radius()[i], a, sigma);
        err = std::max(err, std::abs(phi.values()[i] - want));
        scale = std::max(scale, want);
    }
    CHECK(err / scale < 1e-5);
    CHECK(rel(hartree_B(u), gaussian_B(a, sigma)) < 1e-6);

    SUBCASE("periodic convolution is less accurate but usable") {
        const Field p1 = solve_phi(u, CoulombSolverConfig{0.0, 1});
        double e1 = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) e1 = std::max(e1, std::abs(p1.values()[i] - phi.values()[i]));
        CHECK(e1 / scale < 0.5);
        CHECK(e1 > err);
    }
}

TEST_CASE("box scaling") {
    const Grid box = make_box_grid(6.0, 32);
    const Field u = gaussian_field(box, 1.0, 1.0);
    const double b = hartree_B(u);
    CHECK(rel(hartree_B(rescale(u, 3.0)), 3.0 * b) < 1e-10);
}

TEST_CASE("configuration checks and truncation warning") {
    const BoxGrid box = make_box_grid(4.0, 16);
    CHECK_THROWS_AS(validate(CoulombSolverConfig{0.0, 3}, box), InvalidArgument);
    CHECK_THROWS_AS(validate(CoulombSolverConfig{1.0, 2}, box), InvalidArgument);
    CHECK_THROWS_AS(validate(CoulombSolverConfig{30.0, 2}, box), InvalidArgument);
    CHECK_NOTHROW(validate(CoulombSolverConfig{20.0, 2}, box));

    std::vector<std::string> seen;
    auto old = set_warning_handler([&](const std::string& m) { seen.push_back(m); });
    hartree_B(gaussian_field(Grid(box), 1.0, 0.4));
    CHECK(seen.empty());
    hartree_B(gaussian_field(Grid(box), 1.0, 2.0));
    CHECK(seen.size() == 1);
    set_warning_handler(old);
}
