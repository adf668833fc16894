#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sps/errors.hpp"
#include "sps/mesh.hpp"
#include "support.hpp"

using namespace sps;
using testing::gaussian_field;
using testing::pi;
using testing::rel;

TEST_CASE("grid construction") {
    const auto g = make_radial_grid(40.0, 4096);
    CHECK(g.spacing() == 40.0 / 4096);
    CHECK(g.size() == 4095);
    CHECK(g.node(0) == doctest::Approx(g.spacing()));
    CHECK_THROWS_AS(make_radial_grid(0.0, 64), InvalidArgument);
    CHECK_THROWS_AS(make_radial_grid(-1.0, 64), InvalidArgument);
    CHECK_THROWS_AS(make_radial_grid(10.0, 15), InvalidArgument);

    const auto b = make_box_grid(2.0, 16);
    CHECK(b.size() == 4096);
    CHECK(b.coord(0) == doctest::Approx(-2.0 + 0.125));
    CHECK_THROWS_AS(make_box_grid(2.0, 24), InvalidArgument);
    CHECK_THROWS_AS(make_box_grid(2.0, 8), InvalidArgument);
    CHECK_THROWS_AS(make_box_grid(0.0, 16), InvalidArgument);
}

TEST_CASE("field invariants") {
    const Grid g = make_radial_grid(1.0, 16);
    CHECK_THROWS_AS(Field(g, std::vector<double>(14, 0.0)), InvalidArgument);
    std::vector<double> v(15, 1.0);
    v[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(Field(g, v), InvalidArgument);
    v[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(Field(g, v), InvalidArgument);
    CHECK_THROWS_AS(Field(g, std::vector<double>(15, 1.0), 0.0), InvalidArgument);
}

TEST_CASE("integrate") {
    SUBCASE("ball volume") {
        const double R = 3.0;
        const Grid g = make_radial_grid(R, 4096);
        const double vol = integrate(Field::from_radial(g, [](double) { return 1.0; }));
        CHECK(rel(vol, 4.0 / 3.0 * pi * R * R * R) < 1e-3);
    }
    SUBCASE("gaussian mass") {
        const Grid g = make_radial_grid(40.0, 4096);
        const Field u = gaussian_field(g, 1.0, 1.0);
        std::vector<double> sq(u.size());
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = u.values()[i] * u.values()[i];
        CHECK(std::abs(integrate(Field(g, sq)) - 1.0) < 1e-10);
    }
    SUBCASE("zero") {
        CHECK(integrate(Field::zeros(make_radial_grid(5.0, 64))) == 0.0);
        CHECK(integrate(Field::zeros(make_box_grid(5.0, 16))) == 0.0);
    }
    SUBCASE("box gaussian mass") {
        const Grid g = make_box_grid(8.0, 64);
        const Field u = gaussian_field(g, 1.0, 1.0);
        CHECK(std::abs(lp_norm(u, 2.0) - 1.0) < 1e-10);
    }
    SUBCASE("second order on compactly supported data") {
        // (1 - r^2)^3 on r < 1 has a kink in its third derivative at r = 1.
        auto f = [](double r) { return r < 1.0 ? std::pow(1.0 - r * r, 3) : 0.0; };
        const double exact = 4.0 * pi * 16.0 / 315.0;
        double prev = 0.0;
        for (std::size_t n : {64u, 128u, 256u, 512u}) {
            const double err = std::abs(integrate(Field::from_radial(make_radial_grid(1.7, n), f)) - exact);
            if (prev > 0.0) CHECK(std::log2(prev / err) > 1.9);
            prev = err;
        }
    }
}

TEST_CASE("lp_norm") {
    const Grid g = make_radial_grid(40.0, 4096);
    const Field u = gaussian_field(g, 0.7, 1.0);
    CHECK(std::abs(lp_norm(u, 2.0) - 0.7) < 1e-10);
    const Field v = gaussian_field(g, 1.0, 1.0);
    const double l4 = std::pow(pi, -3.0) * std::pow(pi / 2.0, 1.5);
    CHECK(rel(std::pow(lp_norm(v, 4.0), 4.0), l4) < 1e-10);
    CHECK(rel(std::pow(lp_norm(v, 3.0), 3.0), testing::gaussian_lq_pow(3.0, 1.0, 1.0)) < 1e-10);
    CHECK(lp_norm(v, std::numeric_limits<double>::infinity()) == doctest::Approx(std::pow(pi, -0.75)).epsilon(1e-4));
    CHECK(lp_norm(Field::zeros(g), 3.0) == 0.0);
    CHECK_THROWS_AS(lp_norm(v, 0.5), InvalidArgument);
}

TEST_CASE("grad_sq") {
    const Grid g = make_radial_grid(40.0, 4096);
    const Field u = gaussian_field(g, 1.0, 1.0);
    CHECK(std::abs(grad_sq(u) - 1.5) < 1e-4);

    const Grid p = make_box_grid(1.0, 16, BoxBoundary::periodic);
    CHECK(grad_sq(Field::from_radial(p, [](double) { return 3.0; })) == doctest::Approx(0.0));

    CHECK(rel(grad_sq(rescale(u, 2.0)), 4.0 * grad_sq(u)) < 1e-10);
}

TEST_CASE("apply_laplacian") {
    SUBCASE("radial eigenfunction") {
        const double R = 5.0;
        const std::size_t n = 256;
        const Grid g = make_radial_grid(R, n);
        const double h = R / n;
        const double k = 3.0 * pi / R;
        const Field u = Field::from_radial(g, [=](double r) { return std::sin(k * r) / r; });
        const Field lu = apply_laplacian(u);
        const double discrete = -4.0 / (h * h) * std::pow(std::sin(k * h / 2.0), 2);
        double err = 0.0, err_cont = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            err = std::max(err, std::abs(lu.values()[i] - discrete * u.values()[i]));
            err_cont = std::max(err_cont, std::abs(lu.values()[i] + k * k * u.values()[i]));
        }
        CHECK(err < 1e-9);
        CHECK(err_cont < 1e-3 * k * k * 2.0 * k);
    }
    SUBCASE("zero") {
        const Field z = apply_laplacian(Field::zeros(make_box_grid(1.0, 16)));
        for (double v : z.values()) CHECK(v == 0.0);
    }
    SUBCASE("gaussian second order, radial and box") {
        auto exact = [](double r) { return (r * r - 3.0) * std::exp(-r * r / 2.0); };
        auto max_err = [&](const Grid& g) {
            const Field u = Field::from_radial(g, [](double r) { return std::exp(-r * r / 2.0); });
            const Field lu = apply_laplacian(u);
            Discretization d(g);
            double e = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (d.radius()[i] > 5.0) continue;
                e = std::max(e, std::abs(lu.values()[i] - exact(d.radius()[i])));
            }
            return e;
        };
        const double r1 = max_err(make_radial_grid(10.0, 200));
        const double r2 = max_err(make_radial_grid(10.0, 400));
        CHECK(std::log2(r1 / r2) > 1.9);
        const double b1 = max_err(make_box_grid(7.0, 64));
        const double b2 = max_err(make_box_grid(7.0, 128));
        CHECK(std::log2(b1 / b2) > 1.8);
    }
}

TEST_CASE("adjoint consistency") {
    std::mt19937_64 rng(11);
    const std::vector<Grid> grids = {make_radial_grid(12.0, 1000), make_box_grid(6.0, 32),
                                     make_box_grid(6.0, 32, BoxBoundary::periodic)};
    for (const auto& g : grids) {
        CAPTURE(describe(g));
        for (int trial = 0; trial < 5; ++trial) {
            const Field u = testing::RandomSmooth(rng, 6.0, is_radial(g)).sample(g);
            const double lhs = -inner(apply_laplacian(u), u);
            const double gs = grad_sq(u);
            CHECK(std::abs(lhs - gs) <= 1e-12 * gs);
        }
    }
}

TEST_CASE("rescale") {
    const Grid g = make_radial_grid(40.0, 4096);
    const Field u = gaussian_field(g, 1.0, 1.0);
    for (double t : {0.5, 2.0, 7.0}) {
        const Field ut = rescale(u, t);
        CHECK(rel(lp_norm(ut, 2.0), lp_norm(u, 2.0)) < 1e-13);
        CHECK(rel(std::pow(lp_norm(ut, 4.0), 4.0), std::pow(t, 3.0) * std::pow(lp_norm(u, 4.0), 4.0)) < 1e-12);
        CHECK(ut.scale_factor() == doctest::Approx(t));
    }
    CHECK(rel(rescale(rescale(u, 2.0), 3.0).scale_factor(), 6.0) < 1e-15);
    CHECK_THROWS_AS(rescale(u, 0.0), InvalidArgument);
    CHECK_THROWS_AS(rescale(u, -1.0), InvalidArgument);

    const Grid b = make_box_grid(6.0, 32);
    const Field v = gaussian_field(b, 1.0, 1.0);
    const Field vt = rescale(v, 3.0);
    CHECK(rel(grad_sq(vt), 9.0 * grad_sq(v)) < 1e-12);
    CHECK(rel(lp_norm(vt, 2.0), lp_norm(v, 2.0)) < 1e-13);
}

TEST_CASE("virial potential term matches the gradient form") {
    // V = exp(-r^2/8): grad V . x = -(r^2/4) exp(-r^2/8).
    auto V = [](double r) { return std::exp(-r * r / 8.0); };
    auto W = [](double r) { return -0.25 * r * r * std::exp(-r * r / 8.0); };
    for (const Grid& g : {Grid(make_radial_grid(16.0, 1600)), Grid(make_box_grid(8.0, 128))}) {
        CAPTURE(describe(g));
        Discretization d(g);
        const Field u = gaussian_field(g, 1.0, 1.5);
        const Field v = Field::from_radial(g, V);
        const Field w = Field::from_radial(g, W);
        std::vector<double> wu(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) wu[i] = w.values()[i] * u.values()[i] * u.values()[i];
        const double lhs = d.virial_potential_term(v.values(), u.values());
        const double rhs = -d.integrate(wu);
        CHECK(std::abs(lhs - rhs) < 1e-8 * std::abs(rhs));
    }
}

TEST_CASE("tail mass") {
    const Grid g = make_radial_grid(10.0, 1000);
    CHECK(tail_mass(gaussian_field(g, 1.0, 0.5)) < 1e-30);
    CHECK(tail_mass(gaussian_field(g, 1.0, 4.0)) > 1e-3);
}

TEST_CASE("SPSF round trip") {
    std::mt19937_64 rng(5);
    for (const Grid& g : {Grid(make_radial_grid(7.5, 100)), Grid(make_box_grid(3.0, 16))}) {
        const Field u = rescale(testing::RandomSmooth(rng, 3.0, is_radial(g)).sample(g), 1.3);
        std::stringstream ss;
        write_field(ss, u);
        const Field back = read_field(ss);
        CHECK(back.data() == u.data());
        CHECK(back.scale_factor() == u.scale_factor());
        CHECK(compatible(back.grid(), u.grid()));
    }
    SUBCASE("header layout") {
        std::stringstream ss;
        write_field(ss, Field::zeros(make_radial_grid(1.0, 16)));
        const std::string s = ss.str();
        CHECK(s.substr(0, 4) == "SPSF");
        CHECK(s.size() == 4 + 4 + 1 + 8 + 8 + 8 + 15 * 8);
        CHECK(static_cast<unsigned char>(s[4]) == 1);
        CHECK(static_cast<unsigned char>(s[8]) == 0);
    }
    SUBCASE("bad input") {
        std::stringstream bad("SPSX....");
        CHECK_THROWS_AS(read_field(bad), FormatError);
        std::stringstream ss;
        write_field(ss, Field::zeros(make_radial_grid(1.0, 16)));
        std::stringstream cut(ss.str().substr(0, 40));
        CHECK_THROWS_AS(read_field(cut), FormatError);
    }
}
