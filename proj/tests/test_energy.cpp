#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sps/energy.hpp"
#include "sps/errors.hpp"
#include "support.hpp"

using namespace sps;
using testing::gaussian_field;
using testing::pi;
using testing::rel;

namespace {

const ProblemParams p4{4.0, 1.0, 1.0};

Field negate(const Field& u) { return scaled(u, -1.0); }

// Fourth-order central difference of f at x.
template <class F>
double d4(F&& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

Field add(const Field& u, const Field& v, double eps) {
    std::vector<double> out(u.values().begin(), u.values().end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += eps * v.values()[i];
    return Field(u.grid(), std::move(out));
}

}  // namespace

TEST_CASE("problem parameters") {
    CHECK_NOTHROW(p4.validate());
    CHECK_THROWS_AS((ProblemParams{6.0, 1.0, 1.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((ProblemParams{10.0 / 3.0, 1.0, 1.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((ProblemParams{4.0, 0.0, 1.0}.validate()), InvalidArgument);
    CHECK_THROWS_AS((ProblemParams{4.0, 1.0, 0.4}.validate()), InvalidArgument);
}

TEST_CASE("Gaussian breakdown") {
    const Grid g = make_radial_grid(16.0, 4096);
    const Field u = gaussian_field(g, 1.0, 1.0);
    const auto e = energy_breakdown(u, PotentialSpec::zero(), p4);
    CHECK(e.C == 0.0);
    CHECK(e.D == 0.0);
    CHECK(rel(e.A, 1.5) < 1e-5);
    CHECK(rel(e.Bh, std::sqrt(2.0 / pi)) < 1e-6);
    CHECK(rel(e.E, std::pow(pi, -3.0) * std::pow(pi / 2.0, 1.5)) < 1e-8);
    CHECK(rel(e.mass, 1.0) < 1e-10);
    CHECK(j_v(u, PotentialSpec::zero(), p4) == doctest::Approx(0.5 * e.A + 0.25 * e.Bh - e.E / 4.0).epsilon(1e-14));

    SUBCASE("mass projection") {
        const Field v = normalize_mass(scaled(u, 3.7), 0.5);
        CHECK(energy_breakdown(v, PotentialSpec::zero(), p4).mass == doctest::Approx(0.25).epsilon(1e-12));
        CHECK_THROWS_AS(normalize_mass(Field::zeros(g), 1.0), InvalidArgument);
    }
}

TEST_CASE("level is even and vanishes at zero") {
    std::mt19937_64 rng(3);
    const Grid g = make_box_grid(6.0, 32);
    const auto V = PotentialSpec::angular_modulated(PotentialSpec::gaussian_well(1.0, 2.0), 0.3);
    for (int i = 0; i < 3; ++i) {
        const Field u = testing::RandomSmooth(rng, 6.0, false).sample(g);
        CHECK(j_v(negate(u), V, p4) == doctest::Approx(j_v(u, V, p4)).epsilon(1e-14));
        CHECK(j_v(abs(u), V, p4) == doctest::Approx(j_v(u, V, p4)).epsilon(1e-12));
    }
    CHECK(j_v(Field::zeros(g), V, p4) == 0.0);
}

TEST_CASE("Pohozaev is the fiber derivative") {
    std::mt19937_64 rng(8);
    const std::vector<PotentialSpec> potentials{PotentialSpec::zero(), PotentialSpec::power_decay(0.7, 0.5),
                                                PotentialSpec::gaussian_well(1.2, 1.5)};
    for (const ProblemParams& params : {p4, ProblemParams{3.6, 1.0, 0.7}, ProblemParams{5.2, 1.0, 1.0}}) {
        for (const auto& V : potentials) {
            const Grid g = make_radial_grid(12.0, 1200);
            const Field u = testing::RandomSmooth(rng, 12.0, true).sample(g);
            const double fd = d4([&](double t) { return fiber_profile(u, V, params, t); }, 1.0, 1e-3);
            const double P = pohozaev(u, V, params);
            const auto e = energy_breakdown(u, V, params);
            CHECK(std::abs(fd - P) <= 1e-8 * (e.A + e.E + e.Bh + std::abs(e.D)));
        }
    }
    SUBCASE("box, non-radial potential") {
        const Grid g = make_box_grid(6.0, 32);
        const auto V = PotentialSpec::angular_modulated(PotentialSpec::power_decay(1.0, 0.6), -0.4);
        const Field u = testing::RandomSmooth(rng, 6.0, false).sample(g);
        const double fd = d4([&](double t) { return fiber_profile(u, V, p4, t); }, 1.0, 1e-3);
        const auto e = energy_breakdown(u, V, p4);
        CHECK(std::abs(fd - pohozaev(u, V, p4)) <= 1e-8 * (e.A + e.E + e.Bh + std::abs(e.D)));
    }
}

TEST_CASE("Pohozaev without potential is P(u)") {
    const Grid g = make_radial_grid(12.0, 1000);
    const Field u = gaussian_field(g, 0.8, 1.3);
    const ProblemParams params{4.5, 0.8, 1.0};
    const auto e = energy_breakdown(u, PotentialSpec::zero(), params);
    const double P = e.A + e.Bh / 4.0 - 3.0 * (4.5 - 2.0) / (2.0 * 4.5) * e.E;
    CHECK(pohozaev(u, PotentialSpec::zero(), params) == doctest::Approx(P).epsilon(1e-14));
    CHECK(pohozaev_alt(u, PotentialSpec::zero(), params) == pohozaev(u, PotentialSpec::zero(), params));
}

TEST_CASE("both Pohozaev forms agree by the divergence theorem") {
    SUBCASE("radial Gaussian well") {
        const Grid g = make_radial_grid(16.0, 4000);
        const Field u = gaussian_field(g, 1.0, 1.2);
        const auto V = PotentialSpec::gaussian_well(1.5, 1.0);
        const auto e = energy_breakdown(u, V, p4);
        CHECK(std::abs(pohozaev_alt(u, V, p4) - pohozaev(u, V, p4)) <= 1e-8 * (e.A + std::abs(e.C)));
        // D by the closed form: int 2c (r^2/s^2) e^{-r^2/s^2} u^2 with u^2 Gaussian.
        const double sig = 1.2, amp2 = std::pow(pi * sig * sig, -1.5);
        const double b = 1.0 + 1.0 / (sig * sig);  // exponent coefficient of r^2
        const double D = 2.0 * 1.5 * amp2 * 4.0 * pi * (3.0 * std::sqrt(pi) / (8.0 * std::pow(b, 2.5)));
        CHECK(rel(e.D, D) < 1e-8);
    }
    SUBCASE("box, compactly supported table") {
        const Grid g = make_box_grid(8.0, 64);
        RadialTable t;
        for (int i = 0; i <= 400; ++i) {
            const double r = 3.0 * i / 400.0;
            const double b = r < 3.0 ? std::pow(1.0 - (r / 3.0) * (r / 3.0), 4) : 0.0;
            const double db = r < 3.0 ? -8.0 * (r / 3.0) * (r / 3.0) * std::pow(1.0 - (r / 3.0) * (r / 3.0), 3) : 0.0;
            t.r.push_back(r);
            t.v.push_back(-b);
            t.w.push_back(-db);
        }
        const auto V = PotentialSpec::custom_table(t);
        const Field u = gaussian_field(g, 1.0, 1.5);
        const auto e = energy_breakdown(u, V, p4);
        CHECK(std::abs(pohozaev_alt(u, V, p4) - pohozaev(u, V, p4)) <= 1e-4 * (e.A + std::abs(e.C)));
    }
}

TEST_CASE("fiber profile") {
    std::mt19937_64 rng(4);
    const Grid g = make_radial_grid(12.0, 1500);
    const Field u = testing::RandomSmooth(rng, 12.0, true).sample(g);
    const auto zero = PotentialSpec::zero();
    CHECK(fiber_profile(u, zero, p4, 1.0) == doctest::Approx(j_v(u, zero, p4)).epsilon(1e-14));
    for (double t : {0.5, 2.0, 3.0}) {
        const double a = fiber_profile(u, zero, p4, t);
        CHECK(std::abs(a - j_v(rescale(u, t), zero, p4)) <= 1e-10 * std::max(1.0, std::abs(a)));
    }
    SUBCASE("box") {
        const Grid b = make_box_grid(6.0, 32);
        const Field v = testing::RandomSmooth(rng, 6.0, false).sample(b);
        for (double t : {0.5, 2.0}) {
            const double a = fiber_profile(v, zero, p4, t);
            CHECK(std::abs(a - j_v(rescale(v, t), zero, p4)) <= 1e-10 * std::max(1.0, std::abs(a)));
        }
    }
    SUBCASE("unbounded below") {
        double prev = fiber_profile(u, zero, p4, 50.0);
        for (double t = 60.0; t < 1e4; t *= 1.5) {
            const double v = fiber_profile(u, zero, p4, t);
            CHECK(v < prev);
            prev = v;
        }
        CHECK(prev < 0.0);
    }
    CHECK_THROWS_AS(fiber_profile(u, zero, p4, 0.0), InvalidArgument);
    CHECK_THROWS_AS(fiber_profile(u, zero, p4, -1.0), InvalidArgument);
}

TEST_CASE("fiber stationary point") {
    SUBCASE("closed form without Hartree term") {
        EnergyBreakdown e;
        e.A = 1.7;
        e.E = 2.9;
        e.mass = 1.0;
        CHECK(fiber_stationary(e, p4) == doctest::Approx(4.0 * 1.7 / (3.0 * 2.9)).epsilon(1e-12));
    }
    SUBCASE("projection and reparametrization") {
        const Grid g = make_radial_grid(14.0, 2000);
        const Field u = gaussian_field(g, 1.0, 1.0);
        const double ts = fiber_stationary(u, p4);
        const Field v = rescale(u, ts);
        CHECK(fiber_stationary(v, p4) == doctest::Approx(1.0).epsilon(1e-10));
        const auto e = energy_breakdown(v, PotentialSpec::zero(), p4);
        CHECK(std::abs(pohozaev(e, p4)) <= 1e-10 * e.A);
        for (double tau : {0.5, 2.0})
            CHECK(fiber_stationary(rescale(u, tau), p4) == doctest::Approx(ts / tau).epsilon(1e-10));
        // psi' changes sign at t*
        const double eps = 1e-3 * ts;
        CHECK(fiber_profile(u, PotentialSpec::zero(), p4, ts) > fiber_profile(u, PotentialSpec::zero(), p4, ts + eps));
        CHECK(fiber_profile(u, PotentialSpec::zero(), p4, ts) > fiber_profile(u, PotentialSpec::zero(), p4, ts - eps));
    }
    SUBCASE("no nonlinear term") {
        EnergyBreakdown e;
        e.A = 1.0;
        CHECK_THROWS_AS(fiber_stationary(e, p4), InvalidArgument);
    }
}

TEST_CASE("Lagrange multiplier") {
    EnergyBreakdown e;
    e.A = 1.0;
    e.Bh = 0.5;
    e.C = 0.2;
    e.E = 3.0;
    e.mass = 1.0;
    CHECK(lagrange_multiplier(e, p4) == doctest::Approx(1.3).epsilon(1e-15));
    e.mass = 0.0;
    CHECK_THROWS_AS(lagrange_multiplier(e, p4), InvalidArgument);

    SUBCASE("agrees with -DJ[u][u]/mass") {
        std::mt19937_64 rng(21);
        const Grid g = make_box_grid(6.0, 32);
        const auto V = PotentialSpec::gaussian_well(0.8, 1.0);
        const Field u = testing::RandomSmooth(rng, 6.0, false).sample(g);
        const Field dj = first_variation(u, V, p4);
        const auto b = energy_breakdown(u, V, p4);
        CHECK(lagrange_multiplier(u, V, p4) == doctest::Approx(-inner(dj, u) / b.mass).epsilon(1e-10));
    }

    SUBCASE("exact discrete solution") {
        // Choose u and lambda, then the tabulated potential that makes the
        // residual vanish at every node.
        const Grid g = make_radial_grid(6.0, 600);
        const Field u = gaussian_field(g, 1.0, 1.0);
        const double lambda0 = 0.7;
        const Field lap = apply_laplacian(u);
        const Field phi = solve_phi(u);
        RadialTable t;
        const Discretization disc(g);
        const auto r = disc.radius();
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double ui = u.values()[i];
            t.r.push_back(r[i]);
            t.v.push_back((lap.values()[i] - phi.values()[i] * ui + ui * ui * ui) / ui - lambda0);
        }
        const auto V = PotentialSpec::custom_table(t);
        const Field res = first_variation(u, V, p4);
        for (std::size_t i = 0; i < u.size(); ++i)
            CHECK(std::abs(res.values()[i] + lambda0 * u.values()[i]) <= 1e-9 * std::max(1.0, std::abs(t.v[i])));
        CHECK(lagrange_multiplier(u, V, p4) == doctest::Approx(lambda0).epsilon(1e-12));
    }
}

TEST_CASE("first variation matches directional derivatives") {
    std::mt19937_64 rng(17);
    struct Case {
        Grid grid;
        PotentialSpec V;
        ProblemParams params;
    };
    const std::vector<Case> cases{
        {make_radial_grid(12.0, 800), PotentialSpec::power_decay(0.6, 0.5), ProblemParams{4.0, 1.0, 1.0}},
        {make_radial_grid(12.0, 800), PotentialSpec::gaussian_well(1.0, 2.0), ProblemParams{3.8, 1.0, 0.6}},
        {make_box_grid(6.0, 32), PotentialSpec::angular_modulated(PotentialSpec::gaussian_well(1.0, 1.5), 0.4),
         ProblemParams{5.0, 1.0, 1.0}}};
    for (const auto& c : cases) {
        const double extent = is_radial(c.grid) ? 12.0 : 6.0;
        const Field u = testing::RandomSmooth(rng, extent, is_radial(c.grid)).sample(c.grid);
        const Field dj = first_variation(u, c.V, c.params);
        for (int k = 0; k < 10; ++k) {
            const Field v = testing::RandomSmooth(rng, extent, is_radial(c.grid)).sample(c.grid);
            const double fd = d4([&](double eps) { return j_v(add(u, v, eps), c.V, c.params); }, 0.0, 1e-3);
            const double an = inner(dj, v);
            CHECK(std::abs(fd - an) <= 1e-6 * std::abs(an));
        }
    }
}

TEST_CASE("scale-invariant quotients") {
    std::mt19937_64 rng(2);
    const Grid g = make_radial_grid(12.0, 1200);
    const Field u = testing::RandomSmooth(rng, 12.0, true).sample(g);
    for (double p : {3.5, 4.0, 5.5}) {
        const double q = gn_quotient(u, p);
        for (double t : {0.5, 3.0}) CHECK(std::abs(gn_quotient(rescale(u, t), p) - q) <= 1e-8 * q);
        CHECK(gn_quotient(scaled(u, 4.2), p) == doctest::Approx(q).epsilon(1e-12));
    }
    const double h = hls_quotient(u);
    for (double t : {0.5, 3.0}) CHECK(std::abs(hls_quotient(rescale(u, t)) - h) <= 1e-8 * h);
    CHECK(hls_quotient(scaled(u, 0.3)) == doctest::Approx(h).epsilon(1e-12));
    CHECK_THROWS_AS(gn_quotient(Field::zeros(g), 4.0), InvalidArgument);
    CHECK_THROWS_AS(hls_quotient(Field::zeros(g)), InvalidArgument);

    SUBCASE("Gaussian HLS closed form") {
        const double sigma = 0.9;
        const Field v = gaussian_field(make_radial_grid(14.0, 8000), 1.0, sigma);
        const double l = std::pow(testing::gaussian_lq_pow(2.4, 1.0, sigma), 1.0 / 2.4);
        CHECK(rel(hls_quotient(v), std::sqrt(2.0 / pi) / sigma / std::pow(l, 4.0)) < 1e-6);
    }
}
