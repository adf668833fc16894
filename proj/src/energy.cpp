#include "sps/energy.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>

#include "sps/errors.hpp"
#include "sps/kernels.hpp"

namespace sps {
namespace {

double abs_pow(double x, double p) {
    const double a = std::abs(x);
    if (p == 4.0) return a * a * a * a;
    return std::pow(a, p);
}

// |u|^(p-2) u
double nonlinear(double x, double p) {
    if (p == 4.0) return x * x * x;
    return std::pow(std::abs(x), p - 2.0) * x;
}

}  // namespace

void ProblemParams::validate() const {
    if (!(p > 10.0 / 3.0 && p < 6.0)) throw InvalidArgument("p must lie in the open interval (10/3, 6)");
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("a must be positive");
    if (!(s >= 0.5 && s <= 1.0)) throw InvalidArgument("s must lie in [1/2, 1]");
}

double level(const EnergyBreakdown& e, const ProblemParams& params) {
    return 0.5 * e.A + 0.5 * e.C + 0.25 * e.Bh - params.s * e.E / params.p;
}

double pohozaev(const EnergyBreakdown& e, const ProblemParams& params) {
    const double p = params.p;
    return e.A + 0.25 * e.Bh - 3.0 * (p - 2.0) * params.s / (2.0 * p) * e.E - 0.5 * e.D;
}

double lagrange_multiplier(const EnergyBreakdown& e, const ProblemParams& params) {
    if (!(e.mass > 0.0)) throw InvalidArgument("lagrange multiplier: zero mass");
    return (params.s * e.E - e.A - e.C - e.Bh) / e.mass;
}

// ---------------------------------------------------------------------------

EnergyModel::EnergyModel(const Grid& grid, const PotentialSpec& V, const ProblemParams& params,
                         const CoulombSolverConfig& cfg)
    : spec_(V), params_(params), coulomb_(grid, cfg) {
    params_.validate();
    spec_.validate();
    zero_potential_ = spec_.is_zero();
    const std::size_t n = node_count(grid);
    if (zero_potential_) {
        v_.assign(n, 0.0);
        w_.assign(n, 0.0);
        return;
    }
    v_ = potential_field(spec_, grid).data();
    if (spec_.has_gradient()) {
        w_ = Field::from_point(grid, [&](double x, double y, double z) { return spec_.virial(x, y, z); }).data();
    } else {
        w_.assign(n, 0.0);
        w_from_ibp_ = true;
    }
}

void EnergyModel::set_strength(double s) {
    ProblemParams p = params_;
    p.s = s;
    p.validate();
    params_ = p;
}

EnergyBreakdown EnergyModel::breakdown(std::span<const double> u, std::span<double> phi) {
    const auto& d = discretization();
    if (u.size() != d.size()) throw InvalidArgument("energy: field does not match the model grid");
    EnergyBreakdown e;
    std::vector<double> u2(u.size());
    kernels::mul(u, u, u2);
    const auto w = d.weights();
    e.mass = kernels::dot(w, u2);
    e.A = d.grad_sq(u);
    e.Bh = coulomb_.hartree(u, phi);
    if (!zero_potential_) {
        e.C = kernels::wdot(w, v_, u2);
        e.D = w_from_ibp_ ? -d.virial_potential_term(v_, u) : kernels::wdot(w, w_, u2);
    }
    double E = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) E += w[i] * abs_pow(u[i], params_.p);
    e.E = E;
    return e;
}

double EnergyModel::level(std::span<const double> u) { return sps::level(breakdown(u), params_); }

void EnergyModel::gradient(std::span<const double> u, std::span<const double> phi, std::span<double> out) const {
    const auto& d = discretization();
    d.laplacian(u, out);
    const double p = params_.p, s = params_.s;
    for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = -out[i] + (v_[i] + phi[i]) * u[i] - s * nonlinear(u[i], p);
}

double EnergyModel::virial_term(std::span<const double> u) const {
    if (zero_potential_) return 0.0;
    return discretization().virial_potential_term(v_, u);
}

// ---------------------------------------------------------------------------

EnergyBreakdown energy_breakdown(const Field& u, const PotentialSpec& V, const ProblemParams& params,
                                 const CoulombSolverConfig& cfg) {
    EnergyModel m(u.grid(), V, params, cfg);
    return m.breakdown(u.values());
}

double j_v(const Field& u, const PotentialSpec& V, const ProblemParams& params, const CoulombSolverConfig& cfg) {
    return level(energy_breakdown(u, V, params, cfg), params);
}

double pohozaev(const Field& u, const PotentialSpec& V, const ProblemParams& params, const CoulombSolverConfig& cfg) {
    return pohozaev(energy_breakdown(u, V, params, cfg), params);
}

double pohozaev_alt(const Field& u, const PotentialSpec& V, const ProblemParams& params,
                    const CoulombSolverConfig& cfg) {
    EnergyModel m(u.grid(), V, params, cfg);
    const auto e = m.breakdown(u.values());
    const double p = params.p;
    return e.A + 0.25 * e.Bh - 3.0 * (p - 2.0) * params.s / (2.0 * p) * e.E + 0.5 * m.virial_term(u.values());
}

double fiber_profile(const Field& u, const PotentialSpec& V, const ProblemParams& params, double t,
                     const CoulombSolverConfig& cfg) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("fiber profile: t must be positive");
    const auto e = energy_breakdown(u, PotentialSpec::zero(), params, cfg);
    double vterm = 0.0;
    if (!V.is_zero()) {
        const Field vt = Field::from_point(u.grid(), [&](double x, double y, double z) {
            return V.value(x / t, y / t, z / t);
        });
        std::vector<double> u2(u.size());
        kernels::mul(u.values(), u.values(), u2);
        vterm = kernels::wdot(Discretization(u.grid()).weights(), vt.values(), u2);
    }
    const double p = params.p;
    return 0.5 * t * t * e.A + 0.5 * vterm + 0.25 * t * e.Bh - params.s * std::pow(t, 1.5 * (p - 2.0)) * e.E / p;
}

double fiber_stationary(const EnergyBreakdown& e, const ProblemParams& params) {
    if (!(e.E > 0.0)) throw InvalidArgument("fiber stationary point: E = 0, the fiber has no finite maximizer");
    if (!(e.A > 0.0)) throw InvalidArgument("fiber stationary point: A = 0");
    const double p = params.p;
    const double k = 3.0 * (p - 2.0) * params.s / (2.0 * p) * e.E;
    const double gamma = 0.5 * (3.0 * p - 8.0);
    auto dpsi = [&](double t) { return t * e.A + 0.25 * e.Bh - k * std::pow(t, gamma); };
    double lo = 1e-3, hi = 1e3;
    int expansions = 0;
    while (dpsi(lo) <= 0.0 || dpsi(hi) >= 0.0) {
        if (++expansions > 60) throw SolverError("fiber stationary point: no sign change after 60 expansions");
        if (dpsi(lo) <= 0.0) lo *= 1e-1;
        if (dpsi(hi) >= 0.0) hi *= 10.0;
    }
    boost::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(
        dpsi, lo, hi, [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::abs(b); }, iters);
    return 0.5 * (root.first + root.second);
}

double fiber_stationary(const Field& u, const ProblemParams& params, const CoulombSolverConfig& cfg) {
    return fiber_stationary(energy_breakdown(u, PotentialSpec::zero(), params, cfg), params);
}

double lagrange_multiplier(const Field& u, const PotentialSpec& V, const ProblemParams& params,
                           const CoulombSolverConfig& cfg) {
    return lagrange_multiplier(energy_breakdown(u, V, params, cfg), params);
}

Field first_variation(const Field& u, const PotentialSpec& V, const ProblemParams& params,
                      const CoulombSolverConfig& cfg) {
    EnergyModel m(u.grid(), V, params, cfg);
    std::vector<double> phi(u.size()), out(u.size());
    m.breakdown(u.values(), phi);
    m.gradient(u.values(), phi, out);
    return Field(u.grid(), std::move(out), u.scale_factor());
}

double gn_quotient(const Field& u, double p) {
    if (!(p > 2.0 && p < 6.0)) throw InvalidArgument("gn quotient: p must lie in (2, 6)");
    const double l2 = lp_norm(u, 2.0);
    if (!(l2 > 0.0)) throw InvalidArgument("gn quotient: zero field");
    const double mu = 3.0 * (0.5 - 1.0 / p);
    return lp_norm(u, p) / (std::pow(grad_sq(u), 0.5 * mu) * std::pow(l2, 1.0 - mu));
}

double hls_quotient(const Field& u, const CoulombSolverConfig& cfg) {
    const double l = lp_norm(u, 12.0 / 5.0);
    if (!(l > 0.0)) throw InvalidArgument("hls quotient: zero field");
    return hartree_B(u, cfg) / std::pow(l, 4.0);
}

Field normalize_mass(const Field& u, double a) {
    const double l2 = lp_norm(u, 2.0);
    if (!(l2 > 0.0)) throw InvalidArgument("normalize: zero field");
    return scaled(u, a / l2);
}

}  // namespace sps
