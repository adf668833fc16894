#include "sps/solver.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "sps/errors.hpp"
#include "sps/kernels.hpp"
#include "sps/linalg.hpp"

namespace sps {
namespace {

constexpr double pi = std::numbers::pi;

double wnorm(std::span<const double> w, std::span<const double> x) { return std::sqrt(kernels::wdot(w, x, x)); }

// Residual pieces at (u, lambda).
struct State {
    std::vector<double> phi, F;
    EnergyBreakdown e;
    double G = 0.0;
    double rel = 0.0;
};

State evaluate(EnergyModel& m, std::span<const double> u, double lambda) {
    const std::size_t n = u.size();
    const auto w = m.discretization().weights();
    const auto& prm = m.params();
    State st;
    st.phi.resize(n);
    st.F.resize(n);
    st.e = m.breakdown(u, st.phi);
    m.gradient(u, st.phi, st.F);
    kernels::axpy(lambda, u, st.F);
    st.G = st.e.mass - prm.a * prm.a;

    std::vector<double> tmp(n);
    m.discretization().laplacian(u, tmp);
    double scale = wnorm(w, tmp) + std::abs(lambda) * std::sqrt(st.e.mass);
    kernels::mul(st.phi, u, tmp);
    scale += wnorm(w, tmp);
    if (m.has_potential()) {
        kernels::mul(m.V(), u, tmp);
        scale += wnorm(w, tmp);
    }
    for (std::size_t i = 0; i < n; ++i) tmp[i] = std::pow(std::abs(u[i]), prm.p - 1.0);
    scale += prm.s * wnorm(w, tmp) + prm.a * prm.a;
    st.rel = std::sqrt(kernels::wdot(w, st.F, st.F) + st.G * st.G) / scale;
    return st;
}

// Local (multiplicative) part of the Jacobian: V + lambda + phi - s(p-1)|u|^(p-2).
std::vector<double> local_coefficient(const EnergyModel& m, std::span<const double> u, std::span<const double> phi,
                                      double lambda) {
    const auto& prm = m.params();
    std::vector<double> c(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = std::abs(u[i]);
        const double nl = prm.p == 4.0 ? a * a : std::pow(a, prm.p - 2.0);
        c[i] = m.V()[i] + lambda + phi[i] - prm.s * (prm.p - 1.0) * nl;
    }
    return c;
}

// -Delta + diag(c) on a radial grid as a tridiagonal matrix acting on u.
Tridiagonal radial_operator(const Discretization& d, std::span<const double> c) {
    const std::size_t n = d.size();
    const double ih2 = 1.0 / (d.spacing() * d.spacing());
    const auto r = d.radius();
    std::vector<double> lo(n - 1), di(n), up(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        di[i] = 2.0 * ih2 + c[i];
        if (i + 1 < n) {
            up[i] = -ih2 * r[i + 1] / r[i];
            lo[i] = -ih2 * r[i] / r[i + 1];
        }
    }
    return Tridiagonal(std::move(lo), std::move(di), std::move(up));
}

// Bordered preconditioner [[P, u], [2 u^T W, 0]]^-1 by block elimination.
class BorderedPreconditioner {
public:
    BorderedPreconditioner(EnergyModel& m, std::span<const double> u, std::span<const double> c, double lambda,
                           ShiftedLaplacianSolver* box)
        : u_(u), w_(m.discretization().weights()), box_(box) {
        const std::size_t n = u.size();
        if (!box_) {
            tri_.emplace(radial_operator(m.discretization(), c));
            if (!tri_->ok()) {
                // Drop the nonlinear term if the full local operator is singular.
                std::vector<double> c2(n, std::max(lambda, 0.0));
                tri_.emplace(radial_operator(m.discretization(), c2));
            }
        }
        x2_.assign(u.begin(), u.end());
        base(x2_);
        den_ = 2.0 * kernels::wdot(w_, u_, x2_);
        const double ref = 2.0 * std::sqrt(kernels::wdot(w_, u_, u_) * kernels::wdot(w_, x2_, x2_));
        if (!(std::abs(den_) > 1e-13 * ref))
            throw SolverError("newton: bordered preconditioner is singular; restart along a homotopy");
    }

    void apply(std::span<const double> in, std::span<double> out) {
        const std::size_t n = u_.size();
        std::copy_n(in.begin(), n, out.begin());
        base(out.first(n));
        const double dl = (2.0 * kernels::wdot(w_, u_, out.first(n)) - in[n]) / den_;
        kernels::axpy(-dl, x2_, out.first(n));
        out[n] = dl;
    }

private:
    void base(std::span<double> x) {
        if (tri_) {
            tri_->solve(x);
        } else {
            scratch_.assign(x.begin(), x.end());
            box_->solve(scratch_, x);
        }
    }

    std::span<const double> u_;
    std::span<const double> w_;
    ShiftedLaplacianSolver* box_;
    std::optional<Tridiagonal> tri_;
    std::vector<double> x2_, scratch_;
    double den_ = 0.0;
};

// ---------------------------------------------------------------------------
// Interpolation

// r*u at r = j*h with the odd extension and zero beyond r_max.
double radial_w(const RadialGrid& g, std::span<const double> u, long j) {
    if (j < 0) return -radial_w(g, u, -j);
    if (j == 0 || j >= static_cast<long>(g.n)) return 0.0;
    return g.node(static_cast<std::size_t>(j - 1)) * u[static_cast<std::size_t>(j - 1)];
}

// Cubic Lagrange interpolation of r*u, returned as u(rho).
double radial_eval(const RadialGrid& g, std::span<const double> u, double rho) {
    if (rho >= g.r_max) return 0.0;
    const double h = g.spacing();
    const double s = rho / h;
    const long j = static_cast<long>(std::floor(s));
    const double f = s - static_cast<double>(j);
    const double wm = radial_w(g, u, j - 1), w0 = radial_w(g, u, j), w1 = radial_w(g, u, j + 1),
                 w2 = radial_w(g, u, j + 2);
    const double w = -f * (f - 1.0) * (f - 2.0) / 6.0 * wm + (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0 * w0 -
                     (f + 1.0) * f * (f - 2.0) / 2.0 * w1 + (f + 1.0) * f * (f - 1.0) / 6.0 * w2;
    if (rho == 0.0) return (radial_w(g, u, 1) - radial_w(g, u, -1)) / (2.0 * h);
    return w / rho;
}

double box_eval(const BoxGrid& g, std::span<const double> u, double x, double y, double z) {
    const double h = g.spacing();
    const double sx = (x + g.half_width) / h - 0.5, sy = (y + g.half_width) / h - 0.5,
                 sz = (z + g.half_width) / h - 0.5;
    const long ix = static_cast<long>(std::floor(sx)), iy = static_cast<long>(std::floor(sy)),
               iz = static_cast<long>(std::floor(sz));
    const double fx = sx - ix, fy = sy - iy, fz = sz - iz;
    const long n = static_cast<long>(g.n);
    auto at = [&](long i, long j, long k) {
        if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) return 0.0;
        return u[g.index(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k))];
    };
    double s = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                s += (a ? fx : 1 - fx) * (b ? fy : 1 - fy) * (c ? fz : 1 - fz) * at(ix + a, iy + b, iz + c);
    return s;
}

// Sum of w V(x/t) u^2 over the nodes.
double potential_moment(const PotentialSpec& V, const Grid& grid, std::span<const double> w,
                        std::span<const double> u2, double t) {
    double s = 0.0;
    if (const auto* r = std::get_if<RadialGrid>(&grid)) {
        for (std::size_t i = 0; i < u2.size(); ++i) s += w[i] * V.profile(r->node(i) / t) * u2[i];
    } else {
        const auto& b = std::get<BoxGrid>(grid);
        for (std::size_t i = 0; i < b.n; ++i)
            for (std::size_t j = 0; j < b.n; ++j)
                for (std::size_t k = 0; k < b.n; ++k) {
                    const std::size_t id = b.index(i, j, k);
                    s += w[id] * V.value(b.coord(i) / t, b.coord(j) / t, b.coord(k) / t) * u2[id];
                }
    }
    return s;
}

EnergyBreakdown gaussian_breakdown(const ProblemParams& prm, double sigma) {
    const double a = prm.a;
    EnergyBreakdown e;
    e.A = 1.5 * a * a / (sigma * sigma);
    e.Bh = std::pow(a, 4) * std::sqrt(2.0 / pi) / sigma;
    const double amp = a * std::pow(pi * sigma * sigma, -0.75);
    e.E = std::pow(amp, prm.p) * std::pow(2.0 * pi * sigma * sigma / prm.p, 1.5);
    e.mass = a * a;
    return e;
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(LegKind kind) {
    switch (kind) {
        case LegKind::s_strength: return "s";
        case LegKind::r_radius: return "r";
        case LegKind::v_strength: return "v";
    }
    return "?";
}

std::vector<double> HomotopyLeg::stations() const {
    if (!values.empty()) return values;
    std::vector<double> out;
    for (int k = 0; k <= steps; ++k) out.push_back(from + (to - from) * k / steps);
    return out;
}

void HomotopySchedule::validate() const {
    for (const auto& leg : legs) {
        if (leg.values.empty() && leg.steps < 1) throw InvalidArgument("homotopy: each leg needs at least one step");
        const auto st = leg.stations();
        for (std::size_t i = 0; i < st.size(); ++i) {
            const double v = st[i];
            if (!std::isfinite(v)) throw InvalidArgument("homotopy: non-finite station");
            switch (leg.kind) {
                case LegKind::s_strength:
                    if (v < 0.5 || v > 1.0) throw InvalidArgument("homotopy: s must lie in [1/2, 1]");
                    if (i > 0 && v < st[i - 1]) throw InvalidArgument("homotopy: s must increase");
                    break;
                case LegKind::r_radius:
                    if (!(v > 0.0)) throw InvalidArgument("homotopy: r must be positive");
                    if (i > 0 && v < st[i - 1]) throw InvalidArgument("homotopy: r must increase");
                    break;
                case LegKind::v_strength:
                    if (v < 0.0 || v > 1.0) throw InvalidArgument("homotopy: epsilon must lie in [0, 1]");
                    break;
            }
        }
    }
}

double residual_norm(EnergyModel& model, std::span<const double> u, double lambda) {
    return evaluate(model, u, lambda).rel;
}

Field resample(const Field& u, const Grid& target) {
    const auto vals = u.values();
    if (const auto* src = std::get_if<RadialGrid>(&u.grid())) {
        return Field::from_point(target, [&](double x, double y, double z) {
            return radial_eval(*src, vals, std::sqrt(x * x + y * y + z * z));
        });
    }
    if (is_radial(target)) throw InvalidArgument("resample: a box field cannot be mapped to a radial grid");
    const auto& src = std::get<BoxGrid>(u.grid());
    return Field::from_point(target, [&](double x, double y, double z) { return box_eval(src, vals, x, y, z); });
}

Field fiber_project(const Field& u, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("fiber projection: t must be positive");
    const auto vals = u.values();
    const double c = std::pow(t, 1.5);
    if (const auto* g = std::get_if<RadialGrid>(&u.grid())) {
        std::vector<double> out(vals.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * radial_eval(*g, vals, t * g->node(i));
        return Field(u.grid(), std::move(out));
    }
    const auto& g = std::get<BoxGrid>(u.grid());
    return Field::from_point(u.grid(),
                             [&](double x, double y, double z) { return c * box_eval(g, vals, t * x, t * y, t * z); });
}

double gaussian_seed_width(const ProblemParams& params) {
    params.validate();
    return 1.0 / fiber_stationary(gaussian_breakdown(params, 1.0), params);
}

double gaussian_lambda_estimate(const ProblemParams& params) {
    return lagrange_multiplier(gaussian_breakdown(params, gaussian_seed_width(params)), params);
}

Field gaussian_seed(const ProblemParams& params, const Grid& grid) {
    const double sigma = gaussian_seed_width(params);
    const double h = grid_spacing(grid);
    if (sigma < 3.0 * h) warn("seed: Gaussian width " + std::to_string(sigma) + " is under-resolved by the grid");
    const Field u = Field::from_radial(grid, [&](double r) { return std::exp(-r * r / (2.0 * sigma * sigma)); });
    return normalize_mass(u, params.a);
}

RadialGrid auto_radial_grid(const ProblemParams& params, std::size_t n, const SolverOptions& opts) {
    const double lg = gaussian_lambda_estimate(params);
    if (!(lg > 0.0))
        throw InvalidArgument("auto grid: the Gaussian estimate gives a nonpositive multiplier; a is too large");
    const auto coarse = make_radial_grid(20.0 / std::sqrt(lg), 1024);
    double lambda = lg;
    try {
        const Solution s = ground_state(params, coarse, opts);
        if (s.converged && s.lambda > 0.0) lambda = s.lambda;
    } catch (const SolverError&) {
    }
    return make_radial_grid(16.0 / std::sqrt(lambda), n);
}

// ---------------------------------------------------------------------------
// Newton

Solution newton_refine(const Field& u0, double lambda0, const PotentialSpec& V, const ProblemParams& params,
                       const SolverOptions& opts) {
    params.validate();
    const Grid& grid = u0.grid();
    if (const auto* b = std::get_if<BoxGrid>(&grid); b && b->boundary != BoxBoundary::dirichlet)
        throw InvalidArgument("newton: box grids must be Dirichlet");
    EnergyModel model(grid, V, params, opts.coulomb);
    const auto& disc = model.discretization();
    const auto w = disc.weights();
    const std::size_t n = u0.size();
    std::vector<double> u(u0.values().begin(), u0.values().end());
    const double mass0 = kernels::wdot(w, u, u);
    const double a2 = params.a * params.a;
    if (!(mass0 > 0.0)) throw InvalidArgument("newton: zero seed");
    if (std::abs(mass0 - a2) > 0.1 * a2) throw InvalidArgument("newton: seed mass is more than 10% away from a^2");
    if (!std::isfinite(lambda0)) throw InvalidArgument("newton: non-finite lambda seed");
    double lambda = lambda0;

    std::unique_ptr<ShiftedLaplacianSolver> box;
    if (const auto* b = std::get_if<BoxGrid>(&grid)) box = std::make_unique<ShiftedLaplacianSolver>(*b, 1.0);

    std::vector<double> gw(n + 1, 1.0);
    std::copy(w.begin(), w.end(), gw.begin());

    Solution sol;
    sol.params = params;
    sol.potential = V;
    State st = evaluate(model, u, lambda);
    int growth = 0;
    int it = 0;
    for (;; ++it) {
        if (st.rel <= opts.tol_newton) {
            sol.converged = true;
            break;
        }
        if (it >= opts.max_newton) {
            sol.message = "newton: iteration limit reached";
            break;
        }
        const auto c = local_coefficient(model, u, st.phi, lambda);
        if (box) box->set_shift(std::max(lambda, 10.0 / std::pow(std::get<BoxGrid>(grid).half_width, 2)));
        BorderedPreconditioner pre(model, u, c, lambda, box.get());

        std::vector<double> rho(n), psi(n);
        const LinearMap J = [&](std::span<const double> z, std::span<double> out) {
            disc.laplacian(z.first(n), out.first(n));
            kernels::mul(u, z.first(n), rho);
            model.coulomb().potential(rho, psi);
            for (std::size_t i = 0; i < n; ++i) out[i] = -out[i] + c[i] * z[i] + (2.0 * psi[i] + z[n]) * u[i];
            out[n] = 2.0 * kernels::wdot(w, u, z.first(n));
        };
        const LinearMap M = [&](std::span<const double> in, std::span<double> out) { pre.apply(in, out); };

        std::vector<double> rhs(n + 1), dz(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -st.F[i];
        rhs[n] = -st.G;
        GmresOptions go;
        go.rel_tol = std::clamp(st.rel, 1e-13, 1e-3);
        go.restart = opts.gmres_restart;
        go.max_iterations = opts.gmres_max_iterations;
        const auto lin = gmres(J, M, gw, rhs, dz, go);
        if (!lin.converged && lin.relative_residual > 0.9)
            throw SolverError("newton: linear solve made no progress; the bordered Jacobian looks singular, "
                              "restart along a homotopy");

        // Backtracking on the relative residual.
        double step = 1.0;
        std::vector<double> trial(n);
        std::optional<State> accepted;
        double lam_trial = lambda;
        for (int k = 0; k < 8; ++k, step *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + step * dz[i];
            lam_trial = lambda + step * dz[n];
            State ts = evaluate(model, trial, lam_trial);
            if (ts.rel < st.rel || k == 7) {
                const bool improved = ts.rel < st.rel;
                if (!improved) {
                    // No decrease: take the full step and count the growth.
                    for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + dz[i];
                    lam_trial = lambda + dz[n];
                    ts = evaluate(model, trial, lam_trial);
                }
                growth = improved ? 0 : growth + 1;
                accepted = std::move(ts);
                break;
            }
        }
        u.swap(trial);
        lambda = lam_trial;
        st = std::move(*accepted);
        if (growth >= 5) {
            sol.message = "newton: residual grew for 5 consecutive steps";
            ++it;
            break;
        }
    }
    sol.newton_iterations = it;
    sol.u = Field(grid, std::move(u));
    sol.lambda = lambda;
    sol.breakdown = st.e;
    sol.level = level(st.e, params);
    sol.pohozaev_residual = pohozaev(st.e, params);
    sol.residual_norm = st.rel;
    if (!std::isfinite(lambda) || !std::isfinite(st.rel)) {
        sol.converged = false;
        sol.message = "newton: non-finite iterate";
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Ground state

Solution ground_state(const ProblemParams& params, const RadialGrid& grid, const SolverOptions& opts,
                      const Field* seed) {
    params.validate();
    const Grid g = grid;
    Field u0 = seed ? normalize_mass(*seed, params.a) : gaussian_seed(params, g);
    if (seed && !compatible(seed->grid(), g)) throw InvalidArgument("ground state: seed is on a different grid");
    EnergyModel model(g, PotentialSpec::zero(), params, opts.coulomb);
    const auto& disc = model.discretization();
    const auto w = disc.weights();
    const std::size_t n = u0.size();

    std::vector<double> u(u0.values().begin(), u0.values().end());
    double lambda = 0.0, prec_lambda = 0.0, prev_level = 0.0;
    std::optional<Tridiagonal> prec;
    int stagnant = 0, it = 0;
    std::vector<double> phi(n), F(n), d(n);
    bool stalled = false;
    for (; it < opts.max_descent; ++it) {
        // Fiber projection onto P = 0.
        auto e = model.breakdown(u);
        const double ts = fiber_stationary(e, params);
        if (std::abs(ts - 1.0) > 1e-12) {
            u = normalize_mass(fiber_project(Field(g, u), ts), params.a).data();
        }
        const State st = evaluate(model, u, 0.0);
        e = st.e;
        lambda = lagrange_multiplier(e, params);
        for (std::size_t i = 0; i < n; ++i) F[i] = st.F[i] + lambda * u[i];
        const State chk = evaluate(model, u, lambda);
        if (chk.rel <= opts.descent_tol) break;
        const double lev = level(e, params);
        if (it > 0 && std::abs(lev - prev_level) < 1e-14 * std::abs(lev)) {
            if (++stagnant >= 50) {
                // The projection enforces the discrete P = 0, which a discrete
                // critical point only satisfies to O(h^2); on coarse grids the
                // descent levels off there. Close enough is left to Newton.
                stalled = chk.rel > 100.0 * opts.descent_tol;
                break;
            }
        } else {
            stagnant = 0;
        }
        prev_level = lev;

        const double shift = lambda > 0.0 ? lambda : std::abs(lambda) + 1.0 / (grid.r_max * grid.r_max);
        if (!prec || std::abs(shift - prec_lambda) > 0.05 * prec_lambda) {
            std::vector<double> c(n, shift);
            prec.emplace(radial_operator(disc, c));
            prec_lambda = shift;
        }
        d = F;
        prec->solve(d);
        const double proj = kernels::wdot(w, d, u) / kernels::wdot(w, u, u);
        kernels::axpy(-proj, u, d);
        kernels::axpy(-opts.descent_step, d, u);
        u = normalize_mass(Field(g, u), params.a).data();
    }

    Solution sol;
    if (stalled) {
        const State st = evaluate(model, u, lambda);
        sol.u = Field(g, u);
        sol.lambda = lambda;
        sol.params = params;
        sol.breakdown = st.e;
        sol.level = level(st.e, params);
        sol.pohozaev_residual = pohozaev(st.e, params);
        sol.residual_norm = st.rel;
        sol.message = "ground state: descent stagnated";
    } else {
        sol = newton_refine(Field(g, u), lambda, PotentialSpec::zero(), params, opts);
    }
    sol.descent_iterations = it;
    double sum = 0.0;
    for (double v : sol.u.values()) sum += v;
    if (sum < 0.0) sol.u = scaled(sol.u, -1.0);
    return sol;
}

// ---------------------------------------------------------------------------
// Continuation

Solution continuation(const Solution& seed, const HomotopySchedule& schedule, const PotentialSpec& V,
                      const SolverOptions& opts) {
    schedule.validate();
    V.validate();
    Solution cur = seed;
    if (schedule.legs.empty()) return cur;
    ProblemParams params = seed.params;
    double eps = 1.0;
    for (const auto& leg : schedule.legs)
        if (leg.kind == LegKind::v_strength) {
            eps = leg.stations().front();
            break;
        }
    std::vector<TraceEntry> trace = seed.homotopy_trace;
    for (const auto& leg : schedule.legs) {
        for (double v : leg.stations()) {
            Field u = cur.u;
            switch (leg.kind) {
                case LegKind::s_strength: params.s = v; break;
                case LegKind::v_strength: eps = v; break;
                case LegKind::r_radius: {
                    const auto* rg = std::get_if<RadialGrid>(&u.grid());
                    if (!rg) throw InvalidArgument("homotopy: the r leg needs a radial grid");
                    const double h = rg->spacing();
                    const auto nn = static_cast<std::size_t>(std::llround(v / h));
                    if (nn < rg->n) throw InvalidArgument("homotopy: r leg must not shrink the domain");
                    std::vector<double> vals(nn - 1, 0.0);
                    std::copy(u.values().begin(), u.values().end(), vals.begin());
                    u = Field(make_radial_grid(static_cast<double>(nn) * h, nn), std::move(vals));
                    break;
                }
            }
            const PotentialSpec Ve = V.with_strength(V.strength * eps);
            Solution next = newton_refine(u, cur.lambda, Ve, params, opts);
            TraceEntry te{to_string(leg.kind), v, next.level, next.lambda, next.residual_norm, next.converged};
            trace.push_back(te);
            next.descent_iterations = 0;
            if (!next.converged) {
                std::ostringstream os;
                os << "homotopy: " << to_string(leg.kind) << " leg failed at " << v;
                if (!next.message.empty()) os << " (" << next.message << ")";
                next.message = os.str();
                next.homotopy_trace = trace;
                return next;
            }
            cur = std::move(next);
        }
    }
    cur.homotopy_trace = trace;
    return cur;
}

// ---------------------------------------------------------------------------

double mp_path_level(const Field& u, const PotentialSpec& V, const ProblemParams& params,
                     const CoulombSolverConfig& cfg) {
    const auto e = energy_breakdown(u, PotentialSpec::zero(), params, cfg);
    const Discretization d(u.grid());
    std::vector<double> u2(u.size());
    kernels::mul(u.values(), u.values(), u2);
    const bool zero = V.is_zero();
    auto f = [&](double t) {
        const double vt = zero ? 0.0 : potential_moment(V, u.grid(), d.weights(), u2, t);
        return 0.5 * t * t * e.A + 0.5 * vt + 0.25 * t * e.Bh -
               params.s * std::pow(t, 1.5 * (params.p - 2.0)) * e.E / params.p;
    };
    const int m = 241;
    std::vector<double> ts(m), fs(m);
    for (int k = 0; k < m; ++k) {
        ts[k] = std::exp(std::log(1e-2) + (std::log(1e2) - std::log(1e-2)) * k / (m - 1));
        fs[k] = f(ts[k]);
    }
    const int k = static_cast<int>(std::max_element(fs.begin(), fs.end()) - fs.begin());
    const double lo = ts[std::max(k - 1, 0)], hi = ts[std::min(k + 1, m - 1)];
    const auto best = boost::math::tools::brent_find_minima([&](double t) { return -f(t); }, lo, hi, 50);
    return std::max(-best.second, fs[k]);
}

Field enforce_nonneg(const Field& u, double a) { return normalize_mass(abs(u), a); }

}  // namespace sps
