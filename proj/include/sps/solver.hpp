#pragma once

// Normalized solutions (lambda, u) of
//   -Delta u + V u + lambda u + phi_u u = s |u|^(p-2) u,   ||u||_2 = a.
//
// ground_state: autonomous problem (V = 0) on a radial grid. Alternates a
// fiber projection u <- u^(t*) with a mass-preserving preconditioned descent
// step, then polishes with newton_refine.
//
// newton_refine: Newton on the bordered system F(u, lambda) = 0,
// ||u||^2 = a^2, including the nonlocal term 2 phi[u du] u. Inner solves are
// GMRES with a tridiagonal (radial) or DST shifted-Laplacian (box)
// preconditioner bordered by a Schur complement for lambda.
//
// continuation: legs over s, the domain radius r (radial grids, zero padding
// at fixed spacing) and the potential strength epsilon.

#include <string>
#include <vector>

#include "sps/coulomb.hpp"
#include "sps/energy.hpp"
#include "sps/mesh.hpp"
#include "sps/potentials.hpp"

namespace sps {

struct SolverOptions {
    double tol_newton = 1e-10;
    int max_newton = 50;
    // Preconditioned descent before Newton (ground_state only).
    double descent_step = 0.5;
    double descent_tol = 1e-4;
    int max_descent = 2000;
    int gmres_restart = 40;
    int gmres_max_iterations = 500;
    CoulombSolverConfig coulomb;
};

struct TraceEntry {
    std::string leg;
    double value = 0.0;
    double level = 0.0;
    double lambda = 0.0;
    double residual_norm = 0.0;
    bool converged = false;
};

struct Solution {
    Field u;
    double lambda = 0.0;
    ProblemParams params;
    PotentialSpec potential;
    EnergyBreakdown breakdown;
    double level = 0.0;
    // Relative residual of the bordered system (see residual_norm).
    double residual_norm = 0.0;
    double pohozaev_residual = 0.0;
    bool converged = false;
    int newton_iterations = 0;
    int descent_iterations = 0;
    std::vector<TraceEntry> homotopy_trace;
    std::string message;
};

enum class LegKind { s_strength, r_radius, v_strength };
const char* to_string(LegKind kind);

struct HomotopyLeg {
    LegKind kind = LegKind::s_strength;
    double from = 0.0;
    double to = 0.0;
    int steps = 1;
    // Explicit stations; when non-empty, from/to/steps are ignored.
    std::vector<double> values;

    std::vector<double> stations() const;
};

struct HomotopySchedule {
    std::vector<HomotopyLeg> legs;
    // s within [1/2, 1] and increasing, r increasing, epsilon within [0, 1].
    void validate() const;
};

// sqrt(||F||^2 + G^2) / (||Delta u|| + |lambda| ||u|| + ||phi u|| + ||V u||
// + s || |u|^(p-1) || + a^2) with quadrature L2 norms.
double residual_norm(EnergyModel& model, std::span<const double> u, double lambda);

// Interpolates u onto another grid (radial -> radial, radial -> box,
// box -> box); zero outside the source domain. Cubic in r*u on radial
// sources, trilinear on box sources.
Field resample(const Field& u, const Grid& target);
// u^t(x) = t^(3/2) u(t x) sampled on the grid of u.
Field fiber_project(const Field& u, double t);

// Gaussian of mass a^2 on the autonomous fiber maximum (closed-form
// energies), and its Lagrange multiplier.
double gaussian_seed_width(const ProblemParams& params);
double gaussian_lambda_estimate(const ProblemParams& params);
Field gaussian_seed(const ProblemParams& params, const Grid& grid);

// Radial grid with r_max = 16/sqrt(lambda) where lambda comes from a coarse
// autonomous solve.
RadialGrid auto_radial_grid(const ProblemParams& params, std::size_t n, const SolverOptions& opts = {});

Solution ground_state(const ProblemParams& params, const RadialGrid& grid, const SolverOptions& opts = {},
                      const Field* seed = nullptr);

// Throws InvalidArgument for a zero seed or a mass more than 10% off a^2,
// SolverError when the bordered Jacobian is numerically singular.
Solution newton_refine(const Field& u0, double lambda0, const PotentialSpec& V, const ProblemParams& params,
                       const SolverOptions& opts = {});

// Runs the legs in order from `seed` towards the potential V (scaled by the
// current epsilon). A failed step ends the run; the partial trace is kept.
Solution continuation(const Solution& seed, const HomotopySchedule& schedule, const PotentialSpec& V,
                      const SolverOptions& opts = {});

// max_t J_V(u^t) along the scaling fiber of u, located on a log ladder and
// refined to 1e-8 relative.
double mp_path_level(const Field& u, const PotentialSpec& V, const ProblemParams& params,
                     const CoulombSolverConfig& cfg = {});

// |u| rescaled to mass a^2.
Field enforce_nonneg(const Field& u, double a);

}  // namespace sps
