#pragma once

// Energy functional, Pohozaev functionals, fiber maps and the scalar
// quantities the solver and diagnostics are written in:
//
//   A = ||grad u||^2, Bh = int phi_u u^2, C = int V u^2,
//   D = int (grad V . x) u^2, E = ||u||_p^p, mass = ||u||_2^2,
//   J = A/2 + C/2 + Bh/4 - s E/p.
//
// The Pohozaev functional is the fiber derivative d/dt J(u^t) at t = 1, so
// its potential term carries the coefficient 1/2 on D.

#include <span>
#include <vector>

#include "sps/coulomb.hpp"
#include "sps/mesh.hpp"
#include "sps/potentials.hpp"

namespace sps {

struct ProblemParams {
    double p = 4.0;
    double a = 1.0;
    double s = 1.0;  // nonlinearity strength

    // Throws InvalidArgument unless 10/3 < p < 6, a > 0 and 1/2 <= s <= 1.
    void validate() const;
};

struct EnergyBreakdown {
    double A = 0.0;
    double Bh = 0.0;
    double C = 0.0;
    double D = 0.0;
    double E = 0.0;
    double mass = 0.0;
};

double level(const EnergyBreakdown& e, const ProblemParams& params);
double pohozaev(const EnergyBreakdown& e, const ProblemParams& params);
// (s E - A - C - Bh) / mass; throws for zero mass.
double lagrange_multiplier(const EnergyBreakdown& e, const ProblemParams& params);

// Per-grid evaluation context: quadrature, Coulomb operator and the sampled
// V and W. Not thread-safe (the Coulomb operator owns FFT buffers).
class EnergyModel {
public:
    EnergyModel(const Grid& grid, const PotentialSpec& V, const ProblemParams& params,
                const CoulombSolverConfig& cfg = {});

    const Grid& grid() const { return coulomb_.grid(); }
    const Discretization& discretization() const { return coulomb_.discretization(); }
    const ProblemParams& params() const { return params_; }
    void set_strength(double s);
    const PotentialSpec& potential() const { return spec_; }
    std::span<const double> V() const { return v_; }
    std::span<const double> W() const { return w_; }
    bool has_potential() const { return !zero_potential_; }
    CoulombOperator& coulomb() { return coulomb_; }

    // Fills phi (if non-empty) with phi_u.
    EnergyBreakdown breakdown(std::span<const double> u, std::span<double> phi = {});
    double level(std::span<const double> u);
    // -Delta u + V u + phi u - s |u|^(p-2) u, the first variation of J in the
    // quadrature inner product; phi must hold phi_u.
    void gradient(std::span<const double> u, std::span<const double> phi, std::span<double> out) const;
    // int V (3 u^2 + 2 u grad u . x), equal to -D up to the divergence theorem.
    double virial_term(std::span<const double> u) const;

private:
    PotentialSpec spec_;
    ProblemParams params_;
    CoulombOperator coulomb_;
    std::vector<double> v_, w_;
    bool zero_potential_ = true;
    bool w_from_ibp_ = false;
};

EnergyBreakdown energy_breakdown(const Field& u, const PotentialSpec& V, const ProblemParams& params,
                                 const CoulombSolverConfig& cfg = {});
double j_v(const Field& u, const PotentialSpec& V, const ProblemParams& params, const CoulombSolverConfig& cfg = {});
double pohozaev(const Field& u, const PotentialSpec& V, const ProblemParams& params,
                const CoulombSolverConfig& cfg = {});
// A + Bh/4 - 3(p-2)s/(2p) E + (1/2) int V (3 u^2 + 2 u grad u . x)
double pohozaev_alt(const Field& u, const PotentialSpec& V, const ProblemParams& params,
                    const CoulombSolverConfig& cfg = {});
// J(u^t) = t^2 A/2 + (1/2) int V(x/t) u^2 + t Bh/4 - s t^(3(p-2)/2) E/p without
// building u^t. Throws for t <= 0.
double fiber_profile(const Field& u, const PotentialSpec& V, const ProblemParams& params, double t,
                     const CoulombSolverConfig& cfg = {});
// Unique t > 0 with t A + Bh/4 - 3(p-2)s/(2p) t^((3p-8)/2) E = 0 (V = 0).
// Throws InvalidArgument when E = 0 or A = 0.
double fiber_stationary(const EnergyBreakdown& e, const ProblemParams& params);
double fiber_stationary(const Field& u, const ProblemParams& params, const CoulombSolverConfig& cfg = {});
double lagrange_multiplier(const Field& u, const PotentialSpec& V, const ProblemParams& params,
                           const CoulombSolverConfig& cfg = {});
// The first variation of J as a field (see EnergyModel::gradient).
Field first_variation(const Field& u, const PotentialSpec& V, const ProblemParams& params,
                      const CoulombSolverConfig& cfg = {});

// ||u||_p / (||grad u||^mu ||u||_2^(1-mu)), mu = 3(1/2 - 1/p)
double gn_quotient(const Field& u, double p);
// B(u) / ||u||_{12/5}^4
double hls_quotient(const Field& u, const CoulombSolverConfig& cfg = {});

// u scaled to ||u||_2 = a; throws for the zero field.
Field normalize_mass(const Field& u, double a);

}  // namespace sps
