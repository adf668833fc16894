#pragma once

// Diagnostics for computed solutions, the mass sweep and the scaling-law
// suite.
//
// Energy relations checked by diagnostics(), in the notation of energy.hpp:
//   level:   2J - (A + C + Bh/2 - 2 s E/p)                 = 0
//   virial:  A + Bh/4 - 3(p-2) s E/(2p) - D/2             = 0
//   lambda:  A + C + Bh + lambda mass - s E               = 0
// The first and last are algebraic closures of the discrete solve and hold
// to roundoff. The virial relation is the Pohozaev identity, which the
// discrete solution only satisfies up to O(h^2).

#include <array>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sps/solver.hpp"

namespace sps {

struct DiagnosticsTolerances {
    double energy_rel = 1e-8;      // level and lambda closures, relative to the energy scale
    double pohozaev_rel = 1e-6;    // |P| / A
    double ibp_rel = 1e-8;         // ibp_gap / (A + |C|)
    double positivity = 1e-10;     // min u >= -positivity * max|u|
    double tail_rel = 0.2;         // |tail_slope + sqrt(lambda)| / sqrt(lambda)
    double tail_window_lo = 0.6;   // fit window as fractions of r_max (or L)
    double tail_window_hi = 0.9;
};

struct DiagnosticsReport {
    double level = 0.0;
    double lambda = 0.0;
    double pohozaev_residual = 0.0;
    double pohozaev_alt_residual = 0.0;
    double ibp_gap = 0.0;
    bool lambda_positive = false;
    // level, virial and lambda relations (see above)
    std::array<double, 3> energy_system_residuals{};
    double energy_scale = 0.0;  // A + E + |C| + Bh + |lambda| mass
    double min_value = 0.0;
    double max_value = 0.0;
    // Least-squares slope of log u over the fit window; NaN if fewer than
    // three positive samples fall inside it.
    double tail_slope = 0.0;
    double moser_ratio = 0.0;
    double phi_bound = 0.0;  // max|phi| + max|grad phi|
    double c_a_ref = 0.0;
    double level_vs_ca = 0.0;

    bool energy_ok = false;     // level and lambda closures
    bool pohozaev_ok = false;
    bool ibp_ok = false;
    bool positive = false;
    bool tail_ok = false;

    DiagnosticsTolerances tolerances;

    // Flat key/value pairs in a fixed order.
    std::vector<std::pair<std::string, std::string>> entries() const;
};

// Throws InvalidArgument for a non-converged solution.
DiagnosticsReport diagnostics(const Solution& sol, const PotentialSpec& V, double c_a_ref,
                              const DiagnosticsTolerances& tol = {}, const CoulombSolverConfig& cfg = {});

void write_key_values(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv);
// Shortest round-trip decimal form of x.
std::string format_number(double x);

struct SweepRow {
    double a = 0.0;
    double c_a = 0.0;
    double lambda = 0.0;
    double A = 0.0;
    double Bh = 0.0;
    double E = 0.0;
    double pohozaev_residual = 0.0;
    bool converged = false;
    std::string message;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    // c_a nonincreasing over the converged rows.
    bool monotone = true;

    // Recomputes `monotone` from the rows.
    bool check_monotone() const;

    void write_csv(std::ostream& out) const;
};

struct SweepGrid {
    std::size_t n = 2048;
    // Fixed radius when positive; otherwise auto_radial_grid per a.
    double r_max = 0.0;
};

// a_list must be nondecreasing (duplicates allowed). Solves run on
// up to `threads` workers, each with its own workspace.
SweepTable sweep_mass(const std::vector<double>& a_list, const ProblemParams& params, const SweepGrid& grid,
                      const SolverOptions& opts = {}, unsigned threads = 1);

struct ScalingCheck {
    std::string law;
    double t = 0.0;
    double relative_error = 0.0;
    bool pass = false;
};

struct ScalingReport {
    std::vector<ScalingCheck> checks;
    bool pass = true;
    // Name of the first violated law, empty on success.
    std::string violated;
};

// Checks mass, gradient, L^p, Hartree and the GN and HLS quotients between u
// and ut, with t taken from the scale factors (ut.scale_factor / u.scale_factor).
ScalingReport scaling_identity_check(const Field& u, const Field& ut, double p = 4.0, double tol = 1e-8);
// Runs scaling_identity_check on rescale(u, t) for t in {0.3, 1, 3}.
ScalingReport scaling_identity_suite(const Field& u, double p = 4.0, double tol = 1e-8);

}  // namespace sps
