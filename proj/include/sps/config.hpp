#pragma once

// Run configuration: an INI-like text with sections [problem], [potential],
// [grid], [solver] and [output], `key = value` lines and `#` comments.
//
//   [problem]    p, a, s
//   [potential]  kind = zero | power_decay | piecewise_power | gaussian_well
//                       | angular_modulated | custom_table
//                c, alpha, beta, q, sigma, epsilon, strength,
//                base (kind of the modulated potential; its parameters are
//                the same keys), r / v / w (whitespace-separated table)
//   [grid]       kind = radial | box, n, r_max (radial; "auto" allowed),
//                L (box half width), boundary = dirichlet | periodic
//   [solver]     tol_newton, max_newton, descent_step, descent_tol,
//                max_descent, gmres_restart, gmres_max_iterations,
//                legs = space-separated "kind:from:to:steps" or
//                "kind=v1,v2,..." with kind in s, r, v
//   [output]     directory, emit_svg, seed
//
// Unknown sections and keys, duplicate keys and invalid values are errors
// carrying the line number.

#include <cstdint>
#include <optional>
#include <string>

#include "sps/errors.hpp"
#include "sps/mesh.hpp"
#include "sps/potentials.hpp"
#include "sps/solver.hpp"

namespace sps {

struct ConfigError : InvalidArgument {
    ConfigError(int line, const std::string& message);
    int line = 0;
};

struct GridConfig {
    bool radial = true;
    std::size_t n = 2048;
    // Radial radius; nullopt = auto_radial_grid.
    std::optional<double> r_max;
    double half_width = 1.0;
    BoxBoundary boundary = BoxBoundary::dirichlet;
};

struct OutputConfig {
    std::string directory = "sps_out";
    bool emit_svg = false;
    std::uint64_t seed = 1;
};

struct RunConfig {
    ProblemParams params;
    PotentialSpec potential;
    GridConfig grid;
    SolverOptions solver;
    HomotopySchedule schedule;
    OutputConfig output;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Parses one homotopy leg ("v:0:1:4" or "r=8,12,16").
HomotopyLeg parse_leg(const std::string& text);

}  // namespace sps
