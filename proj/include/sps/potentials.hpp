#pragma once

// External potentials V, their derived fields W = grad(V).x and
// W~ = V |x|, norms, and checkers for the structural assumptions
// (V1), (V1)', (V2), (V3), (V4) together with the constants they involve.

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sps/mesh.hpp"

namespace sps {

enum class PotentialKind { zero, power_decay, piecewise_power, gaussian_well, angular_modulated, custom_table };

const char* to_string(PotentialKind kind);

// Radial profile given at increasing radii, linearly interpolated and zero
// beyond the last radius. `w` (values of r V'(r)) is optional.
struct RadialTable {
    std::vector<double> r;
    std::vector<double> v;
    std::vector<double> w;
};

struct PotentialSpec {
    PotentialKind kind = PotentialKind::zero;
    double c = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double q = 0.0;      // piecewise_power integrability exponent
    double sigma = 1.0;  // gaussian_well width
    double epsilon = 0.0;  // angular_modulated amplitude
    double strength = 1.0;  // overall multiplier (potential-strength homotopy)
    std::shared_ptr<const PotentialSpec> base;
    std::shared_ptr<const RadialTable> table;

    static PotentialSpec zero();
    // c (1 + |x|)^-alpha
    static PotentialSpec power_decay(double c, double alpha);
    // c (1 + |x|)^-alpha inside the unit ball, 2^-alpha c |x|^-beta outside
    static PotentialSpec piecewise_power(double c, double alpha, double beta, double q);
    // -c exp(-|x|^2 / sigma^2)
    static PotentialSpec gaussian_well(double c, double sigma);
    // (1 + epsilon x3/|x|) base(x)
    static PotentialSpec angular_modulated(const PotentialSpec& base, double epsilon);
    static PotentialSpec custom_table(RadialTable table);

    // Throws InvalidArgument on out-of-range parameters.
    void validate() const;
    bool radial() const { return kind != PotentialKind::angular_modulated; }
    bool has_gradient() const;
    bool is_zero() const;
    PotentialSpec with_strength(double s) const;
    std::string describe() const;

    double value(double x, double y, double z) const;
    std::array<double, 3> gradient(double x, double y, double z) const;
    // grad(V).x; available without the full gradient for radial kinds.
    double virial(double x, double y, double z) const;

    // Radial profile and r V'(r) for radial kinds (strength included).
    double profile(double r) const;
    double profile_virial(double r) const;
};

struct PotentialFields {
    Field V;
    Field W;
    Field W_tilde;
};

// Pointwise evaluation on the grid. Throws InvalidArgument for a non-radial
// potential on a radial grid and for a custom table without gradient data.
PotentialFields materialize(const PotentialSpec& spec, const Grid& grid);
// V alone (no gradient data required).
Field potential_field(const PotentialSpec& spec, const Grid& grid);

// R^3 norms computed from the analytic profile (grid independent): Gauss
// quadrature on log-spaced panels plus the closed-form power-law tail.
// Divergent norms are +infinity.
struct PotentialNorms {
    double q = 6.0;
    double v_inf = 0.0, v_q = 0.0, v_32 = 0.0;
    double w_inf = 0.0, w_q = 0.0;
    double wt_3 = 0.0;
};
PotentialNorms potential_norms(const PotentialSpec& spec, double q = 6.0);

struct AssumptionReport {
    std::string name;
    bool verdict = false;
    double margin = 0.0;
    std::vector<std::pair<std::string, double>> inputs;
    std::string note;
};

// S = 3 pi (Gamma(3/2)/Gamma(3))^(2/3)
double aubin_talenti();

// Gaussian lower bound for the best constant of H^1 in L^(2q/(q-1)):
// sup over widths of ||u||_{2q/(q-1)} / ||u||_{H^1}.
double embedding_constant(double q);
// C_q^-2 min{p/(3p-8), 1}
double lambda_pq(double p, double C_q);

AssumptionReport check_v1(const PotentialNorms& norms, double a, double c_a, double theta, double eta, double p);
// Conjunction of 3p-10-4 C_q^2 ||W||_q > 0 and the (V1)' smallness
// inequality involving theta_v1prime(||V||_q).
AssumptionReport check_v1prime(const PotentialNorms& norms, double p, double C_q);
AssumptionReport check_v4(const PotentialNorms& norms, double p);
// Sampled sign/decay check of V <= 0, V not identically 0, V -> 0.
AssumptionReport check_v3(const PotentialSpec& spec, std::uint64_t seed = 1);
// Heuristic consistency report: max over x in B_{delta|y|}(y) of
// |y|^alpha grad V(x).y for |y| in radii (increasing).
struct V2Report {
    AssumptionReport report;
    std::vector<double> radii;
    std::vector<double> maxima;
};
V2Report check_v2_sampled(const PotentialSpec& spec, const std::vector<double>& radii, double alpha, double delta,
                          std::uint64_t seed = 1);

double eta_tilde(double p, const PotentialNorms& norms);
double theta_v1prime(double t, double p, double q, double C_q);
double a_star(double p, double C_hat, double delta, double eta_t);

// Largest amplitude multiplier k such that k*V passes the check, given the
// norms of V itself (all checked inequalities are linear in k).
double v4_amplitude_threshold(const PotentialNorms& unit, double p);
double v1_amplitude_threshold(const PotentialNorms& unit, double a, double c_a, double theta, double eta);

}  // namespace sps
