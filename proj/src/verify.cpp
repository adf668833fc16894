#include "sps/verify.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>
#include <tuple>

#include "sps/errors.hpp"

namespace sps {
namespace {

double slope_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double tail_slope(const Field& u, double lo, double hi) {
    std::vector<double> xs, ys;
    const auto v = u.values();
    if (const auto* r = std::get_if<RadialGrid>(&u.grid())) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double ri = r->node(i);
            if (ri >= lo * r->r_max && ri <= hi * r->r_max && v[i] > 0.0) {
                xs.push_back(ri);
                ys.push_back(std::log(v[i]));
            }
        }
    } else {
        const auto& b = std::get<BoxGrid>(u.grid());
        for (std::size_t i = 0; i < b.n; ++i)
            for (std::size_t j = 0; j < b.n; ++j)
                for (std::size_t k = 0; k < b.n; ++k) {
                    const double ri = std::hypot(b.coord(i), b.coord(j), b.coord(k));
                    const double x = v[b.index(i, j, k)];
                    if (ri >= lo * b.half_width && ri <= hi * b.half_width && x > 0.0) {
                        xs.push_back(ri);
                        ys.push_back(std::log(x));
                    }
                }
    }
    if (xs.size() < 3) return std::numeric_limits<double>::quiet_NaN();
    return slope_fit(xs, ys);
}

// max|phi| + max|grad phi| with centered differences (one-sided at the ends).
double phi_bound(const Grid& grid, std::span<const double> phi) {
    double m = 0.0, g = 0.0;
    for (double x : phi) m = std::max(m, std::abs(x));
    const double h = grid_spacing(grid);
    if (is_radial(grid)) {
        const std::size_t n = phi.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double left = i == 0 ? phi[0] : phi[i - 1];  // phi'(0) = 0 by symmetry
            const double right = i + 1 < n ? phi[i + 1] : phi[i];
            const double span = (i == 0 || i + 1 == n) ? h : 2.0 * h;
            g = std::max(g, std::abs(right - left) / span);
        }
    } else {
        const auto& b = std::get<BoxGrid>(grid);
        for (std::size_t i = 1; i + 1 < b.n; ++i)
            for (std::size_t j = 1; j + 1 < b.n; ++j)
                for (std::size_t k = 1; k + 1 < b.n; ++k) {
                    const double gx = phi[b.index(i + 1, j, k)] - phi[b.index(i - 1, j, k)];
                    const double gy = phi[b.index(i, j + 1, k)] - phi[b.index(i, j - 1, k)];
                    const double gz = phi[b.index(i, j, k + 1)] - phi[b.index(i, j, k - 1)];
                    g = std::max(g, std::sqrt(gx * gx + gy * gy + gz * gz) / (2.0 * h));
                }
    }
    return m + g;
}

std::string flag(bool b) { return b ? "1" : "0"; }

}  // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_key_values(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& kv) {
    for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

std::vector<std::pair<std::string, std::string>> DiagnosticsReport::entries() const {
    const auto& t = tolerances;
    return {
        {"level", format_number(level)},
        {"lambda", format_number(lambda)},
        {"lambda_positive", flag(lambda_positive)},
        {"pohozaev_residual", format_number(pohozaev_residual)},
        {"pohozaev_alt_residual", format_number(pohozaev_alt_residual)},
        {"ibp_gap", format_number(ibp_gap)},
        {"energy_residual_level", format_number(energy_system_residuals[0])},
        {"energy_residual_virial", format_number(energy_system_residuals[1])},
        {"energy_residual_lambda", format_number(energy_system_residuals[2])},
        {"energy_scale", format_number(energy_scale)},
        {"min_value", format_number(min_value)},
        {"max_value", format_number(max_value)},
        {"tail_slope", format_number(tail_slope)},
        {"moser_ratio", format_number(moser_ratio)},
        {"phi_bound", format_number(phi_bound)},
        {"c_a_ref", format_number(c_a_ref)},
        {"level_vs_ca", format_number(level_vs_ca)},
        {"energy_ok", flag(energy_ok)},
        {"pohozaev_ok", flag(pohozaev_ok)},
        {"ibp_ok", flag(ibp_ok)},
        {"positive", flag(positive)},
        {"tail_ok", flag(tail_ok)},
        {"tol_energy_rel", format_number(t.energy_rel)},
        {"tol_pohozaev_rel", format_number(t.pohozaev_rel)},
        {"tol_ibp_rel", format_number(t.ibp_rel)},
        {"tol_positivity", format_number(t.positivity)},
        {"tol_tail_rel", format_number(t.tail_rel)},
        {"tail_window", format_number(t.tail_window_lo) + " " + format_number(t.tail_window_hi)},
    };
}

DiagnosticsReport diagnostics(const Solution& sol, const PotentialSpec& V, double c_a_ref,
                              const DiagnosticsTolerances& tol, const CoulombSolverConfig& cfg) {
    if (!sol.converged) throw InvalidArgument("diagnostics: solution is not converged");
    if (!(tol.tail_window_lo < tol.tail_window_hi)) throw InvalidArgument("diagnostics: empty tail window");
    const ProblemParams& prm = sol.params;
    EnergyModel m(sol.u.grid(), V, prm, cfg);
    const auto u = sol.u.values();
    std::vector<double> phi(u.size());
    const EnergyBreakdown e = m.breakdown(u, phi);
    const double p = prm.p, s = prm.s;

    DiagnosticsReport r;
    r.tolerances = tol;
    r.level = level(e, prm);
    r.lambda = sol.lambda;
    r.lambda_positive = sol.lambda > 0.0;
    r.pohozaev_residual = pohozaev(e, prm);
    r.pohozaev_alt_residual = e.A + 0.25 * e.Bh - 3.0 * (p - 2.0) * s / (2.0 * p) * e.E + 0.5 * m.virial_term(u);
    r.ibp_gap = std::abs(r.pohozaev_residual - r.pohozaev_alt_residual);
    r.energy_system_residuals = {2.0 * sol.level - (e.A + e.C + 0.5 * e.Bh - 2.0 * s * e.E / p), r.pohozaev_residual,
                                 e.A + e.C + e.Bh + sol.lambda * e.mass - s * e.E};
    r.energy_scale = e.A + e.E + std::abs(e.C) + e.Bh + std::abs(sol.lambda) * e.mass;
    r.min_value = *std::min_element(u.begin(), u.end());
    r.max_value = 0.0;
    for (double x : u) r.max_value = std::max(r.max_value, std::abs(x));
    r.tail_slope = tail_slope(sol.u, tol.tail_window_lo, tol.tail_window_hi);
    const double l6 = lp_norm(sol.u, 6.0);
    r.moser_ratio = r.max_value / std::max(l6, std::pow(l6, 1.0 + (p - 2.0) / (6.0 - p)));
    r.phi_bound = phi_bound(sol.u.grid(), phi);
    r.c_a_ref = c_a_ref;
    r.level_vs_ca = r.level - c_a_ref;

    r.energy_ok = std::abs(r.energy_system_residuals[0]) <= tol.energy_rel * r.energy_scale &&
                  std::abs(r.energy_system_residuals[2]) <= tol.energy_rel * r.energy_scale;
    r.pohozaev_ok = std::abs(r.pohozaev_residual) <= tol.pohozaev_rel * e.A;
    r.ibp_ok = r.ibp_gap <= tol.ibp_rel * (e.A + std::abs(e.C));
    r.positive = r.min_value >= -tol.positivity * r.max_value;
    const double k = sol.lambda > 0.0 ? std::sqrt(sol.lambda) : 0.0;
    r.tail_ok = k > 0.0 && std::isfinite(r.tail_slope) && std::abs(r.tail_slope + k) <= tol.tail_rel * k;
    return r;
}

// ---------------------------------------------------------------------------

void SweepTable::write_csv(std::ostream& out) const {
    out << "a,c_a,lambda_a,A,Bh,E,pohozaev_residual,converged\n";
    for (const auto& r : rows) {
        out << format_number(r.a) << ',' << format_number(r.c_a) << ',' << format_number(r.lambda) << ','
            << format_number(r.A) << ',' << format_number(r.Bh) << ',' << format_number(r.E) << ','
            << format_number(r.pohozaev_residual) << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

bool SweepTable::check_monotone() const {
    const SweepRow* prev = nullptr;
    for (const auto& r : rows) {
        if (!r.converged) continue;
        if (prev && r.c_a > prev->c_a) return false;
        prev = &r;
    }
    return true;
}

SweepTable sweep_mass(const std::vector<double>& a_list, const ProblemParams& params, const SweepGrid& grid,
                      const SolverOptions& opts, unsigned threads) {
    if (a_list.empty()) throw InvalidArgument("sweep: empty mass list");
    for (std::size_t i = 0; i < a_list.size(); ++i) {
        ProblemParams q = params;
        q.a = a_list[i];
        q.validate();
        if (i > 0 && a_list[i] < a_list[i - 1]) throw InvalidArgument("sweep: masses must be nondecreasing");
    }
    SweepTable table;
    table.rows.resize(a_list.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next++) < a_list.size();) {
            SweepRow& row = table.rows[i];
            row.a = a_list[i];
            ProblemParams q = params;
            q.a = a_list[i];
            try {
                const RadialGrid g =
                    grid.r_max > 0.0 ? make_radial_grid(grid.r_max, grid.n) : auto_radial_grid(q, grid.n, opts);
                const Solution s = ground_state(q, g, opts);
                row.c_a = s.level;
                row.lambda = s.lambda;
                row.A = s.breakdown.A;
                row.Bh = s.breakdown.Bh;
                row.E = s.breakdown.E;
                row.pohozaev_residual = s.pohozaev_residual;
                row.converged = s.converged;
                row.message = s.message;
            } catch (const Error& ex) {
                row.converged = false;
                row.message = ex.what();
            }
        }
    };
    const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(a_list.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    table.monotone = table.check_monotone();
    return table;
}

// ---------------------------------------------------------------------------

ScalingReport scaling_identity_check(const Field& u, const Field& ut, double p, double tol) {
    const double mass = inner(u, u);
    if (!(mass > 0.0)) throw InvalidArgument("scaling suite: zero field");
    const double t = ut.scale_factor() / u.scale_factor();
    const double q = 3.0 * (p - 2.0) / 2.0;
    const double up = std::pow(lp_norm(u, p), p), utp = std::pow(lp_norm(ut, p), p);
    const std::vector<std::tuple<std::string, double, double>> laws{
        {"mass", inner(ut, ut), mass},
        {"gradient", grad_sq(ut), t * t * grad_sq(u)},
        {"lp", utp, std::pow(t, q) * up},
        {"hartree", hartree_B(ut), t * hartree_B(u)},
        {"gn_quotient", gn_quotient(ut, p), gn_quotient(u, p)},
        {"hls_quotient", hls_quotient(ut), hls_quotient(u)},
    };
    ScalingReport rep;
    for (const auto& [law, got, want] : laws) {
        ScalingCheck c{law, t, std::abs(got - want) / std::abs(want), false};
        c.pass = c.relative_error <= tol;
        if (!c.pass && rep.pass) {
            rep.pass = false;
            rep.violated = law;
        }
        rep.checks.push_back(c);
    }
    return rep;
}

ScalingReport scaling_identity_suite(const Field& u, double p, double tol) {
    ScalingReport all;
    for (double t : {0.3, 1.0, 3.0}) {
        const auto r = scaling_identity_check(u, rescale(u, t), p, tol);
        all.checks.insert(all.checks.end(), r.checks.begin(), r.checks.end());
        if (!r.pass && all.pass) {
            all.pass = false;
            all.violated = r.violated;
        }
    }
    return all;
}

}  // namespace sps
