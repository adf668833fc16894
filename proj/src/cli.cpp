#include "sps/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "sps/config.hpp"
#include "sps/plot.hpp"
#include "sps/verify.hpp"

namespace fs = std::filesystem;

namespace sps {
namespace {

// Exit code carrier for paths that are not exceptions.
struct Exit {
    int code;
};

RadialGrid radial_grid_for(const RunConfig& cfg, const ProblemParams& params) {
    if (cfg.grid.radial && cfg.grid.r_max) return make_radial_grid(*cfg.grid.r_max, cfg.grid.n);
    return auto_radial_grid(params, cfg.grid.radial ? cfg.grid.n : 4096, cfg.solver);
}

// Autonomous ground state on the radial grid of the config; its level is the
// c_a reference for diagnostics.
Solution reference_state(const RunConfig& cfg, const ProblemParams& params) {
    return ground_state(params, radial_grid_for(cfg, params), cfg.solver);
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) throw InvalidArgument("cannot write '" + path.string() + "'");
}

fs::path output_dir(const RunConfig& cfg, const std::string& override_dir) {
    const fs::path dir = override_dir.empty() ? fs::path(cfg.output.directory) : fs::path(override_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InvalidArgument("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

std::string trace_csv(const std::vector<TraceEntry>& trace) {
    std::ostringstream os;
    os << "leg,value,level,lambda,residual_norm,converged\n";
    for (const auto& t : trace)
        os << t.leg << ',' << format_number(t.value) << ',' << format_number(t.level) << ','
           << format_number(t.lambda) << ',' << format_number(t.residual_norm) << ',' << (t.converged ? 1 : 0)
           << '\n';
    return os.str();
}

// u and phi along the radius (radial grids) or the +x axis through the centre.
std::string profile_svg(const Field& u) {
    const Field phi = solve_phi(u);
    Series su{"u / max u", {}, {}}, sp{"phi_u / max phi_u", {}, {}};
    const auto uv = u.values(), pv = phi.values();
    if (const auto* r = std::get_if<RadialGrid>(&u.grid())) {
        for (std::size_t i = 0; i < uv.size(); ++i) {
            su.x.push_back(r->node(i));
            su.y.push_back(uv[i]);
            sp.y.push_back(pv[i]);
        }
    } else {
        const auto& b = std::get<BoxGrid>(u.grid());
        const std::size_t c = b.n / 2;
        for (std::size_t i = c; i < b.n; ++i) {
            su.x.push_back(b.coord(i));
            su.y.push_back(uv[b.index(i, c, c)]);
            sp.y.push_back(pv[b.index(i, c, c)]);
        }
    }
    sp.x = su.x;
    for (auto* s : {&su, &sp}) {
        double m = 0.0;
        for (double y : s->y) m = std::max(m, std::abs(y));
        if (m > 0.0)
            for (double& y : s->y) y /= m;
    }
    return svg_line_chart({su, sp}, {"Radial profile", "r", "normalized value"});
}

std::string fiber_svg(const Field& u, const PotentialSpec& V, const ProblemParams& params) {
    Series s{"J_V(u^t)", {}, {}};
    for (int k = 0; k <= 120; ++k) {
        const double t = std::pow(10.0, -0.7 + 1.4 * k / 120.0);
        s.x.push_back(t);
        s.y.push_back(fiber_profile(u, V, params, t));
    }
    ChartOptions o{"Fiber profile", "t", "J_V(u^t)"};
    o.log_x = true;
    return svg_line_chart({s}, o);
}

std::string sweep_svg(const std::vector<double>& a, const std::vector<double>& c) {
    return svg_line_chart({{"c_a", a, c}}, {"Ground-state level against mass", "a", "c_a"});
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string tok;
    std::istringstream is(text);
    while (std::getline(is, tok, ',')) {
        std::size_t pos = 0;
        double x = 0.0;
        try {
            x = std::stod(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != tok.size()) throw InvalidArgument("expected a comma-separated list, got '" + text + "'");
        out.push_back(x);
    }
    if (out.empty()) throw InvalidArgument("empty list");
    return out;
}

void print_report(std::ostream& out, const AssumptionReport& r) {
    out << "[" << r.name << "]\n";
    out << "verdict = " << (r.verdict ? "pass" : "fail") << '\n';
    out << "margin = " << format_number(r.margin) << '\n';
    for (const auto& [k, v] : r.inputs) out << k << " = " << format_number(v) << '\n';
    if (!r.note.empty()) out << "note = " << r.note << '\n';
}

// ---------------------------------------------------------------------------

int cmd_solve(const std::string& config_path, const std::string& dir_override, std::ostream& out) {
    const RunConfig cfg = load_config(config_path);
    HomotopySchedule schedule = cfg.schedule;
    const bool has_v_leg = std::any_of(schedule.legs.begin(), schedule.legs.end(),
                                       [](const HomotopyLeg& l) { return l.kind == LegKind::v_strength; });
    if (!cfg.potential.is_zero() && !has_v_leg)
        schedule.legs.insert(schedule.legs.begin(), HomotopyLeg{LegKind::v_strength, 0.0, 1.0, 4, {}});

    // Start at the first s station when an s leg is present.
    ProblemParams start = cfg.params;
    for (const auto& l : schedule.legs)
        if (l.kind == LegKind::s_strength) {
            start.s = l.stations().front();
            break;
        }

    const Solution ref = reference_state(cfg, cfg.params);
    Solution seed = start.s == cfg.params.s ? ref : reference_state(cfg, start);
    if (!cfg.grid.radial && seed.converged) {
        const BoxGrid b = make_box_grid(cfg.grid.half_width, cfg.grid.n, cfg.grid.boundary);
        const Field u0 = normalize_mass(resample(seed.u, b), start.a);
        seed = newton_refine(u0, seed.lambda, PotentialSpec::zero(), start, cfg.solver);
    }
    Solution sol = seed;
    if (seed.converged && !schedule.legs.empty()) sol = continuation(seed, schedule, cfg.potential, cfg.solver);
    const PotentialSpec& V = sol.potential;

    const fs::path dir = output_dir(cfg, dir_override);
    save_field((dir / "solution.spsf").string(), sol.u);
    write_file(dir / "trace.csv", trace_csv(sol.homotopy_trace));

    std::vector<std::pair<std::string, std::string>> kv{
        {"converged", sol.converged ? "1" : "0"},
        {"residual_norm", format_number(sol.residual_norm)},
        {"newton_iterations", std::to_string(sol.newton_iterations)},
        {"descent_iterations", std::to_string(sol.descent_iterations)},
        {"grid", describe(sol.u.grid())},
        {"potential", V.describe()},
        {"p", format_number(sol.params.p)},
        {"a", format_number(sol.params.a)},
        {"s", format_number(sol.params.s)},
    };
    if (!sol.message.empty()) kv.emplace_back("message", sol.message);
    if (sol.converged && ref.converged) {
        const auto d = diagnostics(sol, V, ref.level);
        const auto e = d.entries();
        kv.insert(kv.end(), e.begin(), e.end());
    } else {
        kv.emplace_back("level", format_number(sol.level));
        kv.emplace_back("lambda", format_number(sol.lambda));
    }
    std::ostringstream diag;
    write_key_values(diag, kv);
    write_file(dir / "diagnostics.txt", diag.str());
    if (cfg.output.emit_svg) {
        write_file(dir / "profile.svg", profile_svg(sol.u));
        write_file(dir / "fiber.svg", fiber_svg(sol.u, V, sol.params));
    }
    out << diag.str();
    out << "wrote " << (dir / "solution.spsf").string() << '\n';
    return sol.converged ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& a_text, const std::string& dir_override,
              std::ostream& out) {
    const RunConfig cfg = load_config(config_path);
    if (!cfg.grid.radial) throw InvalidArgument("sweep runs on radial grids");
    const auto as = parse_list(a_text);
    const SweepGrid grid{cfg.grid.n, cfg.grid.r_max.value_or(0.0)};
    const SweepTable t = sweep_mass(as, cfg.params, grid, cfg.solver, worker_threads());
    std::ostringstream csv;
    t.write_csv(csv);
    const fs::path dir = output_dir(cfg, dir_override);
    write_file(dir / "sweep.csv", csv.str());
    if (cfg.output.emit_svg) {
        std::vector<double> a, c;
        for (const auto& r : t.rows)
            if (r.converged) {
                a.push_back(r.a);
                c.push_back(r.c_a);
            }
        if (!a.empty()) write_file(dir / "ca_vs_a.svg", sweep_svg(a, c));
    }
    out << csv.str() << "monotone = " << (t.monotone ? 1 : 0) << '\n';
    const bool all = std::all_of(t.rows.begin(), t.rows.end(), [](const SweepRow& r) { return r.converged; });
    return all ? 0 : 1;
}

int cmd_verify(const std::string& config_path, const std::string& field_path, double c_a, std::ostream& out) {
    const RunConfig cfg = load_config(config_path);
    const Field u = load_field(field_path);
    const ProblemParams& prm = cfg.params;
    EnergyModel model(u.grid(), cfg.potential, prm);
    Solution sol;
    sol.u = u;
    sol.params = prm;
    sol.potential = cfg.potential;
    sol.breakdown = model.breakdown(u.values());
    sol.lambda = lagrange_multiplier(sol.breakdown, prm);
    sol.level = level(sol.breakdown, prm);
    sol.pohozaev_residual = pohozaev(sol.breakdown, prm);
    sol.residual_norm = residual_norm(model, u.values(), sol.lambda);
    sol.converged = sol.residual_norm <= cfg.solver.tol_newton &&
                    std::abs(sol.breakdown.mass - prm.a * prm.a) <= 1e-10 * prm.a * prm.a;
    out << "residual_norm = " << format_number(sol.residual_norm) << '\n';
    if (!sol.converged) {
        out << "converged = 0\n";
        return 1;
    }
    if (std::isnan(c_a)) {
        const Solution ref = reference_state(cfg, prm);
        if (!ref.converged) throw SolverError("reference ground state did not converge: " + ref.message);
        c_a = ref.level;
    }
    out << "converged = 1\n";
    write_key_values(out, diagnostics(sol, cfg.potential, c_a).entries());
    return 0;
}

struct PotentialCheckOptions {
    double theta = 0.25, eta = 0.25, c_a = NAN, C_q = NAN, alpha = 0.5, delta = 0.5;
    std::string radii = "10,20,40,80,160";
};

int cmd_check_potential(const std::string& config_path, const PotentialCheckOptions& o, std::ostream& out) {
    const RunConfig cfg = load_config(config_path);
    const PotentialSpec& V = cfg.potential;
    const double p = cfg.params.p;
    double c_a = o.c_a;
    if (std::isnan(c_a)) {
        const Solution ref = reference_state(cfg, cfg.params);
        if (!ref.converged) throw SolverError("reference ground state did not converge: " + ref.message);
        c_a = ref.level;
    }
    const auto norms = potential_norms(V, 6.0);
    const double C_q = std::isnan(o.C_q) ? embedding_constant(norms.q) : o.C_q;
    out << "potential = " << V.describe() << '\n';
    print_report(out, check_v1(norms, cfg.params.a, c_a, o.theta, o.eta, p));
    print_report(out, check_v1prime(norms, p, C_q));
    print_report(out, check_v2_sampled(V, parse_list(o.radii), o.alpha, o.delta, cfg.output.seed).report);
    print_report(out, check_v3(V, cfg.output.seed));
    print_report(out, check_v4(norms, p));
    return 0;
}

struct ConstantsOptions {
    double p = 4.0, t = 0.0, q = 6.0, C_q = NAN, C_hat = NAN, delta = NAN;
    std::string config;
};

int cmd_constants(const ConstantsOptions& o, std::ostream& out) {
    PotentialSpec V = PotentialSpec::zero();
    double p = o.p;
    if (!o.config.empty()) {
        const RunConfig cfg = load_config(o.config);
        V = cfg.potential;
        p = cfg.params.p;
    }
    const auto norms = potential_norms(V, o.q);
    const double C_q = std::isnan(o.C_q) ? embedding_constant(o.q) : o.C_q;
    out << "S = " << format_number(aubin_talenti()) << '\n';
    out << "p = " << format_number(p) << '\n';
    out << "q = " << format_number(o.q) << '\n';
    out << "C_q = " << format_number(C_q) << '\n';
    out << "Lambda_pq = " << format_number(lambda_pq(p, C_q)) << '\n';
    out << "theta(" << format_number(o.t) << ") = " << format_number(theta_v1prime(o.t, p, o.q, C_q)) << '\n';
    double eta = NAN;
    try {
        eta = eta_tilde(p, norms);
        out << "eta_tilde = " << format_number(eta) << '\n';
    } catch (const InvalidArgument& e) {
        out << "eta_tilde = undefined (" << e.what() << ")\n";
    }
    if (!std::isnan(o.C_hat) && !std::isnan(o.delta) && !std::isnan(eta))
        out << "a_star = " << format_number(a_star(p, o.C_hat, o.delta, eta)) << '\n';
    else
        out << "a_star = n/a (needs --C-hat and --delta)\n";
    return 0;
}

std::pair<std::vector<double>, std::vector<double>> read_sweep_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    std::string line;
    std::getline(in, line);
    if (line.rfind("a,c_a,", 0) != 0) throw FormatError("sweep CSV: unexpected header in '" + path + "'");
    std::vector<double> a, c;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) cols.push_back(tok);
        if (cols.size() != 8) throw FormatError("sweep CSV: expected 8 columns");
        try {
            if (cols[7] != "1") continue;
            a.push_back(std::stod(cols[0]));
            c.push_back(std::stod(cols[1]));
        } catch (const std::logic_error&) {
            throw FormatError("sweep CSV: bad number in '" + line + "'");
        }
    }
    return {a, c};
}

int cmd_plot(const std::string& config_path, const std::string& field, const std::string& sweep,
             const std::string& dir_override, std::ostream& out) {
    const RunConfig cfg = load_config(config_path);
    if (field.empty() && sweep.empty()) throw InvalidArgument("plot needs --field and/or --sweep");
    const fs::path dir = output_dir(cfg, dir_override);
    if (!field.empty()) {
        const Field u = load_field(field);
        write_file(dir / "profile.svg", profile_svg(u));
        write_file(dir / "fiber.svg", fiber_svg(u, cfg.potential, cfg.params));
        out << "wrote " << (dir / "profile.svg").string() << '\n' << "wrote " << (dir / "fiber.svg").string() << '\n';
    }
    if (!sweep.empty()) {
        const auto [a, c] = read_sweep_csv(sweep);
        if (a.empty()) throw InvalidArgument("sweep CSV has no converged rows");
        write_file(dir / "ca_vs_a.svg", sweep_svg(a, c));
        out << "wrote " << (dir / "ca_vs_a.svg").string() << '\n';
    }
    return 0;
}

}  // namespace

unsigned worker_threads() {
    if (const char* env = std::getenv("SPS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Normalized solutions of the Schroedinger-Poisson equation with a potential", "sps"};
    app.require_subcommand(1);

    int code = 0;
    std::string config, field, dir, a_text, sweep;
    double c_a = NAN;

    auto* solve = app.add_subcommand("solve", "ground state or continuation per config");
    solve->add_option("config", config, "config file")->required();
    solve->add_option("-o,--output", dir, "output directory (overrides [output] directory)");

    auto* sw = app.add_subcommand("sweep", "c_a over a mass ladder");
    sw->add_option("config", config, "config file")->required();
    sw->add_option("--a", a_text, "comma-separated masses")->required();
    sw->add_option("-o,--output", dir, "output directory");

    auto* ver = app.add_subcommand("verify", "diagnostics for a stored field");
    ver->add_option("config", config, "config file")->required();
    ver->add_option("field", field, "SPSF field file")->required();
    ver->add_option("--c-a", c_a, "reference level (default: solve the autonomous problem)");

    PotentialCheckOptions pco;
    auto* chk = app.add_subcommand("check-potential", "assumption reports for the configured potential");
    chk->add_option("config", config, "config file")->required();
    chk->add_option("--theta", pco.theta, "theta for (V1)");
    chk->add_option("--eta", pco.eta, "eta for (V1)");
    chk->add_option("--c-a", pco.c_a, "reference level (default: solve the autonomous problem)");
    chk->add_option("--C-q", pco.C_q, "embedding constant (default: Gaussian estimate)");
    chk->add_option("--alpha", pco.alpha, "(V2) exponent");
    chk->add_option("--delta", pco.delta, "(V2) ball radius factor");
    chk->add_option("--radii", pco.radii, "(V2) sample radii, comma-separated");

    ConstantsOptions co;
    auto* con = app.add_subcommand("constants", "S, eta~, theta(t), Lambda_pq, a_*");
    con->add_option("--p", co.p, "exponent");
    con->add_option("--config", co.config, "take p and V from a config file");
    con->add_option("--t", co.t, "argument of theta");
    con->add_option("--q", co.q, "integrability exponent");
    con->add_option("--C-q", co.C_q, "embedding constant");
    con->add_option("--C-hat", co.C_hat, "constant in a_*");
    con->add_option("--delta", co.delta, "constant in a_*");

    auto* plot = app.add_subcommand("plot", "SVG charts");
    plot->add_option("config", config, "config file")->required();
    plot->add_option("--field", field, "SPSF field: radial profile and fiber profile");
    plot->add_option("--sweep", sweep, "sweep CSV: c_a against a");
    plot->add_option("-o,--output", dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*solve) code = cmd_solve(config, dir, out);
        else if (*sw) code = cmd_sweep(config, a_text, dir, out);
        else if (*ver) code = cmd_verify(config, field, c_a, out);
        else if (*chk) code = cmd_check_potential(config, pco, out);
        else if (*con) code = cmd_constants(co, out);
        else if (*plot) code = cmd_plot(config, field, sweep, dir, out);
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return 1;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return code;
}

}  // namespace sps
