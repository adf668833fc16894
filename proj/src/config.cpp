#include "sps/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sps {
namespace {

struct Entry {
    std::string value;
    int line = 0;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> k{
        {"problem", {"p", "a", "s"}},
        {"potential", {"kind", "c", "alpha", "beta", "q", "sigma", "epsilon", "strength", "base", "r", "v", "w"}},
        {"grid", {"kind", "n", "r_max", "L", "boundary"}},
        {"solver",
         {"tol_newton", "max_newton", "descent_step", "descent_tol", "max_descent", "gmres_restart",
          "gmres_max_iterations", "legs"}},
        {"output", {"directory", "emit_svg", "seed"}},
    };
    return k;
}

double to_double(const Entry& e, const std::string& key) {
    const std::string& s = e.value;
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x))
        throw ConfigError(e.line, "'" + key + "' expects a number, got '" + s + "'");
    return x;
}

long long to_int(const Entry& e, const std::string& key) {
    const std::string& s = e.value;
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError(e.line, "'" + key + "' expects an integer, got '" + s + "'");
    return x;
}

bool to_bool(const Entry& e, const std::string& key) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ConfigError(e.line, "'" + key + "' expects true or false, got '" + e.value + "'");
}

std::vector<double> to_list(const Entry& e, const std::string& key) {
    std::vector<double> out;
    std::istringstream is(e.value);
    std::string tok;
    while (is >> tok) out.push_back(to_double(Entry{tok, e.line}, key));
    if (out.empty()) throw ConfigError(e.line, "'" + key + "' expects a list of numbers");
    return out;
}

// Section lookup with "key not used by this kind" tracking.
struct Reader {
    const Section& sec;
    std::set<std::string> used;

    const Entry* find(const std::string& key) {
        used.insert(key);
        const auto it = sec.find(key);
        return it == sec.end() ? nullptr : &it->second;
    }
    double number(const std::string& key, double fallback) {
        const Entry* e = find(key);
        return e ? to_double(*e, key) : fallback;
    }
    double required(const std::string& key, const std::string& what, int line) {
        const Entry* e = find(key);
        if (!e) throw ConfigError(line, what + " needs '" + key + "'");
        return to_double(*e, key);
    }
    void reject_unused(const std::string& what) const {
        for (const auto& [k, e] : sec)
            if (!used.count(k)) throw ConfigError(e.line, "key '" + k + "' does not apply to " + what);
    }
};

int section_line(const Section& sec) {
    int line = 0;
    for (const auto& [k, e] : sec) line = line == 0 ? e.line : std::min(line, e.line);
    return line;
}

PotentialSpec build_kind(Reader& r, const std::string& kind, int line, bool allow_angular) {
    if (kind == "zero") return PotentialSpec::zero();
    if (kind == "power_decay")
        return PotentialSpec::power_decay(r.required("c", kind, line), r.required("alpha", kind, line));
    if (kind == "piecewise_power")
        return PotentialSpec::piecewise_power(r.required("c", kind, line), r.required("alpha", kind, line),
                                              r.required("beta", kind, line), r.required("q", kind, line));
    if (kind == "gaussian_well")
        return PotentialSpec::gaussian_well(r.required("c", kind, line), r.required("sigma", kind, line));
    if (kind == "custom_table") {
        RadialTable t;
        const Entry* er = r.find("r");
        const Entry* ev = r.find("v");
        if (!er || !ev) throw ConfigError(line, "custom_table needs 'r' and 'v'");
        t.r = to_list(*er, "r");
        t.v = to_list(*ev, "v");
        if (const Entry* ew = r.find("w")) t.w = to_list(*ew, "w");
        return PotentialSpec::custom_table(std::move(t));
    }
    if (kind == "angular_modulated" && allow_angular) {
        const Entry* b = r.find("base");
        if (!b) throw ConfigError(line, "angular_modulated needs 'base'");
        const PotentialSpec base = build_kind(r, b->value, b->line, false);
        return PotentialSpec::angular_modulated(base, r.required("epsilon", kind, line));
    }
    throw ConfigError(line, "unknown potential kind '" + kind + "'");
}

PotentialSpec build_potential(const Section& sec) {
    Reader r{sec, {}};
    const Entry* k = r.find("kind");
    const std::string kind = k ? k->value : "zero";
    const int line = k ? k->line : section_line(sec);
    PotentialSpec V;
    try {
        V = build_kind(r, kind, line, true);
        V.strength = r.number("strength", 1.0);
        V.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError(line, e.what());
    }
    r.reject_unused(kind);
    return V;
}

}  // namespace

ConfigError::ConfigError(int l, const std::string& message)
    : InvalidArgument("config line " + std::to_string(l) + ": " + message), line(l) {}

HomotopyLeg parse_leg(const std::string& text) {
    HomotopyLeg leg;
    if (text.empty()) throw InvalidArgument("empty homotopy leg");
    switch (text[0]) {
        case 's': leg.kind = LegKind::s_strength; break;
        case 'r': leg.kind = LegKind::r_radius; break;
        case 'v': leg.kind = LegKind::v_strength; break;
        default: throw InvalidArgument("homotopy leg '" + text + "': kind must be s, r or v");
    }
    const std::string rest = text.substr(1);
    auto num = [&](const std::string& s) {
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
            throw InvalidArgument("homotopy leg '" + text + "': bad number '" + s + "'");
        return x;
    };
    std::vector<std::string> parts;
    auto split = [&](char sep) {
        std::string cur;
        for (char c : rest.substr(1)) {
            if (c == sep) {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
    };
    if (!rest.empty() && rest[0] == '=') {
        split(',');
        for (const auto& p : parts) leg.values.push_back(num(p));
    } else if (!rest.empty() && rest[0] == ':') {
        split(':');
        if (parts.size() != 3) throw InvalidArgument("homotopy leg '" + text + "': expected kind:from:to:steps");
        leg.from = num(parts[0]);
        leg.to = num(parts[1]);
        const double st = num(parts[2]);
        if (st != std::floor(st) || st < 1 || st > 1e6)
            throw InvalidArgument("homotopy leg '" + text + "': steps must be a positive integer");
        leg.steps = static_cast<int>(st);
    } else {
        throw InvalidArgument("homotopy leg '" + text + "': expected kind:from:to:steps or kind=v1,v2,...");
    }
    return leg;
}

RunConfig parse_config(const std::string& text) {
    std::map<std::string, Section> sections;
    std::istringstream in(text);
    std::string raw, current;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(line, "malformed section header '" + s + "'");
            current = trim(s.substr(1, s.size() - 2));
            if (!known_keys().count(current)) throw ConfigError(line, "unknown section [" + current + "]");
            if (sections.count(current)) throw ConfigError(line, "duplicate section [" + current + "]");
            sections[current];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value', got '" + s + "'");
        if (current.empty()) throw ConfigError(line, "key outside of any section");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (!known_keys().at(current).count(key))
            throw ConfigError(line, "unknown key '" + key + "' in [" + current + "]");
        if (value.empty()) throw ConfigError(line, "empty value for '" + key + "'");
        auto& sec = sections[current];
        if (sec.count(key)) throw ConfigError(line, "duplicate key '" + key + "' in [" + current + "]");
        sec[key] = Entry{value, line};
    }

    RunConfig cfg;
    const Section empty;
    auto get = [&](const std::string& name) -> const Section& {
        const auto it = sections.find(name);
        return it == sections.end() ? empty : it->second;
    };

    {  // problem
        const Section& sec = get("problem");
        auto need = [&](const char* key) -> const Entry& {
            const auto it = sec.find(key);
            if (it == sec.end()) throw ConfigError(line, std::string("[problem] needs '") + key + "'");
            return it->second;
        };
        const Entry& ep = need("p");
        const Entry& ea = need("a");
        cfg.params.p = to_double(ep, "p");
        cfg.params.a = to_double(ea, "a");
        if (!(cfg.params.p > 10.0 / 3.0 && cfg.params.p < 6.0))
            throw ConfigError(ep.line, "p must lie in the open interval (10/3, 6)");
        if (!(cfg.params.a > 0.0)) throw ConfigError(ea.line, "a must be positive");
        if (const auto it = sec.find("s"); it != sec.end()) {
            cfg.params.s = to_double(it->second, "s");
            if (!(cfg.params.s >= 0.5 && cfg.params.s <= 1.0))
                throw ConfigError(it->second.line, "s must lie in [1/2, 1]");
        }
    }

    cfg.potential = build_potential(get("potential"));

    {  // grid
        const Section& sec = get("grid");
        Reader r{sec, {}};
        const Entry* k = r.find("kind");
        const std::string kind = k ? k->value : "radial";
        const int gl = k ? k->line : section_line(sec);
        if (kind != "radial" && kind != "box") throw ConfigError(gl, "grid kind must be radial or box");
        cfg.grid.radial = kind == "radial";
        if (const Entry* e = r.find("n")) {
            const long long n = to_int(*e, "n");
            if (n < 1) throw ConfigError(e->line, "n must be positive");
            cfg.grid.n = static_cast<std::size_t>(n);
        }
        try {
            if (cfg.grid.radial) {
                if (const Entry* e = r.find("r_max"); e && e->value != "auto") {
                    cfg.grid.r_max = to_double(*e, "r_max");
                    make_radial_grid(*cfg.grid.r_max, cfg.grid.n);
                } else {
                    make_radial_grid(1.0, cfg.grid.n);
                }
            } else {
                cfg.grid.half_width = r.required("L", "a box grid", gl);
                if (const Entry* e = r.find("boundary")) {
                    if (e->value == "dirichlet") cfg.grid.boundary = BoxBoundary::dirichlet;
                    else if (e->value == "periodic") cfg.grid.boundary = BoxBoundary::periodic;
                    else throw ConfigError(e->line, "boundary must be dirichlet or periodic");
                }
                make_box_grid(cfg.grid.half_width, cfg.grid.n, cfg.grid.boundary);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const InvalidArgument& e) {
            throw ConfigError(gl, e.what());
        }
        r.reject_unused(kind + " grids");
    }

    {  // solver
        const Section& sec = get("solver");
        Reader r{sec, {}};
        auto& o = cfg.solver;
        auto positive = [&](const char* key, double& dst) {
            if (const Entry* e = r.find(key)) {
                dst = to_double(*e, key);
                if (!(dst > 0.0)) throw ConfigError(e->line, std::string("'") + key + "' must be positive");
            }
        };
        auto count = [&](const char* key, int& dst) {
            if (const Entry* e = r.find(key)) {
                const long long v = to_int(*e, key);
                if (v < 1 || v > 100000000) throw ConfigError(e->line, std::string("'") + key + "' must be positive");
                dst = static_cast<int>(v);
            }
        };
        positive("tol_newton", o.tol_newton);
        positive("descent_step", o.descent_step);
        positive("descent_tol", o.descent_tol);
        count("max_newton", o.max_newton);
        count("max_descent", o.max_descent);
        count("gmres_restart", o.gmres_restart);
        count("gmres_max_iterations", o.gmres_max_iterations);
        if (const Entry* e = r.find("legs")) {
            std::istringstream is(e->value);
            std::string tok;
            try {
                while (is >> tok) cfg.schedule.legs.push_back(parse_leg(tok));
                cfg.schedule.validate();
            } catch (const InvalidArgument& ex) {
                throw ConfigError(e->line, ex.what());
            }
            for (const auto& leg : cfg.schedule.legs)
                if (leg.kind == LegKind::r_radius && !cfg.grid.radial)
                    throw ConfigError(e->line, "r legs need a radial grid");
        }
    }

    {  // output
        const Section& sec = get("output");
        Reader r{sec, {}};
        if (const Entry* e = r.find("directory")) cfg.output.directory = e->value;
        if (const Entry* e = r.find("emit_svg")) cfg.output.emit_svg = to_bool(*e, "emit_svg");
        if (const Entry* e = r.find("seed")) {
            const long long v = to_int(*e, "seed");
            if (v < 0) throw ConfigError(e->line, "seed must be nonnegative");
            cfg.output.seed = static_cast<std::uint64_t>(v);
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace sps
