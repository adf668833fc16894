#include "sps/potentials.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "sps/errors.hpp"

namespace sps {
namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (ys.empty() || x > xs.back()) return 0.0;
    if (x <= xs.front()) return ys.front();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument("potential: " + what);
}

void check_exponent(double p) {
    if (!(p > 10.0 / 3.0 && p < 6.0)) throw InvalidArgument("p must lie in the open interval (10/3, 6)");
}

// Decay rate kappa with |V(r)| ~ r^-kappa at infinity (infinity for fast decay).
double decay_rate(const PotentialSpec& s) {
    switch (s.kind) {
        case PotentialKind::power_decay: return s.alpha;
        case PotentialKind::piecewise_power: return s.beta;
        case PotentialKind::angular_modulated: return decay_rate(*s.base);
        default: return inf;
    }
}

const PotentialSpec& radial_part(const PotentialSpec& s) {
    return s.kind == PotentialKind::angular_modulated ? *s.base : s;
}

}  // namespace

const char* to_string(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::zero: return "zero";
        case PotentialKind::power_decay: return "power_decay";
        case PotentialKind::piecewise_power: return "piecewise_power";
        case PotentialKind::gaussian_well: return "gaussian_well";
        case PotentialKind::angular_modulated: return "angular_modulated";
        case PotentialKind::custom_table: return "custom_table";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Spec

PotentialSpec PotentialSpec::zero() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::power_decay(double c, double alpha) {
    PotentialSpec s;
    s.kind = PotentialKind::power_decay;
    s.c = c;
    s.alpha = alpha;
    s.validate();
    return s;
}

PotentialSpec PotentialSpec::piecewise_power(double c, double alpha, double beta, double q) {
    PotentialSpec s;
    s.kind = PotentialKind::piecewise_power;
    s.c = c;
    s.alpha = alpha;
    s.beta = beta;
    s.q = q;
    s.validate();
    return s;
}

PotentialSpec PotentialSpec::gaussian_well(double c, double sigma) {
    PotentialSpec s;
    s.kind = PotentialKind::gaussian_well;
    s.c = c;
    s.sigma = sigma;
    s.validate();
    return s;
}

PotentialSpec PotentialSpec::angular_modulated(const PotentialSpec& base, double epsilon) {
    PotentialSpec s;
    s.kind = PotentialKind::angular_modulated;
    s.base = std::make_shared<const PotentialSpec>(base);
    s.epsilon = epsilon;
    s.validate();
    return s;
}

PotentialSpec PotentialSpec::custom_table(RadialTable table) {
    PotentialSpec s;
    s.kind = PotentialKind::custom_table;
    s.table = std::make_shared<const RadialTable>(std::move(table));
    s.validate();
    return s;
}

void PotentialSpec::validate() const {
    require(std::isfinite(strength) && strength >= 0.0, "strength must be finite and nonnegative");
    switch (kind) {
        case PotentialKind::zero: break;
        case PotentialKind::power_decay:
            require(c > 0.0 && std::isfinite(c), "power_decay needs c > 0");
            require(alpha > 0.0 && alpha < 1.0, "power_decay needs alpha in (0, 1)");
            break;
        case PotentialKind::piecewise_power:
            require(c > 0.0 && std::isfinite(c), "piecewise_power needs c > 0");
            require(q > 3.0 && std::isfinite(q), "piecewise_power needs q > 3");
            require(alpha > 3.0 / q && alpha < 1.0, "piecewise_power needs alpha in (3/q, 1)");
            require(beta > 0.0 && beta < q / 3.0, "piecewise_power needs beta in (0, q/3)");
            break;
        case PotentialKind::gaussian_well:
            require(c > 0.0 && std::isfinite(c), "gaussian_well needs c > 0");
            require(sigma > 0.0 && std::isfinite(sigma), "gaussian_well needs sigma > 0");
            break;
        case PotentialKind::angular_modulated:
            require(base != nullptr, "angular_modulated needs a base potential");
            require(base->radial(), "angular_modulated base must be radial");
            base->validate();
            require(std::abs(epsilon) < 1.0, "angular_modulated needs |epsilon| < 1");
            break;
        case PotentialKind::custom_table: {
            require(table != nullptr, "custom_table needs data");
            const auto& t = *table;
            require(t.r.size() >= 2 && t.r.size() == t.v.size(), "custom_table needs matching r and v columns");
            require(t.w.empty() || t.w.size() == t.r.size(), "custom_table gradient column has the wrong length");
            require(t.r.front() >= 0.0, "custom_table radii must be nonnegative");
            for (std::size_t i = 1; i < t.r.size(); ++i)
                require(t.r[i] > t.r[i - 1], "custom_table radii must be strictly increasing");
            for (std::size_t i = 0; i < t.r.size(); ++i)
                require(std::isfinite(t.r[i]) && std::isfinite(t.v[i]) && (t.w.empty() || std::isfinite(t.w[i])),
                        "custom_table values must be finite");
            break;
        }
    }
}

bool PotentialSpec::has_gradient() const {
    if (kind == PotentialKind::custom_table) return table && !table->w.empty();
    if (kind == PotentialKind::angular_modulated) return base->has_gradient();
    return true;
}

bool PotentialSpec::is_zero() const { return kind == PotentialKind::zero || strength == 0.0; }

PotentialSpec PotentialSpec::with_strength(double s) const {
    PotentialSpec out = *this;
    out.strength = s;
    out.validate();
    return out;
}

std::string PotentialSpec::describe() const {
    std::ostringstream os;
    os << to_string(kind) << "(";
    switch (kind) {
        case PotentialKind::zero: break;
        case PotentialKind::power_decay: os << "c=" << c << ", alpha=" << alpha; break;
        case PotentialKind::piecewise_power:
            os << "c=" << c << ", alpha=" << alpha << ", beta=" << beta << ", q=" << q;
            break;
        case PotentialKind::gaussian_well: os << "c=" << c << ", sigma=" << sigma; break;
        case PotentialKind::angular_modulated: os << base->describe() << ", epsilon=" << epsilon; break;
        case PotentialKind::custom_table: os << table->r.size() << " rows"; break;
    }
    os << ")";
    if (strength != 1.0) os << "*" << strength;
    return os.str();
}

double PotentialSpec::profile(double r) const {
    double v = 0.0;
    switch (kind) {
        case PotentialKind::zero: return 0.0;
        case PotentialKind::power_decay: v = c * std::pow(1.0 + r, -alpha); break;
        case PotentialKind::piecewise_power:
            v = r < 1.0 ? c * std::pow(1.0 + r, -alpha) : std::pow(2.0, -alpha) * c * std::pow(r, -beta);
            break;
        case PotentialKind::gaussian_well: v = -c * std::exp(-r * r / (sigma * sigma)); break;
        case PotentialKind::custom_table: v = interp(table->r, table->v, r); break;
        case PotentialKind::angular_modulated: throw InvalidArgument("potential: angular_modulated has no radial profile");
    }
    return strength * v;
}

double PotentialSpec::profile_virial(double r) const {
    double w = 0.0;
    switch (kind) {
        case PotentialKind::zero: return 0.0;
        case PotentialKind::power_decay: w = -c * alpha * r * std::pow(1.0 + r, -alpha - 1.0); break;
        case PotentialKind::piecewise_power:
            w = r < 1.0 ? -c * alpha * r * std::pow(1.0 + r, -alpha - 1.0)
                        : -beta * std::pow(2.0, -alpha) * c * std::pow(r, -beta);
            break;
        case PotentialKind::gaussian_well: {
            const double s = r * r / (sigma * sigma);
            w = 2.0 * c * s * std::exp(-s);
            break;
        }
        case PotentialKind::custom_table:
            if (table->w.empty()) throw InvalidArgument("potential: custom_table has no gradient data, W unavailable");
            w = interp(table->r, table->w, r);
            break;
        case PotentialKind::angular_modulated: throw InvalidArgument("potential: angular_modulated has no radial profile");
    }
    return strength * w;
}

double PotentialSpec::value(double x, double y, double z) const {
    const double r = std::sqrt(x * x + y * y + z * z);
    if (kind != PotentialKind::angular_modulated) return profile(r);
    const double phi = r > 0.0 ? 1.0 + epsilon * z / r : 1.0;
    return strength * phi * base->profile(r);
}

double PotentialSpec::virial(double x, double y, double z) const {
    const double r = std::sqrt(x * x + y * y + z * z);
    if (kind != PotentialKind::angular_modulated) return profile_virial(r);
    const double phi = r > 0.0 ? 1.0 + epsilon * z / r : 1.0;
    return strength * phi * base->profile_virial(r);
}

std::array<double, 3> PotentialSpec::gradient(double x, double y, double z) const {
    const double r2 = x * x + y * y + z * z;
    if (r2 == 0.0) return {0.0, 0.0, 0.0};
    const double r = std::sqrt(r2);
    if (kind != PotentialKind::angular_modulated) {
        const double g = profile_virial(r) / r2;
        return {g * x, g * y, g * z};
    }
    const double w3 = z / r;
    const double phi = 1.0 + epsilon * w3;
    const double g = phi * base->profile_virial(r) / r2;
    const double vb = base->profile(r);
    // grad(phi(x/|x|)) = epsilon (e3 - w3 w) / r
    const double t = epsilon * vb / r;
    return {strength * (g * x - t * w3 * x / r), strength * (g * y - t * w3 * y / r),
            strength * (g * z + t * (1.0 - w3 * w3))};
}

// ---------------------------------------------------------------------------

Field potential_field(const PotentialSpec& spec, const Grid& grid) {
    spec.validate();
    if (is_radial(grid) && !spec.radial())
        throw InvalidArgument("potential: " + spec.describe() + " is not radial and needs a box grid");
    return Field::from_point(grid, [&](double x, double y, double z) { return spec.value(x, y, z); });
}

PotentialFields materialize(const PotentialSpec& spec, const Grid& grid) {
    if (!spec.has_gradient())
        throw InvalidArgument("potential: custom_table has no gradient data, W unavailable");
    Field V = potential_field(spec, grid);
    Field W = Field::from_point(grid, [&](double x, double y, double z) { return spec.virial(x, y, z); });
    const Discretization d(grid);
    std::vector<double> wt(V.size());
    for (std::size_t i = 0; i < wt.size(); ++i) wt[i] = V.values()[i] * d.radius()[i];
    return {std::move(V), std::move(W), Field(grid, std::move(wt))};
}

// ---------------------------------------------------------------------------
// Norms

namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

// int_S2 |1 + eps w3|^q dw
double angular_factor(double eps, double q) {
    if (eps == 0.0) return 4.0 * pi;
    return 2.0 * pi * (std::pow(1.0 + eps, q + 1.0) - std::pow(1.0 - eps, q + 1.0)) / (eps * (q + 1.0));
}

struct Profile {
    std::function<double(double)> f;
    double kappa;  // |f| ~ r^-kappa at infinity; inf for compact/fast decay
};

// Panel breakpoints covering [0, r_end].
std::vector<double> breakpoints(const PotentialSpec& s, double& r_end) {
    std::vector<double> b{0.0};
    if (s.kind == PotentialKind::custom_table) {
        const auto& t = *s.table;
        if (t.r.front() > 0.0) b.push_back(t.r.front());
        for (double r : t.r)
            if (r > 0.0) b.push_back(r);
        r_end = t.r.back();
        return b;
    }
    double scale = 1.0;
    if (s.kind == PotentialKind::gaussian_well) {
        scale = s.sigma;
        r_end = 40.0 * s.sigma;
    } else {
        r_end = 1e7;
    }
    for (double r = 1e-3 * scale; r < r_end; r *= 1.5) b.push_back(r);
    if (s.kind == PotentialKind::piecewise_power) b.push_back(1.0);
    b.push_back(r_end);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

// int_0^inf |f(r)|^q r^2 dr
double radial_power_integral(const PotentialSpec& s, const Profile& prof, double q) {
    double r_end = 0.0;
    const auto b = breakpoints(s, r_end);
    double sum = 0.0;
    for (std::size_t i = 1; i < b.size(); ++i) {
        sum += Gauss::integrate([&](double r) { return std::pow(std::abs(prof.f(r)), q) * r * r; }, b[i - 1], b[i]);
    }
    if (std::isfinite(prof.kappa)) {
        const double e = prof.kappa * q - 3.0;
        if (e <= 0.0) return inf;
        sum += std::pow(std::abs(prof.f(r_end)), q) * r_end * r_end * r_end / e;
    }
    return sum;
}

double radial_sup(const PotentialSpec& s, const Profile& prof) {
    if (prof.kappa < 0.0) return inf;
    double r_end = 0.0;
    auto b = breakpoints(s, r_end);
    double m = 0.0;
    for (std::size_t i = 1; i < b.size(); ++i) {
        for (int k = 0; k <= 64; ++k) {
            const double r = b[i - 1] + (b[i] - b[i - 1]) * k / 64.0;
            m = std::max(m, std::abs(prof.f(r)));
        }
        // One-sided limit at a jump in the profile.
        m = std::max(m, std::abs(prof.f(std::nextafter(b[i], 0.0))));
    }
    return m;
}

}  // namespace

PotentialNorms potential_norms(const PotentialSpec& spec, double q) {
    spec.validate();
    if (!(q > 3.0)) throw InvalidArgument("potential norms: q must exceed 3");
    PotentialNorms n;
    n.q = q;
    if (spec.is_zero()) return n;
    const PotentialSpec& rp = radial_part(spec);
    const double eps = spec.kind == PotentialKind::angular_modulated ? spec.epsilon : 0.0;
    const double amp = spec.kind == PotentialKind::angular_modulated ? spec.strength : 1.0;
    const double kappa = decay_rate(spec);

    const Profile v{[&](double r) { return amp * rp.profile(r); }, kappa};
    const Profile wt{[&](double r) { return amp * r * rp.profile(r); }, kappa - 1.0};
    auto lq = [&](const Profile& prof, double e) {
        const double integral = radial_power_integral(rp, prof, e);
        if (!std::isfinite(integral)) return inf;
        return std::pow(angular_factor(eps, e) * integral, 1.0 / e);
    };
    const double sup_phi = 1.0 + std::abs(eps);
    n.v_inf = sup_phi * radial_sup(rp, v);
    n.v_q = lq(v, q);
    n.v_32 = lq(v, 1.5);
    n.wt_3 = lq(wt, 3.0);
    if (spec.has_gradient()) {
        const Profile w{[&](double r) { return amp * rp.profile_virial(r); }, kappa};
        n.w_inf = sup_phi * radial_sup(rp, w);
        n.w_q = lq(w, q);
    } else {
        n.w_inf = n.w_q = std::numeric_limits<double>::quiet_NaN();
    }
    return n;
}

// ---------------------------------------------------------------------------
// Constants

double aubin_talenti() { return 3.0 * pi * std::pow(std::tgamma(1.5) / std::tgamma(3.0), 2.0 / 3.0); }

double embedding_constant(double q) {
    if (!(q > 3.0)) throw InvalidArgument("embedding constant: q must exceed 3");
    const double e = 2.0 * q / (q - 1.0);
    // Unit-mass Gaussian of width sigma: ||u||_e and ||u||_{H^1}.
    auto neg_quotient = [e](double log_sigma) {
        const double s2 = std::exp(2.0 * log_sigma);
        const double le = std::pow(std::pow(pi * s2, -0.75 * e) * std::pow(2.0 * pi * s2 / e, 1.5), 1.0 / e);
        return -le / std::sqrt(1.0 + 1.5 / s2);
    };
    const auto best = boost::math::tools::brent_find_minima(neg_quotient, std::log(1e-3), std::log(1e3), 50);
    return -best.second;
}

double lambda_pq(double p, double C_q) {
    check_exponent(p);
    if (!(C_q > 0.0)) throw InvalidArgument("C_q must be positive");
    return std::min(p / (3.0 * p - 8.0), 1.0) / (C_q * C_q);
}

double theta_v1prime(double t, double p, double q, double C_q) {
    check_exponent(p);
    if (!(q > 3.0)) throw InvalidArgument("theta: q must exceed 3");
    if (!(C_q > 0.0)) throw InvalidArgument("theta: C_q must be positive");
    if (!(t >= 0.0)) throw InvalidArgument("theta: t must be nonnegative");
    const double c2 = C_q * C_q;
    const double first = 1.0 + p * c2 / (q * (p - 2.0)) * std::max(1.0, (3.0 * p - 8.0) / p) * t;
    const double second = 1.0 + t * (1.0 - 3.0 / (2.0 * q)) * 3.0 * c2 * (p - 2.0) / (3.0 * p - 10.0);
    return std::pow(first, 3.0 * (p - 2.0) / (3.0 * p - 10.0)) * second - 1.0;
}

double eta_tilde(double p, const PotentialNorms& norms) {
    check_exponent(p);
    const double S = aubin_talenti();
    const double denom = 3.0 * p - 10.0 - 3.0 * std::max(p - 4.0, 0.0) / S * norms.v_32 -
                         4.0 / std::sqrt(S) * norms.wt_3;
    if (!(denom > 0.0) || !std::isfinite(denom))
        throw InvalidArgument("eta_tilde: nonpositive denominator; the (V4) smallness condition fails");
    return 6.0 * (p - 2.0) / denom;
}

double a_star(double p, double C_hat, double delta, double eta_t) {
    check_exponent(p);
    if (!(C_hat > 0.0)) throw InvalidArgument("a_star: C_hat must be positive");
    if (!(delta >= 0.0)) throw InvalidArgument("a_star: delta must be nonnegative");
    if (!(eta_t > 0.0)) throw InvalidArgument("a_star: eta_tilde must be positive");
    return std::cbrt((6.0 - p) / (std::abs(6.0 - 2.0 * p) * C_hat)) * std::pow(delta / eta_t, 1.0 / 6.0);
}

// ---------------------------------------------------------------------------
// Checkers

AssumptionReport check_v1(const PotentialNorms& norms, double a, double c_a, double theta, double eta, double p) {
    check_exponent(p);
    if (!(a > 0.0) || !(c_a > 0.0)) throw InvalidArgument("check_v1: a and c_a must be positive");
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("check_v1: theta must lie in (0, 1)");
    if (!(eta > 0.0)) throw InvalidArgument("check_v1: eta must be positive");
    const double k = c_a / (a * a);
    const double m1 = 2.0 * theta * k - norms.v_inf;
    const double m2 = eta * k - norms.w_inf;
    const double m3 = (6.0 - p) / (p - 2.0) - eta - 2.0 * theta;
    AssumptionReport r;
    r.name = "V1";
    r.margin = std::min({m1, m2, m3});
    if (std::isnan(r.margin)) r.margin = -inf;
    r.verdict = r.margin > 0.0;
    r.inputs = {{"a", a},          {"c_a", c_a},           {"theta", theta}, {"eta", eta},
                {"p", p},          {"V_inf", norms.v_inf}, {"W_inf", norms.w_inf},
                {"margin_V", m1},  {"margin_W", m2},       {"margin_eta_theta", m3}};
    return r;
}

AssumptionReport check_v1prime(const PotentialNorms& norms, double p, double C_q) {
    check_exponent(p);
    if (!(C_q > 0.0)) throw InvalidArgument("check_v1prime: C_q must be positive");
    const double c2 = C_q * C_q;
    AssumptionReport r;
    r.name = "V1'";
    r.inputs = {{"p", p}, {"q", norms.q}, {"C_q", C_q}, {"V_q", norms.v_q}, {"W_q", norms.w_q}};
    if (!std::isfinite(norms.v_q) || !std::isfinite(norms.w_q)) {
        r.margin = -inf;
        r.note = "V or W is not in L^q";
        return r;
    }
    const double m1 = 3.0 * p - 10.0 - 4.0 * c2 * norms.w_q;
    r.inputs.emplace_back("margin_W", m1);
    if (!(m1 > 0.0)) {
        r.margin = m1;
        return r;
    }
    const double theta = theta_v1prime(norms.v_q, p, norms.q, C_q);
    const double lhs = (p - 2.0) * (norms.v_q + norms.w_q) * c2 * 6.0 * (p - 2.0) * (1.0 + theta) / m1;
    const double m2 = 6.0 - p - lhs;
    r.inputs.emplace_back("theta", theta);
    r.inputs.emplace_back("margin_smallness", m2);
    r.margin = std::min(m1, m2);
    r.verdict = r.margin > 0.0;
    return r;
}

AssumptionReport check_v4(const PotentialNorms& norms, double p) {
    check_exponent(p);
    const double S = aubin_talenti();
    const double k1 = 3.0 * (2.0 * (p - 2.0) * (p - 2.0) / (6.0 - p) + std::max(p - 4.0, 0.0)) / S;
    const double k2 = 4.0 * (3.0 * (p - 2.0) * (p - 2.0) / (6.0 - p) + 1.0) / std::sqrt(S);
    const double m1 = 0.5 * S - norms.v_32;
    const double m2 = 3.0 * p - 10.0 - (k1 * norms.v_32 + k2 * norms.wt_3);
    AssumptionReport r;
    r.name = "V4";
    r.margin = std::min(m1, m2);
    if (std::isnan(r.margin)) r.margin = -inf;
    r.verdict = r.margin > 0.0;
    r.inputs = {{"p", p},          {"S", S},          {"V_3/2", norms.v_32}, {"Wt_3", norms.wt_3},
                {"margin_V", m1},  {"margin_sum", m2}};
    return r;
}

double v4_amplitude_threshold(const PotentialNorms& unit, double p) {
    check_exponent(p);
    const double S = aubin_talenti();
    const double k1 = 3.0 * (2.0 * (p - 2.0) * (p - 2.0) / (6.0 - p) + std::max(p - 4.0, 0.0)) / S;
    const double k2 = 4.0 * (3.0 * (p - 2.0) * (p - 2.0) / (6.0 - p) + 1.0) / std::sqrt(S);
    const double lhs = k1 * unit.v_32 + k2 * unit.wt_3;
    double t = lhs > 0.0 ? (3.0 * p - 10.0) / lhs : inf;
    if (unit.v_32 > 0.0) t = std::min(t, 0.5 * S / unit.v_32);
    return t;
}

double v1_amplitude_threshold(const PotentialNorms& unit, double a, double c_a, double theta, double eta) {
    const double k = c_a / (a * a);
    double t = inf;
    if (unit.v_inf > 0.0) t = std::min(t, 2.0 * theta * k / unit.v_inf);
    if (unit.w_inf > 0.0) t = std::min(t, eta * k / unit.w_inf);
    return t;
}

namespace {

// Quasi-uniform directions on the sphere (Fibonacci lattice).
std::vector<std::array<double, 3>> sphere_directions(int count) {
    std::vector<std::array<double, 3>> d;
    const double golden = pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        const double rho = std::sqrt(1.0 - z * z);
        d.push_back({rho * std::cos(golden * i), rho * std::sin(golden * i), z});
    }
    return d;
}

}  // namespace

AssumptionReport check_v3(const PotentialSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    const auto dirs = sphere_directions(64);
    double vmin = 0.0, vmax = -inf;
    for (double r = 1e-3; r <= 1e4; r *= 1.1) {
        for (const auto& d : dirs) {
            const double rr = r * (1.0 + 0.05 * jitter(rng));
            const double v = spec.value(rr * d[0], rr * d[1], rr * d[2]);
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
    }
    double far = 0.0;
    for (const auto& d : dirs) far = std::max(far, std::abs(spec.value(1e6 * d[0], 1e6 * d[1], 1e6 * d[2])));
    const double tol = 1e-6 * std::abs(vmin);
    AssumptionReport r;
    r.name = "V3";
    const double m_nonzero = -vmin;
    const double m_sign = tol - std::max(vmax, 0.0);
    const double m_decay = tol - far;
    r.margin = std::min({m_nonzero, m_sign, m_decay});
    r.verdict = r.margin > 0.0;
    r.inputs = {{"min_V", vmin}, {"max_V", vmax}, {"far_abs_V", far}};
    r.note = "sampled on radii 1e-3..1e4 and 64 directions";
    return r;
}

V2Report check_v2_sampled(const PotentialSpec& spec, const std::vector<double>& radii, double alpha, double delta,
                          std::uint64_t seed) {
    spec.validate();
    if (!spec.has_gradient()) throw InvalidArgument("check_v2: custom_table without gradient data");
    if (radii.empty()) throw InvalidArgument("check_v2: no radii given");
    for (std::size_t i = 0; i < radii.size(); ++i)
        if (!(radii[i] > 0.0) || (i > 0 && radii[i] <= radii[i - 1]))
            throw InvalidArgument("check_v2: radii must be positive and increasing");
    if (!(alpha > 0.0 && alpha < 1.0) || !(delta > 0.0 && delta < 1.0))
        throw InvalidArgument("check_v2: alpha and delta must lie in (0, 1)");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto dirs = sphere_directions(48);
    V2Report out;
    out.radii = radii;
    for (double R : radii) {
        double best = -inf;
        for (const auto& d : dirs) {
            const std::array<double, 3> y{R * d[0], R * d[1], R * d[2]};
            auto probe = [&](const std::array<double, 3>& xi) {
                const double x0 = y[0] + delta * R * xi[0];
                const double x1 = y[1] + delta * R * xi[1];
                const double x2 = y[2] + delta * R * xi[2];
                const auto g = spec.gradient(x0, x1, x2);
                best = std::max(best, std::pow(R, alpha) * (g[0] * y[0] + g[1] * y[1] + g[2] * y[2]));
            };
            probe({0.0, 0.0, 0.0});
            for (int k = 0; k < 24; ++k) {
                std::array<double, 3> xi{normal(rng), normal(rng), normal(rng)};
                const double norm = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
                // Half the samples on the sphere, half inside the ball.
                const double rad = (k % 2 == 0 ? 1.0 - 1e-12 : std::cbrt(unit(rng))) / norm;
                for (double& v : xi) v *= rad;
                probe(xi);
            }
        }
        out.maxima.push_back(best);
    }
    const std::size_t k = out.maxima.size();
    double margin = -out.maxima[k - 1];
    if (k >= 2) margin = std::min({margin, -out.maxima[k - 2], out.maxima[k - 2] - out.maxima[k - 1]});
    out.report.name = "V2";
    out.report.margin = margin;
    out.report.verdict = margin > 0.0;
    out.report.inputs = {{"alpha", alpha}, {"delta", delta}};
    out.report.note = "consistency report only: sampled maxima of |y|^alpha grad V(x).y over x in B(y, delta|y|)";
    return out;
}

}  // namespace sps
