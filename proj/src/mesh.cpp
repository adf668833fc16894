#include "sps/mesh.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sps/errors.hpp"
#include "sps/kernels.hpp"

namespace sps {
namespace {

constexpr double four_pi = 4.0 * std::numbers::pi;

// Eighth-order central first derivative weights for offsets 1..4.
constexpr std::array<double, 4> d8 = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};

template <class Get>
double derivative8(Get&& get, long m, double inv_h) {
    double s = 0.0;
    for (long k = 1; k <= 4; ++k) s += d8[static_cast<std::size_t>(k - 1)] * (get(m + k) - get(m - k));
    return s * inv_h;
}

}  // namespace

RadialGrid make_radial_grid(double r_max, std::size_t n) {
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw InvalidArgument("radial grid: r_max must be positive");
    if (n < 16) throw InvalidArgument("radial grid: n must be at least 16");
    return RadialGrid{r_max, n};
}

BoxGrid make_box_grid(double half_width, std::size_t n, BoxBoundary boundary) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw InvalidArgument("box grid: half width must be positive");
    if (n < 16 || !std::has_single_bit(n)) throw InvalidArgument("box grid: n must be a power of two >= 16");
    return BoxGrid{half_width, n, boundary};
}

std::size_t node_count(const Grid& grid) {
    return std::visit([](const auto& g) { return g.size(); }, grid);
}

double grid_spacing(const Grid& grid) {
    return std::visit([](const auto& g) { return g.spacing(); }, grid);
}

bool is_radial(const Grid& grid) { return std::holds_alternative<RadialGrid>(grid); }

bool compatible(const Grid& a, const Grid& b) {
    if (a.index() != b.index()) return false;
    if (node_count(a) != node_count(b)) return false;
    if (!is_radial(a) && std::get<BoxGrid>(a).boundary != std::get<BoxGrid>(b).boundary) return false;
    const double ha = grid_spacing(a);
    const double hb = grid_spacing(b);
    return std::abs(ha - hb) <= 1e-12 * std::max(ha, hb);
}

std::string describe(const Grid& grid) {
    std::ostringstream os;
    if (const auto* r = std::get_if<RadialGrid>(&grid)) {
        os << "radial(r_max=" << r->r_max << ", n=" << r->n << ")";
    } else {
        const auto& b = std::get<BoxGrid>(grid);
        os << "box(L=" << b.half_width << ", n=" << b.n << "^3"
           << (b.boundary == BoxBoundary::periodic ? ", periodic" : "") << ")";
    }
    return os.str();
}

// ---------------------------------------------------------------------------

Discretization::Discretization(const Grid& grid) : grid_(grid), h_(grid_spacing(grid)) {
    const std::size_t m = node_count(grid);
    weights_.resize(m);
    radius_.resize(m);
    if (const auto* r = std::get_if<RadialGrid>(&grid)) {
        inv_radius_.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double x = r->node(i);
            radius_[i] = x;
            inv_radius_[i] = 1.0 / x;
            weights_[i] = four_pi * h_ * x * x;
        }
    } else {
        const auto& b = std::get<BoxGrid>(grid);
        const double w = h_ * h_ * h_;
        std::fill(weights_.begin(), weights_.end(), w);
        for (std::size_t i = 0; i < b.n; ++i)
            for (std::size_t j = 0; j < b.n; ++j)
                for (std::size_t k = 0; k < b.n; ++k) {
                    const double x = b.coord(i), y = b.coord(j), z = b.coord(k);
                    radius_[b.index(i, j, k)] = std::sqrt(x * x + y * y + z * z);
                }
    }
}

double Discretization::integrate(std::span<const double> f) const {
    if (is_radial(grid_)) return kernels::dot(weights_, f);
    double s = 0.0;
    for (double v : f) s += v;
    return weights_.empty() ? 0.0 : s * weights_[0];
}

double Discretization::inner(std::span<const double> a, std::span<const double> b) const {
    if (is_radial(grid_)) return kernels::wdot(weights_, a, b);
    return weights_.empty() ? 0.0 : kernels::dot(a, b) * weights_[0];
}

void Discretization::laplacian(std::span<const double> u, std::span<double> out) const {
    const auto& K = kernels::active();
    const double s = 1.0 / (h_ * h_);
    if (is_radial(grid_)) {
        std::vector<double> w(u.size());
        K.mul(radius_.data(), u.data(), w.data(), u.size());
        K.second_difference(w.data(), out.data(), u.size(), s);
        K.mul(out.data(), inv_radius_.data(), out.data(), u.size());
        return;
    }
    const auto& b = std::get<BoxGrid>(grid_);
    const std::size_t n = b.n;
    const bool periodic = b.boundary == BoxBoundary::periodic;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double* mid = u.data() + b.index(i, j, 0);
            double* o = out.data() + b.index(i, j, 0);
            K.second_difference(mid, o, n, s);
            if (periodic) {
                o[0] += s * mid[n - 1];
                o[n - 1] += s * mid[0];
            }
            const double* lo = j > 0 ? u.data() + b.index(i, j - 1, 0)
                                     : (periodic ? u.data() + b.index(i, n - 1, 0) : nullptr);
            const double* hi = j + 1 < n ? u.data() + b.index(i, j + 1, 0)
                                         : (periodic ? u.data() + b.index(i, 0, 0) : nullptr);
            K.add_cross_difference(lo, mid, hi, o, n, s);
            lo = i > 0 ? u.data() + b.index(i - 1, j, 0) : (periodic ? u.data() + b.index(n - 1, j, 0) : nullptr);
            hi = i + 1 < n ? u.data() + b.index(i + 1, j, 0) : (periodic ? u.data() + b.index(0, j, 0) : nullptr);
            K.add_cross_difference(lo, mid, hi, o, n, s);
        }
    }
}

double Discretization::grad_sq(std::span<const double> u) const {
    const auto& K = kernels::active();
    if (is_radial(grid_)) {
        std::vector<double> w(u.size());
        K.mul(radius_.data(), u.data(), w.data(), u.size());
        return four_pi / h_ * K.sum_sq_diff(w.data(), w.size());
    }
    const auto& b = std::get<BoxGrid>(grid_);
    const std::size_t n = b.n;
    const bool periodic = b.boundary == BoxBoundary::periodic;
    std::vector<double> d(n);
    auto edge = [&](const double* hi, const double* lo) {
        if (!lo) return K.dot(hi, hi, n);
        if (!hi) return K.dot(lo, lo, n);
        for (std::size_t k = 0; k < n; ++k) d[k] = hi[k] - lo[k];
        return K.dot(d.data(), d.data(), n);
    };
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double* line = u.data() + b.index(i, j, 0);
            if (periodic) {
                const double e = line[0] - line[n - 1];
                s += K.sum_sq_diff(line, n) - line[0] * line[0] - line[n - 1] * line[n - 1] + e * e;
            } else {
                s += K.sum_sq_diff(line, n);
            }
        }
    }
    // Faces normal to y and x: edges between consecutive lines/planes.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= n; ++j) {
            const double* lo = j > 0 ? u.data() + b.index(i, j - 1, 0) : nullptr;
            const double* hi = j < n ? u.data() + b.index(i, j, 0) : nullptr;
            if (periodic) {
                if (j == n) continue;
                if (j == 0) lo = u.data() + b.index(i, n - 1, 0);
            }
            s += edge(hi, lo);
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i <= n; ++i) {
            const double* lo = i > 0 ? u.data() + b.index(i - 1, j, 0) : nullptr;
            const double* hi = i < n ? u.data() + b.index(i, j, 0) : nullptr;
            if (periodic) {
                if (i == n) continue;
                if (i == 0) lo = u.data() + b.index(n - 1, j, 0);
            }
            s += edge(hi, lo);
        }
    }
    return s * h_;
}

double Discretization::virial_potential_term(std::span<const double> v, std::span<const double> u) const {
    const double inv_h = 1.0 / h_;
    if (const auto* r = std::get_if<RadialGrid>(&grid_)) {
        // int V (r^3 u^2)' dr over [0, r_max] with g odd about r = 0 and zero beyond r_max.
        const long n = static_cast<long>(r->n);
        std::vector<double> g(static_cast<std::size_t>(n + 1), 0.0);
        for (long m = 1; m < n; ++m) {
            const double x = radius_[static_cast<std::size_t>(m - 1)];
            const double um = u[static_cast<std::size_t>(m - 1)];
            g[static_cast<std::size_t>(m)] = x * x * x * um * um;
        }
        auto get = [&](long m) {
            if (m < 0) return -g[static_cast<std::size_t>(-m)];
            if (m > n) return 0.0;
            return g[static_cast<std::size_t>(m)];
        };
        double s = 0.0;
        for (long m = 1; m < n; ++m) s += v[static_cast<std::size_t>(m - 1)] * derivative8(get, m, inv_h);
        return four_pi * h_ * s;
    }
    const auto& b = std::get<BoxGrid>(grid_);
    const long n = static_cast<long>(b.n);
    const bool periodic = b.boundary == BoxBoundary::periodic;
    std::vector<double> xgrad(u.size(), 0.0);
    std::vector<double> line(b.n);
    const std::array<std::size_t, 3> stride = {b.n * b.n, b.n, 1};
    for (int axis = 0; axis < 3; ++axis) {
        const std::size_t st = stride[static_cast<std::size_t>(axis)];
        for (std::size_t p = 0; p < b.n; ++p) {
            for (std::size_t q = 0; q < b.n; ++q) {
                std::size_t base = 0;
                if (axis == 0) base = b.index(0, p, q);
                if (axis == 1) base = b.index(p, 0, q);
                if (axis == 2) base = b.index(p, q, 0);
                for (std::size_t k = 0; k < b.n; ++k) line[k] = u[base + k * st];
                auto get = [&](long m) {
                    if (periodic) return line[static_cast<std::size_t>(((m % n) + n) % n)];
                    if (m < 0 || m >= n) return 0.0;
                    return line[static_cast<std::size_t>(m)];
                };
                for (long k = 0; k < n; ++k)
                    xgrad[base + static_cast<std::size_t>(k) * st] +=
                        b.coord(static_cast<std::size_t>(k)) * derivative8(get, k, inv_h);
            }
        }
    }
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += v[i] * (3.0 * u[i] * u[i] + 2.0 * u[i] * xgrad[i]);
    return s * h_ * h_ * h_;
}

// ---------------------------------------------------------------------------

Field::Field(Grid grid, std::vector<double> values, double scale_factor)
    : grid_(std::move(grid)), values_(std::move(values)), scale_(scale_factor) {
    if (values_.size() != node_count(grid_))
        throw InvalidArgument("field: value count " + std::to_string(values_.size()) + " does not match grid " +
                              describe(grid_));
    if (!(scale_ > 0.0) || !std::isfinite(scale_)) throw InvalidArgument("field: scale factor must be positive");
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidArgument("field: non-finite value");
}

Field Field::zeros(const Grid& grid) { return Field(grid, std::vector<double>(node_count(grid), 0.0)); }

Field Field::from_radial(const Grid& grid, const std::function<double(double)>& f) {
    Discretization d(grid);
    std::vector<double> v(d.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(d.radius()[i]);
    return Field(grid, std::move(v));
}

Field Field::from_point(const Grid& grid, const std::function<double(double, double, double)>& f) {
    std::vector<double> v(node_count(grid));
    if (const auto* r = std::get_if<RadialGrid>(&grid)) {
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(r->node(i), 0.0, 0.0);
    } else {
        const auto& b = std::get<BoxGrid>(grid);
        for (std::size_t i = 0; i < b.n; ++i)
            for (std::size_t j = 0; j < b.n; ++j)
                for (std::size_t k = 0; k < b.n; ++k) v[b.index(i, j, k)] = f(b.coord(i), b.coord(j), b.coord(k));
    }
    return Field(grid, std::move(v));
}

double integrate(const Field& f) { return Discretization(f.grid()).integrate(f.values()); }

double inner(const Field& a, const Field& b) {
    if (!compatible(a.grid(), b.grid())) throw InvalidArgument("inner: incompatible grids");
    return Discretization(a.grid()).inner(a.values(), b.values());
}

double lp_norm(const Field& u, double q) {
    if (!(q >= 1.0)) throw InvalidArgument("lp_norm: q must be >= 1");
    if (std::isinf(q)) {
        double m = 0.0;
        for (double v : u.values()) m = std::max(m, std::abs(v));
        return m;
    }
    Discretization d(u.grid());
    if (q == 2.0) return std::sqrt(d.inner(u.values(), u.values()));
    std::vector<double> g(u.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::pow(std::abs(u.values()[i]), q);
    return std::pow(d.integrate(g), 1.0 / q);
}

double grad_sq(const Field& u) { return Discretization(u.grid()).grad_sq(u.values()); }

Field apply_laplacian(const Field& u) {
    std::vector<double> out(u.size());
    Discretization(u.grid()).laplacian(u.values(), out);
    return Field(u.grid(), std::move(out), u.scale_factor());
}

Field rescale(const Field& u, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("rescale: t must be positive");
    Grid g = u.grid();
    if (auto* r = std::get_if<RadialGrid>(&g))
        r->r_max /= t;
    else
        std::get<BoxGrid>(g).half_width /= t;
    const double amp = t * std::sqrt(t);
    std::vector<double> v(u.values().begin(), u.values().end());
    for (double& x : v) x *= amp;
    return Field(std::move(g), std::move(v), u.scale_factor() * t);
}

Field abs(const Field& u) {
    std::vector<double> v(u.values().begin(), u.values().end());
    for (double& x : v) x = std::abs(x);
    return Field(u.grid(), std::move(v), u.scale_factor());
}

Field scaled(const Field& u, double c) {
    std::vector<double> v(u.values().begin(), u.values().end());
    for (double& x : v) x *= c;
    return Field(u.grid(), std::move(v), u.scale_factor());
}

double tail_mass(const Field& u) {
    Discretization d(u.grid());
    double s = 0.0;
    if (const auto* r = std::get_if<RadialGrid>(&u.grid())) {
        const double cut = 0.9 * r->r_max;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (d.radius()[i] > cut) s += d.weights()[i] * u.values()[i] * u.values()[i];
        return s;
    }
    const auto& b = std::get<BoxGrid>(u.grid());
    const double cut = 0.9 * b.half_width;
    for (std::size_t i = 0; i < b.n; ++i)
        for (std::size_t j = 0; j < b.n; ++j)
            for (std::size_t k = 0; k < b.n; ++k) {
                const double m = std::max({std::abs(b.coord(i)), std::abs(b.coord(j)), std::abs(b.coord(k))});
                if (m > cut) {
                    const double v = u.values()[b.index(i, j, k)];
                    s += d.weights()[0] * v * v;
                }
            }
    return s;
}

// ---------------------------------------------------------------------------
// SPSF

namespace {

constexpr std::uint32_t spsf_version = 1;

template <class T>
void put(std::ostream& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(bytes.data(), sizeof(T));
}

template <class T>
T get(std::istream& in, const char* what) {
    std::array<char, sizeof(T)> bytes;
    if (!in.read(bytes.data(), sizeof(T))) throw FormatError(std::string("SPSF: truncated ") + what);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T v;
    std::memcpy(&v, bytes.data(), sizeof(T));
    return v;
}

}  // namespace

void write_field(std::ostream& out, const Field& f) {
    out.write("SPSF", 4);
    put<std::uint32_t>(out, spsf_version);
    if (const auto* r = std::get_if<RadialGrid>(&f.grid())) {
        put<std::uint8_t>(out, 0);
        put<std::uint64_t>(out, r->n);
    } else {
        const auto& b = std::get<BoxGrid>(f.grid());
        put<std::uint8_t>(out, 1);
        for (int i = 0; i < 3; ++i) put<std::uint64_t>(out, b.n);
    }
    put<double>(out, grid_spacing(f.grid()));
    put<double>(out, f.scale_factor());
    for (double v : f.values()) put<double>(out, v);
    if (!out) throw Error("SPSF: write failed");
}

Field read_field(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), 4) || std::memcmp(magic.data(), "SPSF", 4) != 0)
        throw FormatError("SPSF: bad magic");
    const auto version = get<std::uint32_t>(in, "version");
    if (version != spsf_version) throw FormatError("SPSF: unsupported version " + std::to_string(version));
    const auto kind = get<std::uint8_t>(in, "grid kind");
    Grid grid;
    try {
        if (kind == 0) {
            const auto n = get<std::uint64_t>(in, "dims");
            if (n > (std::uint64_t{1} << 30)) throw FormatError("SPSF: radial dims too large");
            const double h = get<double>(in, "spacing");
            grid = make_radial_grid(h * static_cast<double>(n), n);
        } else if (kind == 1) {
            std::array<std::uint64_t, 3> dims{};
            for (auto& d : dims) d = get<std::uint64_t>(in, "dims");
            if (dims[0] != dims[1] || dims[1] != dims[2]) throw FormatError("SPSF: box dims must be equal");
            if (dims[0] > 4096) throw FormatError("SPSF: box dims too large");
            const double h = get<double>(in, "spacing");
            grid = make_box_grid(0.5 * h * static_cast<double>(dims[0]), dims[0]);
        } else {
            throw FormatError("SPSF: unknown grid kind " + std::to_string(kind));
        }
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("SPSF: invalid grid: ") + e.what());
    }
    const double scale = get<double>(in, "scale factor");
    std::vector<double> values(node_count(grid));
    for (double& v : values) v = get<double>(in, "values");
    try {
        return Field(std::move(grid), std::move(values), scale);
    } catch (const InvalidArgument& e) {
        throw FormatError(std::string("SPSF: ") + e.what());
    }
}

void save_field(const std::string& path, const Field& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_field(out, f);
}

Field load_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    return read_field(in);
}

}  // namespace sps
