#pragma once

// Grids, fields and the discrete operators every functional is built from.
//
// Radial grids store u at the interior nodes r_i = i*h, i = 1..n-1. The
// operators act on w = r*u with w(0) = w(r_max) = 0, which makes
// Delta u = w''/r second order and <-Delta u, u> equal to the discrete
// Dirichlet energy to rounding.
//
// Box grids are cell centred on [-L, L]^3 with n (a power of two) nodes per
// axis, row-major with z fastest. Faces carry homogeneous Dirichlet data
// through zero ghost nodes; a periodic mode exists for operator tests.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sps {

struct RadialGrid {
    double r_max = 0.0;
    std::size_t n = 0;

    double spacing() const { return r_max / static_cast<double>(n); }
    std::size_t size() const { return n - 1; }
    double node(std::size_t i) const { return static_cast<double>(i + 1) * spacing(); }
};

enum class BoxBoundary : std::uint8_t { dirichlet, periodic };

struct BoxGrid {
    double half_width = 0.0;
    std::size_t n = 0;
    BoxBoundary boundary = BoxBoundary::dirichlet;

    double spacing() const { return 2.0 * half_width / static_cast<double>(n); }
    std::size_t size() const { return n * n * n; }
    double coord(std::size_t j) const { return -half_width + (static_cast<double>(j) + 0.5) * spacing(); }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * n + j) * n + k; }
};

using Grid = std::variant<RadialGrid, BoxGrid>;

RadialGrid make_radial_grid(double r_max, std::size_t n);
BoxGrid make_box_grid(double half_width, std::size_t n, BoxBoundary boundary = BoxBoundary::dirichlet);

std::size_t node_count(const Grid& grid);
double grid_spacing(const Grid& grid);
// Same kind, node count and spacing (to 1e-12 relative).
bool compatible(const Grid& a, const Grid& b);
bool is_radial(const Grid& grid);
std::string describe(const Grid& grid);

// Precomputed per-grid geometry: quadrature weights, |x| at nodes and the
// stencil helpers. Cheap to build; the solver keeps one per workspace.
class Discretization {
public:
    explicit Discretization(const Grid& grid);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return weights_.size(); }
    double spacing() const { return h_; }
    std::span<const double> weights() const { return weights_; }
    std::span<const double> radius() const { return radius_; }

    double integrate(std::span<const double> f) const;
    double inner(std::span<const double> a, std::span<const double> b) const;
    void laplacian(std::span<const double> u, std::span<double> out) const;
    double grad_sq(std::span<const double> u) const;
    // int V (3 u^2 + 2 u grad(u).x) dx with eighth-order differences; the
    // integration-by-parts partner of -int (grad V . x) u^2 dx.
    double virial_potential_term(std::span<const double> v, std::span<const double> u) const;

private:
    Grid grid_;
    double h_ = 0.0;
    std::vector<double> weights_;
    std::vector<double> radius_;
    std::vector<double> inv_radius_;  // radial only
};

class Field {
public:
    Field() = default;
    // Throws InvalidArgument on size mismatch, non-finite values or scale <= 0.
    Field(Grid grid, std::vector<double> values, double scale_factor = 1.0);

    static Field zeros(const Grid& grid);
    // Samples a radial profile f(|x|) at every node.
    static Field from_radial(const Grid& grid, const std::function<double(double)>& f);
    // Samples f(x, y, z); on a radial grid the point is (r, 0, 0).
    static Field from_point(const Grid& grid, const std::function<double(double, double, double)>& f);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    const std::vector<double>& data() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double scale_factor() const { return scale_; }
    bool radial() const { return is_radial(grid_); }

    // Metadata-only override; used by negative controls in the scaling suite.
    void set_scale_factor(double t) { scale_ = t; }

private:
    Grid grid_{RadialGrid{}};
    std::vector<double> values_;
    double scale_ = 1.0;
};

double integrate(const Field& f);
double inner(const Field& a, const Field& b);
// (int |u|^q)^(1/q); q = infinity gives max |u|. Throws for q < 1.
double lp_norm(const Field& u, double q);
double grad_sq(const Field& u);
Field apply_laplacian(const Field& u);
// u^t(x) = t^(3/2) u(t x) realised by shrinking the grid by t and scaling
// the values by t^(3/2). Throws for t <= 0.
Field rescale(const Field& u, double t);

// Pointwise helpers
Field abs(const Field& u);
Field scaled(const Field& u, double c);

// Mass outside 0.9*r_max (radial) or outside the inner 90% box; used for the
// truncation warning.
double tail_mass(const Field& u);

// SPSF binary field files.
void write_field(std::ostream& out, const Field& f);
Field read_field(std::istream& in);
void save_field(const std::string& path, const Field& f);
Field load_field(const std::string& path);

}  // namespace sps
