#pragma once

// Newtonian potential phi = |x|^-1 * rho and the Hartree energy
// B(u) = int phi_u u^2.
//
// Radial grids use cumulative trapezoid sums with the leading endpoint
// correction, which keeps the discrete kernel symmetric in the quadrature
// inner product. Box grids convolve with the spherically truncated kernel
// (1/|x| for |x| < L_t, 0 beyond), whose transform 4pi(1 - cos(k L_t))/k^2 is
// smooth at k = 0; the grid kernel is precomputed once per solver.

#include <memory>
#include <span>

#include "sps/mesh.hpp"

namespace sps {

struct CoulombSolverConfig {
    // Kernel truncation radius L_t for box grids; 0 selects 2*sqrt(3)*L.
    double truncation_radius = 0.0;
    // 2 zero-pads to twice the box (free space), 1 convolves periodically.
    int oversampling = 2;
};

// Throws InvalidArgument unless oversampling is 1 or 2 and
// 2*sqrt(3)*L <= L_t <= 6*L.
void validate(const CoulombSolverConfig& cfg, const BoxGrid& grid);

class BoxCoulombSolver {
public:
    BoxCoulombSolver(const BoxGrid& grid, const CoulombSolverConfig& cfg = {});
    ~BoxCoulombSolver();
    BoxCoulombSolver(const BoxCoulombSolver&) = delete;
    BoxCoulombSolver& operator=(const BoxCoulombSolver&) = delete;

    const BoxGrid& grid() const;
    double truncation_radius() const;
    // phi = |x|^-1 * rho for a density of any sign.
    void apply(std::span<const double> rho, std::span<double> phi);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Grid-agnostic front end used by the energy and solver code. Owns the
// transform plans on box grids, so an instance must not be shared between
// simultaneous solves.
class CoulombOperator {
public:
    explicit CoulombOperator(const Grid& grid, const CoulombSolverConfig& cfg = {});
    ~CoulombOperator();
    CoulombOperator(CoulombOperator&&) noexcept;
    CoulombOperator& operator=(CoulombOperator&&) noexcept;

    const Grid& grid() const { return disc_.grid(); }
    const Discretization& discretization() const { return disc_; }
    const CoulombSolverConfig& config() const { return cfg_; }
    void potential(std::span<const double> rho, std::span<double> phi);
    // B = int phi_u u^2; also fills phi if non-empty.
    double hartree(std::span<const double> u, std::span<double> phi = {});

private:
    Discretization disc_;
    CoulombSolverConfig cfg_;
    std::unique_ptr<BoxCoulombSolver> box_;
};

// Radial cumulative-quadrature potential for density rho at the nodes.
void radial_potential(const Discretization& disc, std::span<const double> rho, std::span<double> phi);

Field solve_phi(const Field& u, const CoulombSolverConfig& cfg = {});
double hartree_B(const Field& u, const CoulombSolverConfig& cfg = {});

}  // namespace sps
