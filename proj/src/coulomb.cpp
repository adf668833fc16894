#include "sps/coulomb.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include "sps/errors.hpp"
#include "sps/kernels.hpp"
#include "fftw_util.hpp"

namespace sps {
namespace {

constexpr double pi = std::numbers::pi;

// 4 pi (1 - cos(k Lt)) / k^2 written without cancellation.
double truncated_symbol(double k, double lt) {
    if (k == 0.0) return 2.0 * pi * lt * lt;
    const double s = std::sin(0.5 * k * lt);
    return 8.0 * pi * s * s / (k * k);
}

}  // namespace

void validate(const CoulombSolverConfig& cfg, const BoxGrid& grid) {
    if (cfg.oversampling != 1 && cfg.oversampling != 2)
        throw InvalidArgument("coulomb: oversampling must be 1 or 2");
    if (cfg.truncation_radius == 0.0) return;
    const double lo = 2.0 * std::sqrt(3.0) * grid.half_width;
    const double hi = 6.0 * grid.half_width;
    if (!(cfg.truncation_radius >= lo * (1.0 - 1e-12) && cfg.truncation_radius <= hi))
        throw InvalidArgument("coulomb: truncation radius must lie in [2*sqrt(3)*L, 6*L]");
}

// ---------------------------------------------------------------------------
// Box solver

struct BoxCoulombSolver::Impl {
    BoxGrid grid;
    double lt = 0.0;
    std::size_t m = 0;          // periodic size per axis (n or 2n)
    std::size_t mc = 0;         // m/2 + 1
    std::vector<double> symbol; // real transform of the grid kernel, m*m*mc
    fft::Buffer buffer;         // in-place r2c/c2r, m*m*2*mc
    fft::Plan forward, backward;

    std::size_t padded(std::size_t i, std::size_t j, std::size_t k) const { return (i * m + j) * 2 * mc + k; }

    Impl(const BoxGrid& g, const CoulombSolverConfig& cfg) : grid(g) {
        validate(cfg, g);
        const std::size_t n = g.n;
        const double L = g.half_width;
        const double h = g.spacing();
        lt = cfg.truncation_radius > 0.0 ? cfg.truncation_radius : 2.0 * std::sqrt(3.0) * L;
        m = n * static_cast<std::size_t>(cfg.oversampling);
        mc = m / 2 + 1;

        // Grid kernel G(j h) for j in [0, 2n]^3: inverse transform of the
        // symbol sampled with period P = 8L (aliasing-free for Lt <= 6L),
        // band-limited at the grid Nyquist frequency.
        const std::size_t nk = 2 * n + 1;
        const double P = 8.0 * L;
        const double dk = 2.0 * pi / P;
        std::vector<double> k2(nk);
        for (std::size_t a = 0; a < nk; ++a) k2[a] = std::pow(dk * static_cast<double>(a), 2);
        fft::Buffer table(nk * nk * nk);
        for (std::size_t a = 0; a < nk; ++a)
            for (std::size_t b = 0; b < nk; ++b)
                for (std::size_t c = 0; c < nk; ++c)
                    table[(a * nk + b) * nk + c] = truncated_symbol(std::sqrt(k2[a] + k2[b] + k2[c]), lt);
        {
            const int d = static_cast<int>(nk);
            fft::Plan dct([&] {
                return fftw_plan_r2r_3d(d, d, d, table.data(), table.data(), FFTW_REDFT00, FFTW_REDFT00,
                                        FFTW_REDFT00, FFTW_ESTIMATE);
            });
            dct.execute();
        }
        const double norm = 1.0 / (P * P * P);

        buffer = fft::Buffer(m * m * 2 * mc);
        const int mi = static_cast<int>(m);
        forward = fft::Plan([&] {
            return fftw_plan_dft_r2c_3d(mi, mi, mi, buffer.data(), reinterpret_cast<fftw_complex*>(buffer.data()),
                                        FFTW_ESTIMATE);
        });
        backward = fft::Plan([&] {
            return fftw_plan_dft_c2r_3d(mi, mi, mi, reinterpret_cast<fftw_complex*>(buffer.data()), buffer.data(),
                                        FFTW_ESTIMATE);
        });

        auto wrap = [&](std::size_t i) { return i <= m / 2 ? i : m - i; };
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t k = 0; k < m; ++k)
                    buffer[padded(i, j, k)] = table[(wrap(i) * nk + wrap(j)) * nk + wrap(k)] * norm;
        table = fft::Buffer();
        forward.execute();

        // The kernel is real and even, so its transform is real.
        const double cell = h * h * h / static_cast<double>(m * m * m);
        symbol.resize(m * m * mc);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t k = 0; k < mc; ++k)
                    symbol[(i * m + j) * mc + k] = buffer[padded(i, j, 2 * k)] * cell;
    }

    void apply(std::span<const double> rho, std::span<double> phi) {
        const std::size_t n = grid.n;
        if (rho.size() != grid.size() || phi.size() != grid.size())
            throw InvalidArgument("coulomb: density size does not match the box grid");
        std::fill(buffer.begin(), buffer.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                std::copy_n(rho.data() + grid.index(i, j, 0), n, buffer.data() + padded(i, j, 0));
        forward.execute();
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                double* row = buffer.data() + padded(i, j, 0);
                const double* s = symbol.data() + (i * m + j) * mc;
                for (std::size_t k = 0; k < mc; ++k) {
                    row[2 * k] *= s[k];
                    row[2 * k + 1] *= s[k];
                }
            }
        backward.execute();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                std::copy_n(buffer.data() + padded(i, j, 0), n, phi.data() + grid.index(i, j, 0));
    }
};

BoxCoulombSolver::BoxCoulombSolver(const BoxGrid& grid, const CoulombSolverConfig& cfg)
    : impl_(std::make_unique<Impl>(grid, cfg)) {}
BoxCoulombSolver::~BoxCoulombSolver() = default;
const BoxGrid& BoxCoulombSolver::grid() const { return impl_->grid; }
double BoxCoulombSolver::truncation_radius() const { return impl_->lt; }
void BoxCoulombSolver::apply(std::span<const double> rho, std::span<double> phi) { impl_->apply(rho, phi); }

// ---------------------------------------------------------------------------
// Radial

void radial_potential(const Discretization& disc, std::span<const double> rho, std::span<double> phi) {
    const std::size_t m = rho.size();
    const double h = disc.spacing();
    const auto r = disc.radius();
    // Inner sums int_0^r s^2 rho (trapezoid, zero at the origin).
    double acc = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double f = r[i] * r[i] * rho[i];
        acc += 0.5 * (prev + f);
        prev = f;
        phi[i] = 4.0 * pi * h * acc / r[i];
    }
    // Outer sums int_r^R s rho (trapezoid, zero at R) and the endpoint term.
    acc = 0.0;
    prev = 0.0;
    for (std::size_t i = m; i-- > 0;) {
        const double g = r[i] * rho[i];
        acc += 0.5 * (prev + g);
        prev = g;
        phi[i] += 4.0 * pi * h * acc - pi * h * h / 3.0 * rho[i];
    }
}

// ---------------------------------------------------------------------------

CoulombOperator::CoulombOperator(const Grid& grid, const CoulombSolverConfig& cfg) : disc_(grid), cfg_(cfg) {
    if (const auto* b = std::get_if<BoxGrid>(&grid)) box_ = std::make_unique<BoxCoulombSolver>(*b, cfg);
}
CoulombOperator::~CoulombOperator() = default;
CoulombOperator::CoulombOperator(CoulombOperator&&) noexcept = default;
CoulombOperator& CoulombOperator::operator=(CoulombOperator&&) noexcept = default;

void CoulombOperator::potential(std::span<const double> rho, std::span<double> phi) {
    if (box_)
        box_->apply(rho, phi);
    else
        radial_potential(disc_, rho, phi);
}

double CoulombOperator::hartree(std::span<const double> u, std::span<double> phi) {
    std::vector<double> rho(u.size());
    kernels::mul(u, u, rho);
    std::vector<double> local;
    if (phi.empty()) {
        local.resize(u.size());
        phi = local;
    }
    potential(rho, phi);
    return disc_.inner(phi, rho);
}

namespace {

void warn_if_truncated(const Field& u) {
    if (u.radial()) return;
    double total = 0.0;
    for (double v : u.values()) total += v * v;
    total *= std::pow(grid_spacing(u.grid()), 3);
    if (total > 0.0 && tail_mass(u) > 1e-10 * total)
        warn("coulomb: density reaches the outer 10% of the box; enlarge L to avoid truncation error");
}

}  // namespace

Field solve_phi(const Field& u, const CoulombSolverConfig& cfg) {
    warn_if_truncated(u);
    CoulombOperator op(u.grid(), cfg);
    std::vector<double> rho(u.size()), phi(u.size());
    kernels::mul(u.values(), u.values(), rho);
    op.potential(rho, phi);
    return Field(u.grid(), std::move(phi), u.scale_factor());
}

double hartree_B(const Field& u, const CoulombSolverConfig& cfg) {
    warn_if_truncated(u);
    CoulombOperator op(u.grid(), cfg);
    return op.hartree(u.values());
}

}  // namespace sps
