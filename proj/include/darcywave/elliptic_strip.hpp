#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "darcywave/bulk_field.hpp"
#include "darcywave/chebyshev.hpp"
#include "darcywave/conformal.hpp"
#include "darcywave/errors.hpp"
#include "darcywave/forcing.hpp"
#include "darcywave/fourier.hpp"
#include "darcywave/multipliers.hpp"
#include "darcywave/parallel.hpp"
#include "darcywave/spectral_field.hpp"

namespace darcywave {

/// Per-mode Chebyshev collocation solver for (d_z^2 - k^2) u = r on [0, h]
/// with u(h) = top and u'(0) = bottom.
///
/// Rows 0 and M_z - 1 of the collocation matrix are replaced by the Neumann and
/// Dirichlet conditions. One LU factorization is kept per retained mode.
class StripSolver {
public:
    StripSolver(int modes, int m_z, double h)
        : modes_(modes), grid_(VerticalGrid::chebyshev(m_z, h)), d1_(cheb::diff_matrix(m_z, h)), d2_(d1_ * d1_) {
        if (modes < 1) throw InvalidGridError("StripSolver: need at least one mode");
        lu_.reserve(static_cast<std::size_t>(modes));
        for (int xi = 0; xi < modes; ++xi) {
            const double k = symbol::wavenumber(xi);
            Eigen::MatrixXd L = d2_ - k * k * Eigen::MatrixXd::Identity(m_z, m_z);
            L.row(0) = d1_.row(0);
            L.row(m_z - 1).setZero();
            L(m_z - 1, m_z - 1) = 1.0;
            lu_.emplace_back(L);
        }
    }

    /// Shared solver for (modes, M_z, h); built once per process.
    static std::shared_ptr<const StripSolver> cached(int modes, int m_z, double h) {
        static std::mutex mu;
        static std::map<std::tuple<int, int, double>, std::shared_ptr<const StripSolver>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto& slot = cache[{modes, m_z, h}];
        if (!slot) slot = std::make_shared<const StripSolver>(modes, m_z, h);
        return slot;
    }

    int modes() const noexcept { return modes_; }
    const VerticalGrid& grid() const noexcept { return grid_; }
    const Eigen::MatrixXd& d1() const noexcept { return d1_; }

    /// Solves one mode. rhs holds interior forcing samples on all nodes (ends are ignored).
    Eigen::VectorXcd solve(int xi, const Eigen::VectorXcd& rhs, cplx top, cplx bottom) const {
        if (xi < 0 || xi >= modes_) throw DomainError("StripSolver::solve: mode out of range");
        const int m = grid_.size();
        Eigen::VectorXcd b = rhs;
        b(0) = bottom;
        b(m - 1) = top;
        Eigen::MatrixXd re(m, 2);
        re.col(0) = b.real();
        re.col(1) = b.imag();
        const Eigen::MatrixXd x = lu_[static_cast<std::size_t>(xi)].solve(re);
        Eigen::VectorXcd u(m);
        for (int i = 0; i < m; ++i) u(i) = cplx(x(i, 0), x(i, 1));
        return u;
    }

    /// u'(h) of a nodal vector.
    cplx top_derivative(const Eigen::VectorXcd& u) const {
        return (d1_.row(grid_.size() - 1).cast<cplx>() * u)(0);
    }

private:
    int modes_;
    VerticalGrid grid_;
    Eigen::MatrixXd d1_, d2_;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

struct StripSolution {
    BulkField u;           ///< solution on the input grid
    SpectralField trace;   ///< Neumann trace at the top
};

/// Mixed problem: Laplace(u) = f1, u = 0 at z = h, d_z u = f2 at z = 0.
/// f1 lives on (M_w x Chebyshev) and is transformed row by row; f2 fixes the truncation size N.
inline StripSolution solve_mixed_bvp(const BulkField& f1, const SpectralField& f2) {
    if (f1.components() != 1) throw ShapeError("solve_mixed_bvp: f1 must be scalar");
    if (f1.grid().family() != NodeFamily::chebyshev) throw ShapeError("solve_mixed_bvp: f1 needs Chebyshev vertical nodes");
    if (f1.m_w() < f2.size()) throw ShapeError("solve_mixed_bvp: horizontal grid coarser than the truncation");
    const int n = f2.size(), modes = n / 2, mz = f1.m_z(), mw = f1.m_w();
    const auto solver = StripSolver::cached(modes, mz, f1.grid().depth());
    if (!(solver->grid() == f1.grid())) throw ShapeError("solve_mixed_bvp: vertical grid mismatch");

    // rhat(xi, iz)
    Eigen::MatrixXcd rhat(modes, mz);
    for (int iz = 0; iz < mz; ++iz) {
        const auto row = f1.row(0, iz);
        const auto c = fft::forward(std::span<const double>(row));
        for (int xi = 0; xi < modes; ++xi) rhat(xi, iz) = c[static_cast<std::size_t>(xi)];
    }
    Eigen::MatrixXcd uhat(modes, mz);
    std::vector<cplx> trace(static_cast<std::size_t>(modes));
    parallel_for(modes, [&](int xi) {
        const Eigen::VectorXcd r = rhat.row(xi).transpose();
        const Eigen::VectorXcd u = solver->solve(xi, r, cplx{}, f2.coeff(xi));
        uhat.row(xi) = u.transpose();
        trace[static_cast<std::size_t>(xi)] = solver->top_derivative(u);
    });
    trace[0] = cplx(trace[0].real(), 0.0);

    StripSolution out{BulkField(mw, f1.grid(), 1), SpectralField::from_half(std::move(trace), false)};
    for (int iz = 0; iz < mz; ++iz) {
        std::vector<cplx> half(static_cast<std::size_t>(modes));
        for (int xi = 0; xi < modes; ++xi) half[static_cast<std::size_t>(xi)] = uhat(xi, iz);
        out.u.set_row(0, iz, SpectralField::from_half(std::move(half), false).to_grid(mw));
    }
    return out;
}

struct HarmonicExtension {
    BulkField v;                 ///< extension on the grid
    SpectralField neumann_trace; ///< G f3
};

/// Laplace(v) = 0, v = f3 at z = h, d_z v = 0 at z = 0, in closed form per mode.
inline HarmonicExtension harmonic_extension(const SpectralField& f3, const VerticalGrid& grid, int m_w) {
    const double h = grid.depth();
    HarmonicExtension out{BulkField(m_w, grid, 1), dirichlet_neumann(f3, h)};
    for (int iz = 0; iz < grid.size(); ++iz) {
        const double z = grid[iz];
        const auto layer = apply_real_symbol(f3, [z, h](int xi) { return cplx(symbol::cosh_over_cosh(xi, z, h)); }, false);
        out.v.set_row(0, iz, layer.to_grid(m_w));
    }
    return out;
}

inline HarmonicExtension harmonic_extension(const SpectralField& f3, const VerticalGrid& grid) {
    return harmonic_extension(f3, grid, dealiased_size(f3.size()));
}

/// Discretization settings shared by the bulk assembly routines.
struct StripGrid {
    int n = 256;   ///< Fourier truncation
    int m_z = 48;  ///< Chebyshev nodes
    double h = 1.0;

    int m_w() const { return dealiased_size(n); }
    VerticalGrid vertical() const { return VerticalGrid::chebyshev(m_z, h); }
};

/// Bulk data of the lower-order remainder: f1 = |d1 R|^2 (div f) o R on the tensor grid
/// and f2 = (f o R) . (d1 R)^perp on the bottom.
struct RemainderData {
    BulkField f1;
    SpectralField f2;
};

inline RemainderData remainder_data(const SpectralField& psi, const ForcingSpec& spec, const StripGrid& sg) {
    const auto grid = sg.vertical();
    const int mw = sg.m_w();
    RemainderData d{BulkField(mw, grid, 1), SpectralField(sg.n, false)};
    std::vector<double> bottom(static_cast<std::size_t>(mw));
    for (int iz = 0; iz < grid.size(); ++iz) {
        const auto L = map_layer(psi, grid[iz], sg.h, mw);
        const auto div = compose_with_map(spec, L, Quantity::div_f);
        for (int j = 0; j < mw; ++j) d.f1(0, iz, j) = L.jacobian(j) * div[static_cast<std::size_t>(j)];
        if (iz == 0) {
            const auto f1v = compose_with_map(spec, L, Quantity::f1);
            const auto f2v = compose_with_map(spec, L, Quantity::f2);
            for (int j = 0; j < mw; ++j) {
                const auto i = static_cast<std::size_t>(j);
                // (d1 R)^perp = (-d1 R2, d1 R1)
                bottom[i] = -f1v[i] * L.d1r2[i] + f2v[i] * L.d1r1[i];
            }
        }
    }
    d.f2 = from_grid(bottom, sg.n);
    return d;
}

/// Lower-order remainder K(psi) = S(f1, f2), without the kappa factor.
inline SpectralField bulk_remainder_K(const SpectralField& psi, const ForcingSpec& spec, const StripGrid& sg) {
    if (spec.f_zero()) return SpectralField(sg.n, false);
    const auto d = remainder_data(psi, spec, sg);
    return solve_mixed_bvp(d.f1, d.f2).trace;
}

}  // namespace darcywave
