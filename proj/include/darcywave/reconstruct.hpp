#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "darcywave/bulk_field.hpp"
#include "darcywave/conformal.hpp"
#include "darcywave/elliptic_strip.hpp"
#include "darcywave/errors.hpp"
#include "darcywave/forcing.hpp"
#include "darcywave/multipliers.hpp"
#include "darcywave/params.hpp"
#include "darcywave/spectral_field.hpp"

namespace darcywave {

/// Flattened pressure q on the tensor grid together with its first derivatives.
struct FlatPressure {
    BulkField q;
    BulkField grad;  ///< (d_w q, d_z q)
    SpectralField top_neumann;
};

/// Solves Laplace(q) = f1 in the strip, d_z q = f2 on the bottom, q = f3 on the top with
/// f1 = kappa |d1 R|^2 (div f) o R, f2 = kappa (f o R) . (d1 R)^perp and f3 = g psi + kappa phi o R.
///
/// q = u + v where u solves the mixed problem with zero top data by Chebyshev collocation
/// and v is the harmonic extension of f3, evaluated with exact per-mode multipliers.
inline FlatPressure solve_flat_pressure(double upkappa, const SpectralField& psi, const ForcingSpec& spec,
                                        const PhysicalParams& params, const StripGrid& sg) {
    params.validate();
    if (psi.size() != sg.n) throw ShapeError("solve_flat_pressure: psi size does not match the grid");
    const double kappa = upkappa * upkappa;
    const auto grid = sg.vertical();
    const int mw = sg.m_w(), mz = grid.size(), n = sg.n;
    const double h = sg.h;

    BulkField u(mw, grid, 1);
    Eigen::MatrixXd u_z = Eigen::MatrixXd::Zero(mz, mw);
    SpectralField u_trace(n, false);
    if (!spec.f_zero() && kappa != 0.0) {
        auto d = remainder_data(psi, spec, sg);
        d.f1.component(0) *= kappa;
        d.f2 *= kappa;
        auto sol = solve_mixed_bvp(d.f1, d.f2);
        u = std::move(sol.u);
        u_trace = sol.trace;
        u_z = derivative_z(u, 0);
    }

    const auto top = map_layer(psi, h, h, mw);
    const auto phi_top = compose_with_map(spec, top, Quantity::phi);
    SpectralField f3 = from_grid(phi_top, n);
    f3 *= kappa;
    f3 += params.g * psi.with_mean();

    FlatPressure out{BulkField(mw, grid, 1), BulkField(mw, grid, 2), u_trace + dirichlet_neumann(f3, h)};
    for (int iz = 0; iz < mz; ++iz) {
        const double z = grid[iz];
        const auto v = apply_real_symbol(f3, [z, h](int xi) { return cplx(symbol::cosh_over_cosh(xi, z, h)); }, false);
        const auto vz = apply_real_symbol(
            f3, [z, h](int xi) { return cplx(symbol::wavenumber(xi) * symbol::sinh_over_cosh(xi, z, h)); }, false);
        const auto vg = v.to_grid(mw);
        const auto vzg = vz.to_grid(mw);
        std::vector<double> qrow(static_cast<std::size_t>(mw));
        for (int j = 0; j < mw; ++j) {
            const auto i = static_cast<std::size_t>(j);
            qrow[i] = u(0, iz, j) + vg[i];
            out.grad(1, iz, j) = u_z(iz, j) + vzg[i];
        }
        out.q.set_row(0, iz, qrow);
        out.grad.set_row(0, iz, grid_derivative_w(qrow));
    }
    return out;
}

/// Traveling wave fields transported to the image of the collocation grid.
struct PhysicalSolution {
    double upkappa = 0.0;
    PhysicalParams params;
    BulkField R;      ///< image nodes R_psi(w, z)
    BulkField d1R;    ///< d1 R_psi
    BulkField q;      ///< flattened pressure
    BulkField p;      ///< physical pressure at the image nodes
    BulkField grad_p; ///< physical pressure gradient
    BulkField v;      ///< velocity at the image nodes
    Eigen::MatrixXd jacobian;  ///< det grad R per node
    std::vector<double> surface_x1, surface_x2;
};

/// Evaluates p = q o R^{-1} + g (h - x2) and v = kappa f - grad p - g e2 on the image grid.
/// grad p = (grad R)^{-T} (grad q - g grad R2) is formed in flattened coordinates.
inline PhysicalSolution reconstruct_fields(double upkappa, const SpectralField& psi, const FlatPressure& flat,
                                           const ForcingSpec& spec, const PhysicalParams& params,
                                           double jacobian_min = 0.0) {
    const auto& grid = flat.q.grid();
    const int mw = flat.q.m_w(), mz = grid.size();
    const double kappa = upkappa * upkappa, g = params.g, h = grid.depth();
    PhysicalSolution s;
    s.upkappa = upkappa;
    s.params = params;
    s.R = riemann_map(psi, grid, mw);
    s.d1R = map_derivative(psi, grid, mw);
    s.q = flat.q;
    s.p = BulkField(mw, grid, 1);
    s.grad_p = BulkField(mw, grid, 2);
    s.v = BulkField(mw, grid, 2);
    s.jacobian.resize(mz, mw);
    for (int iz = 0; iz < mz; ++iz)
        for (int j = 0; j < mw; ++j) {
            const double a = s.d1R(0, iz, j), b = s.d1R(1, iz, j);
            const double J = a * a + b * b;
            s.jacobian(iz, j) = J;
            if (!(J > jacobian_min))
                throw DegenerateMapError("reconstruct_fields: Jacobian " + std::to_string(J) + " below threshold at node (" +
                                         std::to_string(iz) + ", " + std::to_string(j) + ")");
            const double x1 = s.R(0, iz, j), x2 = s.R(1, iz, j);
            // gradient of p o R in (w, z); grad R2 = (b, a)
            const double G1 = flat.grad(0, iz, j) - g * b;
            const double G2 = flat.grad(1, iz, j) - g * a;
            const double px = (a * G1 - b * G2) / J;
            const double py = (b * G1 + a * G2) / J;
            s.p(0, iz, j) = flat.q(0, iz, j) + g * (h - x2);
            s.grad_p(0, iz, j) = px;
            s.grad_p(1, iz, j) = py;
            s.v(0, iz, j) = kappa * evaluate_quantity(spec, Quantity::f1, x1, x2) - px;
            s.v(1, iz, j) = kappa * evaluate_quantity(spec, Quantity::f2, x1, x2) - py - g;
        }
    s.surface_x1 = s.R.row(0, mz - 1);
    s.surface_x2 = s.R.row(1, mz - 1);
    return s;
}

/// Sup-norm residuals of the traveling free-boundary Darcy system.
struct ResidualReport {
    double divergence = 0.0;  ///< div v in the bulk
    double darcy = 0.0;       ///< v + grad p + g e2 - kappa f in the bulk
    double bottom = 0.0;      ///< e2 . v on the bottom
    double kinematic = 0.0;   ///< (v - c e1) . nu on the free surface
    double dynamic = 0.0;     ///< p - kappa phi on the free surface
    double min_jacobian = 0.0;
    double max_condition = 0.0;  ///< largest 1 / det grad R over the nodes

    double max() const { return std::max({divergence, darcy, bottom, kinematic, dynamic}); }

    std::vector<std::pair<std::string, double>> entries() const {
        return {{"divergence", divergence}, {"darcy", darcy}, {"bottom", bottom}, {"kinematic", kinematic}, {"dynamic", dynamic}};
    }
};

/// Physical gradient of a scalar sampled on the image grid, by spectral differentiation in w,
/// Chebyshev differentiation in z and the inverse Jacobian of R.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> physical_gradient(const PhysicalSolution& s, const BulkField& f, int c) {
    const Eigen::MatrixXd fw = derivative_w(f, c);
    const Eigen::MatrixXd fz = derivative_z(f, c);
    Eigen::MatrixXd gx(fw.rows(), fw.cols()), gy(fw.rows(), fw.cols());
    for (Eigen::Index iz = 0; iz < fw.rows(); ++iz)
        for (Eigen::Index j = 0; j < fw.cols(); ++j) {
            const double a = s.d1R.component(0)(iz, j), b = s.d1R.component(1)(iz, j);
            const double J = s.jacobian(iz, j);
            gx(iz, j) = (a * fw(iz, j) - b * fz(iz, j)) / J;
            gy(iz, j) = (b * fw(iz, j) + a * fz(iz, j)) / J;
        }
    return {gx, gy};
}

/// Checks the traveling system on the image grid. Derivatives are recomputed from the sampled fields.
inline ResidualReport verify_traveling_system(const PhysicalSolution& s, double upkappa, const SpectralField& psi,
                                              const ForcingSpec& spec, const PhysicalParams& params) {
    (void)psi;
    ResidualReport r;
    const int mz = s.v.m_z(), mw = s.v.m_w();
    const double kappa = upkappa * upkappa;
    const auto [v1x, v1y] = physical_gradient(s, s.v, 0);
    const auto [v2x, v2y] = physical_gradient(s, s.v, 1);
    (void)v1y;
    (void)v2x;
    // p o R minus its affine hydrostatic part is smooth and periodic in w
    BulkField pt(mw, s.p.grid(), 1);
    for (int iz = 0; iz < mz; ++iz)
        for (int j = 0; j < mw; ++j) pt(0, iz, j) = s.p(0, iz, j) + params.g * s.R(1, iz, j);
    const auto [ptx, pty] = physical_gradient(s, pt, 0);
    r.min_jacobian = s.jacobian.minCoeff();
    r.max_condition = 1.0 / r.min_jacobian;
    for (int iz = 0; iz < mz; ++iz)
        for (int j = 0; j < mw; ++j) {
            const double x1 = s.R(0, iz, j), x2 = s.R(1, iz, j);
            r.divergence = std::max(r.divergence, std::abs(v1x(iz, j) + v2y(iz, j)));
            const double px = ptx(iz, j), py = pty(iz, j) - params.g;
            const double d1 = s.v(0, iz, j) + px - kappa * evaluate_quantity(spec, Quantity::f1, x1, x2);
            const double d2 = s.v(1, iz, j) + py + params.g - kappa * evaluate_quantity(spec, Quantity::f2, x1, x2);
            r.darcy = std::max(r.darcy, std::hypot(d1, d2));
        }
    for (int j = 0; j < mw; ++j) r.bottom = std::max(r.bottom, std::abs(s.v(1, 0, j)));
    const int top = mz - 1;
    for (int j = 0; j < mw; ++j) {
        const double a = s.d1R(0, top, j), b = s.d1R(1, top, j);
        const double len = std::hypot(a, b);
        const double nu1 = -b / len, nu2 = a / len;
        r.kinematic = std::max(r.kinematic, std::abs((s.v(0, top, j) - params.c) * nu1 + s.v(1, top, j) * nu2));
        const double phi = evaluate_quantity(spec, Quantity::phi, s.R(0, top, j), s.R(1, top, j));
        r.dynamic = std::max(r.dynamic, std::abs(s.p(0, top, j) - kappa * phi));
    }
    return r;
}

/// Full pipeline from a converged branch point to the residual report.
inline ResidualReport verify_point(double upkappa, const SpectralField& psi, const ForcingSpec& spec,
                                   const PhysicalParams& params, const StripGrid& sg) {
    const auto flat = solve_flat_pressure(upkappa, psi, spec, params, sg);
    const auto sol = reconstruct_fields(upkappa, psi, flat, spec, params);
    return verify_traveling_system(sol, upkappa, psi, spec, params);
}

/// Post-processing only: bilinear resampling of a nodal field onto a Cartesian grid
/// x1 in [0, 1), x2 in [x2_min, x2_max]. Each image cell is inverted as a bilinear quad;
/// points outside the fluid domain are NaN.
inline Eigen::MatrixXd resample_cartesian(const PhysicalSolution& s, const BulkField& f, int c, int nx, int ny,
                                          double x2_min, double x2_max) {
    const int mz = f.m_z(), mw = f.m_w();
    Eigen::MatrixXd out = Eigen::MatrixXd::Constant(ny, nx, std::numeric_limits<double>::quiet_NaN());
    auto node = [&](int iz, int j, double shift) { return Eigen::Vector2d(s.R(0, iz, j) + shift, s.R(1, iz, j)); };
    for (int iz = 0; iz + 1 < mz; ++iz)
        for (int j = 0; j < mw; ++j) {
            const int j1 = (j + 1) % mw;
            const double wrap = j1 == 0 ? 1.0 : 0.0;
            const Eigen::Vector2d P00 = node(iz, j, 0), P10 = node(iz, j1, wrap), P01 = node(iz + 1, j, 0),
                                  P11 = node(iz + 1, j1, wrap);
            const double f00 = f(c, iz, j), f10 = f(c, iz, j1), f01 = f(c, iz + 1, j), f11 = f(c, iz + 1, j1);
            const double xmin = std::min({P00.x(), P10.x(), P01.x(), P11.x()}), xmax = std::max({P00.x(), P10.x(), P01.x(), P11.x()});
            const double ymin = std::min({P00.y(), P10.y(), P01.y(), P11.y()}), ymax = std::max({P00.y(), P10.y(), P01.y(), P11.y()});
            for (int iy = 0; iy < ny; ++iy) {
                const double y = ny == 1 ? x2_min : x2_min + (x2_max - x2_min) * iy / (ny - 1);
                if (y < ymin || y > ymax) continue;
                for (int ix = 0; ix < nx; ++ix) {
                    for (double shift : {-1.0, 0.0, 1.0}) {
                        const double x = static_cast<double>(ix) / nx + shift;
                        if (x < xmin || x > xmax) continue;
                        Eigen::Vector2d st(0.5, 0.5);
                        const Eigen::Vector2d target(x, y);
                        bool inside = false;
                        for (int it = 0; it < 20; ++it) {
                            const double a = st.x(), b = st.y();
                            const Eigen::Vector2d F = (1 - a) * (1 - b) * P00 + a * (1 - b) * P10 + (1 - a) * b * P01 + a * b * P11 - target;
                            Eigen::Matrix2d Jm;
                            Jm.col(0) = (1 - b) * (P10 - P00) + b * (P11 - P01);
                            Jm.col(1) = (1 - a) * (P01 - P00) + a * (P11 - P10);
                            st -= Jm.inverse() * F;
                            if (F.norm() < 1e-13) break;
                        }
                        if (st.x() >= -1e-12 && st.x() <= 1 + 1e-12 && st.y() >= -1e-12 && st.y() <= 1 + 1e-12) inside = true;
                        if (!inside) continue;
                        const double a = st.x(), b = st.y();
                        out(iy, ix) = (1 - a) * (1 - b) * f00 + a * (1 - b) * f10 + (1 - a) * b * f01 + a * b * f11;
                    }
                }
            }
        }
    return out;
}

}  // namespace darcywave
