#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "darcywave/conformal.hpp"
#include "darcywave/elliptic_strip.hpp"
#include "darcywave/errors.hpp"
#include "darcywave/forcing.hpp"
#include "darcywave/fourier.hpp"
#include "darcywave/gmres.hpp"
#include "darcywave/multipliers.hpp"
#include "darcywave/params.hpp"
#include "darcywave/spectral_field.hpp"

namespace darcywave {

/// Coefficient vector of a real mean-zero field: sqrt(2) (Re c_xi, Im c_xi) for xi = 1..N/2-1.
/// The Euclidean norm of the vector equals the L2(T) norm of the field.
inline Eigen::VectorXd pack(const SpectralField& f) {
    const int modes = f.modes();
    Eigen::VectorXd v(2 * (modes - 1));
    for (int xi = 1; xi < modes; ++xi) {
        const cplx c = f.coeff(xi);
        v(2 * (xi - 1)) = std::sqrt(2.0) * c.real();
        v(2 * (xi - 1) + 1) = std::sqrt(2.0) * c.imag();
    }
    return v;
}

inline SpectralField unpack(const Eigen::VectorXd& v) {
    const int modes = static_cast<int>(v.size()) / 2 + 1;
    std::vector<cplx> half(static_cast<std::size_t>(modes));
    for (int xi = 1; xi < modes; ++xi)
        half[static_cast<std::size_t>(xi)] = cplx(v(2 * (xi - 1)), v(2 * (xi - 1) + 1)) / std::sqrt(2.0);
    return SpectralField::from_half(std::move(half), true);
}

/// X and Y on the dealiased top-trace grid.
struct EllipticityFields {
    std::vector<double> X;
    std::vector<double> Y;
    double min_abs_x_minus_iy = 0.0;  ///< min |X - iY| = min |X + iY|
};

/// Every top-trace quantity that P, A and Q share for one (upkappa, psi).
struct TraceState {
    double kappa = 0.0;     ///< upkappa^2
    MapLayer top;           ///< R_psi(., h) and d1 R_psi(., h) on the dealiased grid
    std::vector<double> phi, d1_phi, d2_phi, f1, f2;
    EllipticityFields xy;
};

enum class InvertMethod { automatic, iterative, dense };

struct InvertOptions {
    InvertMethod method = InvertMethod::automatic;
    double rel_tol = 1e-12;
    int max_iters = 300;
    int dense_limit = 256;  ///< largest N for the dense fallback
};

/// mu(xi) for g, c: 1 + 2 pi g |xi| (tanh(2 pi |xi| h) - 1) / (2 pi g |xi| - 2 pi i c xi), and 0 at xi = 0.
inline cplx linearized_symbol(int xi, const PhysicalParams& p) {
    if (!(p.g > 0.0) && p.c == 0.0) throw SingularOperatorError("linearized_symbol: g = c = 0");
    if (xi == 0) return {};
    return 1.0 + symbol::s_down(xi, p.h) * p.g / cplx(kTwoPi * p.g * std::abs(xi), -kTwoPi * p.c * xi);
}

/// mu(xi) - 1, evaluated without cancellation.
inline cplx linearized_symbol_deviation(int xi, const PhysicalParams& p) {
    if (!(p.g > 0.0) && p.c == 0.0) throw SingularOperatorError("linearized_symbol: g = c = 0");
    if (xi == 0) return cplx(-1.0, 0.0);
    return symbol::s_down(xi, p.h) * p.g / cplx(kTwoPi * p.g * std::abs(xi), -kTwoPi * p.c * xi);
}

namespace detail {

/// T_N[grid * spectrum]: multiply on the m-point grid, transform back, truncate to N.
inline ComplexSpectrum grid_product(const std::vector<cplx>& grid, const ComplexSpectrum& s) {
    const int m = static_cast<int>(grid.size());
    auto v = s.to_grid(m);
    for (int j = 0; j < m; ++j) v[static_cast<std::size_t>(j)] *= grid[static_cast<std::size_t>(j)];
    return complex_from_grid(v, s.size());
}

inline double grid_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace detail

/// The operators P, A, Q, F for fixed forcing, parameters and discretization.
class WaveOperator {
public:
    WaveOperator(ForcingSpec spec, PhysicalParams params, int n = 256, int m_z = 48)
        : spec_(std::move(spec)), params_(params), sg_{n, m_z, params.h} {
        params_.validate();
        spec_.validate();
        if (n < 4 || n % 2 != 0) throw InvalidGridError("WaveOperator: N must be even and >= 4");
    }

    const ForcingSpec& forcing() const noexcept { return spec_; }
    const PhysicalParams& params() const noexcept { return params_; }
    int n() const noexcept { return sg_.n; }
    int m_z() const noexcept { return sg_.m_z; }
    int m() const noexcept { return sg_.m_w(); }
    const StripGrid& strip() const noexcept { return sg_; }

    /// Dimension of the packed real mean-zero space.
    int dim() const noexcept { return sg_.n - 2; }

    TraceState trace_state(double upkappa, const SpectralField& psi) const {
        check_field(psi);
        TraceState s;
        s.kappa = upkappa * upkappa;
        s.top = map_layer(psi, params_.h, params_.h, m());
        s.phi = compose_with_map(spec_, s.top, Quantity::phi);
        s.d1_phi = compose_with_map(spec_, s.top, Quantity::d1_phi);
        s.d2_phi = compose_with_map(spec_, s.top, Quantity::d2_phi);
        s.f1 = compose_with_map(spec_, s.top, Quantity::f1);
        s.f2 = compose_with_map(spec_, s.top, Quantity::f2);
        const int mm = m();
        s.xy.X.resize(static_cast<std::size_t>(mm));
        s.xy.Y.resize(static_cast<std::size_t>(mm));
        double mn = std::numeric_limits<double>::infinity();
        for (int j = 0; j < mm; ++j) {
            const auto i = static_cast<std::size_t>(j);
            s.xy.X[i] = s.kappa * (s.f1[i] - s.d1_phi[i]) - params_.c;
            s.xy.Y[i] = s.kappa * (s.d2_phi[i] - s.f2[i]) + params_.g;
            mn = std::min(mn, std::hypot(s.xy.X[i], s.xy.Y[i]));
        }
        s.xy.min_abs_x_minus_iy = mn;
        return s;
    }

    EllipticityFields xy_fields(double upkappa, const SpectralField& psi) const { return trace_state(upkappa, psi).xy; }

    /// Lower-order remainder K(psi) without the kappa factor.
    SpectralField bulk_remainder(const SpectralField& psi) const { return bulk_remainder_K(psi, spec_, sg_); }

    /// P(upkappa, psi). The zero mode is kept so that the mean identity can be inspected.
    SpectralField residual(double upkappa, const SpectralField& psi) const {
        const auto s = trace_state(upkappa, psi);
        return residual(s, psi);
    }

    SpectralField residual(const TraceState& s, const SpectralField& psi) const {
        const int n = sg_.n, mm = m();
        const double K = s.kappa;
        const SpectralField phiR = from_grid(s.phi, n);
        SpectralField out = dirichlet_neumann(params_.g * psi.with_mean() + K * phiR, params_.h).with_mean();
        out -= params_.c * derivative(psi).with_mean();
        std::vector<double> fperp(static_cast<std::size_t>(mm));
        for (int j = 0; j < mm; ++j) {
            const auto i = static_cast<std::size_t>(j);
            fperp[i] = -s.f1[i] * s.top.d1r2[i] + s.f2[i] * s.top.d1r1[i];
        }
        out -= K * from_grid(fperp, n);
        if (K != 0.0 && !spec_.f_zero()) out += K * bulk_remainder(psi);
        return out;
    }

    /// The complex bracket P+((X - iY) P+ d1 Psi) + P-((X + iY) P- d1 Psi) before taking the real part.
    ComplexSpectrum principal_bracket(const EllipticityFields& xy, const SpectralField& Psi) const {
        check_field(Psi);
        const auto d = derivative(ComplexSpectrum::from_real(Psi));
        const auto bp = project_pm(d, Half::plus);
        const auto bm = project_pm(d, Half::minus);
        const int mm = m();
        std::vector<cplx> xm(static_cast<std::size_t>(mm)), xp(xm);
        for (int j = 0; j < mm; ++j) {
            const auto i = static_cast<std::size_t>(j);
            xm[i] = cplx(xy.X[i], -xy.Y[i]);
            xp[i] = cplx(xy.X[i], xy.Y[i]);
        }
        return project_pm(detail::grid_product(xm, bp), Half::plus) + project_pm(detail::grid_product(xp, bm), Half::minus);
    }

    /// A(upkappa, psi) Psi.
    SpectralField apply_A(const EllipticityFields& xy, const SpectralField& Psi) const {
        return principal_bracket(xy, Psi).real_part(true);
    }

    SpectralField apply_A(double upkappa, const SpectralField& psi, const SpectralField& Psi) const {
        return apply_A(xy_fields(upkappa, psi), Psi);
    }

    /// Complex assembly of Q before the real part is taken.
    ComplexSpectrum remainder_Q_complex(const TraceState& s, const SpectralField& psi) const {
        const int n = sg_.n, mm = m();
        const double K = s.kappa, h = params_.h;
        const auto dpsi = derivative(ComplexSpectrum::from_real(psi));
        const auto ap = project_pm(dpsi, Half::plus);
        const auto am = project_pm(dpsi, Half::minus);

        std::vector<cplx> mplus(static_cast<std::size_t>(mm)), mminus(mplus);
        for (int j = 0; j < mm; ++j) {
            const auto i = static_cast<std::size_t>(j);
            mplus[i] = cplx(s.f1[i] + s.d1_phi[i], s.f2[i] + s.d2_phi[i]);
            mminus[i] = std::conj(mplus[i]);
        }
        // [P-, m+] P+ d1 psi = P-(m+ a+) - m+ P- a+, and P- a+ = 0
        ComplexSpectrum q = project_pm(detail::grid_product(mplus, ap), Half::minus);
        q += project_pm(detail::grid_product(mminus, am), Half::plus);

        const auto sup = smoothing_multipliers(psi.with_mean(), h, Smoothing::up).to_grid(mm);
        std::vector<double> t3(static_cast<std::size_t>(mm)), t5(t3);
        for (int j = 0; j < mm; ++j) {
            const auto i = static_cast<std::size_t>(j);
            t3[i] = s.f2[i] * (1.0 + sup[i]);
            t5[i] = s.d1_phi[i] * (1.0 + sup[i]);
        }
        q -= ComplexSpectrum::from_real(from_grid(t3, n));
        const SpectralField phiR = from_grid(s.phi, n);
        const auto t5s = ComplexSpectrum::from_real(from_grid(t5, n));
        q += cplx(0.0, 1.0) * (project_pm(t5s, Half::minus) - project_pm(t5s, Half::plus));
        q *= cplx(K, 0.0);
        q += ComplexSpectrum::from_real(K * smoothing_multipliers(phiR, h, Smoothing::down).with_mean());
        q += ComplexSpectrum::from_real(params_.g * smoothing_multipliers(psi.with_mean(), h, Smoothing::down).with_mean());

        // zero-mode terms by trapezoidal quadrature on the dealiased grid
        const auto d1psi = derivative(psi).to_grid(mm);
        const auto absd = abs_derivative(psi).to_grid(mm);
        double i1 = 0.0, i2 = 0.0;
        for (int j = 0; j < mm; ++j) {
            const auto i = static_cast<std::size_t>(j);
            i1 += s.f1[i] * d1psi[i];
            i2 += s.f2[i] * absd[i];
        }
        // -i int f2 (P- - P+) d1 psi = -int f2 |D| psi
        q.at(0) += K * (i1 - i2) / mm;
        if (K != 0.0 && !spec_.f_zero()) q += ComplexSpectrum::from_real(K * bulk_remainder(psi));
        return q;
    }

    SpectralField remainder_Q(const TraceState& s, const SpectralField& psi) const {
        return remainder_Q_complex(s, psi).real_part(false);
    }

    SpectralField remainder_Q(double upkappa, const SpectralField& psi) const {
        return remainder_Q(trace_state(upkappa, psi), psi);
    }

    /// Dense Galerkin matrix of A on the packed space.
    Eigen::MatrixXd assemble_A(const EllipticityFields& xy) const {
        const int d = dim();
        Eigen::MatrixXd M(d, d);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < d; ++i) {
            e(i) = 1.0;
            M.col(i) = pack(apply_A(xy, unpack(e)));
            e(i) = 0.0;
        }
        return M;
    }

    /// Solves A(upkappa, psi) Psi = rhs.
    SpectralField invert_A(const EllipticityFields& xy, const SpectralField& rhs, const InvertOptions& opt = {}) const {
        check_field(rhs);
        if (rhs.mean() != 0.0 && std::abs(rhs.mean()) > 1e-12 * (1.0 + rhs.l2_norm()))
            throw ContractViolation("invert_A: right-hand side must have zero mean");
        check_elliptic(xy);
        const Eigen::VectorXd b = pack(rhs);
        if (opt.method != InvertMethod::dense) {
            const auto A = [&](const Eigen::VectorXd& v) { return pack(apply_A(xy, unpack(v))); };
            const auto M = mean_symbol_preconditioner(xy);
            const auto r = fgmres(A, b, M, GmresOptions{opt.rel_tol, 60, opt.max_iters});
            if (r.converged) return unpack(r.x);
            if (opt.method == InvertMethod::iterative || n() > opt.dense_limit)
                throw NonConvergenceError("invert_A: GMRES stagnated", r.rel_residual);
        }
        return unpack(assemble_A(xy).partialPivLu().solve(b));
    }

    SpectralField invert_A(double upkappa, const SpectralField& psi, const SpectralField& rhs,
                           const InvertOptions& opt = {}) const {
        return invert_A(xy_fields(upkappa, psi), rhs, opt);
    }

    /// F(upkappa, psi) = psi + A^{-1} Q.
    SpectralField fixed_point_F(double upkappa, const SpectralField& psi, const InvertOptions& opt = {}) const {
        const auto s = trace_state(upkappa, psi);
        const auto q = remainder_Q(s, psi);
        return psi.mean_free() + invert_A(s.xy, q.mean_free(), opt);
    }

    /// Diagonal preconditioner from the constant-coefficient symbol 2 pi mean(Y) |xi| + 2 pi i mean(X) xi.
    LinearMap mean_symbol_preconditioner(const EllipticityFields& xy) const {
        const double xb = detail::grid_mean(xy.X), yb = detail::grid_mean(xy.Y);
        if (xb == 0.0 && yb == 0.0) return [](const Eigen::VectorXd& v) { return v; };
        return [xb, yb](const Eigen::VectorXd& v) {
            Eigen::VectorXd out(v.size());
            for (Eigen::Index k = 0; k < v.size() / 2; ++k) {
                const int xi = static_cast<int>(k) + 1;
                const cplx sym(kTwoPi * yb * xi, kTwoPi * xb * xi);
                const cplx c = cplx(v(2 * k), v(2 * k + 1)) / sym;
                out(2 * k) = c.real();
                out(2 * k + 1) = c.imag();
            }
            return out;
        };
    }

    void check_elliptic(const EllipticityFields& xy) const {
        double scale = 0.0;
        for (std::size_t i = 0; i < xy.X.size(); ++i) scale = std::max(scale, std::hypot(xy.X[i], xy.Y[i]));
        if (!(xy.min_abs_x_minus_iy > 1e-12 * (1.0 + scale)))
            throw SingularOperatorError("X - iY vanishes on the top trace: ellipticity lost");
    }

private:
    void check_field(const SpectralField& f) const {
        if (f.size() != sg_.n) throw ShapeError("WaveOperator: field truncation differs from the operator's N");
    }

    ForcingSpec spec_;
    PhysicalParams params_;
    StripGrid sg_;
};

}  // namespace darcywave
