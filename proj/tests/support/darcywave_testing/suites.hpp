#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "darcywave/darcywave.hpp"
#include "darcywave_testing/fd_oracle.hpp"

namespace darcywave::testing {

struct SuiteResult {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double seconds = 0.0;
    std::string note;
};

inline json to_json(const SuiteResult& r) {
    return {{"suite", r.name}, {"max_error", r.max_error}, {"tolerance", r.tolerance}, {"pass", r.pass}, {"seconds", r.seconds},
            {"note", r.note}};
}

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

/// Smooth random mean-zero psi with modes 1..modes decaying like exp(-0.35 xi), scaled so max |d1 psi| = slope.
inline SpectralField random_psi(std::mt19937& rng, int n, int modes, double slope) {
    std::normal_distribution<double> nd;
    SpectralField f(n);
    for (int xi = 1; xi <= std::min(modes, n / 2 - 1); ++xi) f.set_coeff(xi, cplx(nd(rng), nd(rng)) * std::exp(-0.35 * xi));
    const auto d = derivative(f).to_grid(4 * n);
    double mx = 0.0;
    for (double v : d) mx = std::max(mx, std::abs(v));
    return mx > 0.0 ? (slope / mx) * f : f;
}

struct Draw {
    double upkappa = 0.0;
    SpectralField psi;
};

/// Random admissible (upkappa, psi): upkappa in [0, 1.2], slope of psi in [0, 0.5].
inline Draw random_admissible_draw(std::mt19937& rng, int n, double h) {
    std::uniform_real_distribution<double> uu(0.0, 1.2), us(0.0, 0.5);
    for (;;) {
        Draw d{uu(rng), random_psi(rng, n, 24, us(rng))};
        if (admissibility_check(d.psi, h).admissible()) return d;
    }
}

inline std::vector<std::string> catalog_names() { return {"gravity-cosine", "speed-mode", "bulk-forced"}; }

/// Criterion: dirichlet_neumann(cos 2 pi m w) = 2 pi m tanh(2 pi m h) cos 2 pi m w, m <= 64, h in {0.5, 1, 2}.
inline SuiteResult suite_multiplier_exactness() {
    Stopwatch sw;
    SuiteResult r{"multiplier_exactness", 0.0, 1e-12, false, 0.0, {}};
    const int n = 256, mgrid = 512;
    for (double h : {0.5, 1.0, 2.0})
        for (int m = 1; m <= 64; ++m) {
            SpectralField f(n);
            f.set_coeff(m, 0.5);
            const auto g = dirichlet_neumann(f, h).to_grid(mgrid);
            const double k = 2.0 * M_PI * m, s = k * std::tanh(k * h);
            for (int j = 0; j < mgrid; ++j) {
                const double w = static_cast<double>(j) / mgrid;
                r.max_error = std::max(r.max_error, std::abs(g[static_cast<std::size_t>(j)] - s * std::cos(2.0 * M_PI * m * w)) / s);
            }
        }
    r.pass = r.max_error <= r.tolerance;
    r.seconds = sw.seconds();
    r.note = "relative sup error over m <= 64, h in {0.5, 1, 2}";
    return r;
}

struct IdentityErrors {
    double g_split = 0.0;
    double decomposition = 0.0;
    double reality = 0.0;
    double energy_x = 0.0;
    double energy_y = 0.0;
    double mean = 0.0;  ///< absolute |P_0|
};

inline double grid_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// All operator identities at one draw, with relative errors.
inline IdentityErrors identity_errors(const WaveOperator& op, const Draw& d, const SpectralField& Psi) {
    IdentityErrors e;
    const double h = op.params().h;
    const int m = op.m();
    // G = S_down - i d1 P+ + i d1 P-
    {
        const auto G = ComplexSpectrum::from_real(dirichlet_neumann(d.psi, h));
        const auto dpsi = derivative(ComplexSpectrum::from_real(d.psi));
        auto rhs = ComplexSpectrum::from_real(smoothing_multipliers(d.psi, h, Smoothing::down));
        rhs += cplx(0.0, -1.0) * project_pm(dpsi, Half::plus);
        rhs += cplx(0.0, 1.0) * project_pm(dpsi, Half::minus);
        e.g_split = (G - rhs).l2_norm() / std::max(G.l2_norm(), 1e-300);
    }
    const auto s = op.trace_state(d.upkappa, d.psi);
    const auto P = op.residual(s, d.psi);
    const auto Apsi = op.apply_A(s.xy, d.psi);
    const auto Q = op.remainder_Q(s, d.psi);
    e.mean = std::abs(P.coeff(0).real());
    const double scale = std::max({P.l2_norm(), Apsi.l2_norm(), Q.l2_norm(), 1e-300});
    e.decomposition = (P - (Apsi + Q)).l2_norm() / scale;

    const auto B = op.principal_bracket(s.xy, Psi);
    e.reality = B.imag_part().l2_norm() / std::max(B.l2_norm(), 1e-300);

    // energy identities with grid means on the dealiased grid
    const auto dP = derivative(ComplexSpectrum::from_real(Psi));
    const auto pp = project_pm(dP, Half::plus).to_grid(m);
    const auto pm = project_pm(dP, Half::minus).to_grid(m);
    const auto APsi = B.real_part(true).to_grid(m);
    const auto d1 = derivative(Psi).to_grid(m);
    double lhs1 = 0.0, lhs2 = 0.0, rhs1 = 0.0, rhs2 = 0.0, sx = 0.0, sy = 0.0;
    for (int j = 0; j < m; ++j) {
        const auto i = static_cast<std::size_t>(j);
        const double w2 = std::norm(pp[i]) + std::norm(pm[i]);
        lhs1 += -APsi[i] * d1[i];
        // (P+ - P-) d1 Psi
        const cplx diff = pp[i] - pm[i];
        lhs2 += -(APsi[i] * std::conj(diff)).imag();
        rhs1 += -s.xy.X[i] * w2;
        rhs2 += s.xy.Y[i] * w2;
        sx += std::abs(s.xy.X[i]) * w2;
        sy += std::abs(s.xy.Y[i]) * w2;
    }
    const double scale_xy = std::max(sx + sy, 1e-300);
    e.energy_x = std::abs(lhs1 - rhs1) / scale_xy;
    e.energy_y = std::abs(lhs2 - rhs2) / scale_xy;
    return e;
}

struct IdentitySuites {
    SuiteResult decomposition{"decomposition", 0.0, 1e-9, false, 0.0, {}};
    SuiteResult reality{"reality", 0.0, 1e-9, false, 0.0, {}};
    SuiteResult energy{"energy_identity", 0.0, 1e-9, false, 0.0, {}};
    SuiteResult mean_zero{"mean_zero", 0.0, 1e-8, false, 0.0, {}};
};

/// Randomized identity suites over every catalog preset. The mean identity is reported for
/// presets with nonzero bulk force.
inline IdentitySuites run_identity_suites(int draws, int n, std::uint32_t seed) {
    Stopwatch sw;
    IdentitySuites out;
    std::mt19937 rng(seed);
    for (const auto& name : catalog_names()) {
        const auto& p = preset(name);
        const WaveOperator op(p.forcing, p.params, n, 48);
        for (int k = 0; k < draws; ++k) {
            const auto d = random_admissible_draw(rng, n, p.params.h);
            const auto Psi = random_psi(rng, n, n / 2 - 1, 1.0);
            const auto e = identity_errors(op, d, Psi);
            out.decomposition.max_error = std::max({out.decomposition.max_error, e.decomposition, e.g_split});
            out.reality.max_error = std::max(out.reality.max_error, e.reality);
            out.energy.max_error = std::max({out.energy.max_error, e.energy_x, e.energy_y});
            if (!p.forcing.f_zero()) out.mean_zero.max_error = std::max(out.mean_zero.max_error, e.mean);
        }
    }
    const double t = sw.seconds();
    for (auto* r : {&out.decomposition, &out.reality, &out.energy, &out.mean_zero}) {
        r->pass = r->max_error <= r->tolerance;
        r->seconds = t;
    }
    out.decomposition.note = "max relative defect of G = S_down - i d1 P+ + i d1 P- and P = A psi + Q";
    out.reality.note = "relative imaginary part of the principal bracket";
    out.energy.note = "relative defect of the X and Y energy identities";
    out.mean_zero.note = "absolute zero-mode coefficient of P with bulk forcing";
    return out;
}

/// Smooth random bulk and boundary data with modes <= 3 and z-polynomials of degree <= 3.
struct SmoothData {
    std::vector<double> a1;      ///< (cos, sin) pairs for mode m and power p at index 2 (4 m + p)
    std::vector<double> a2, a3;  ///< (cos, sin) pairs per mode
    double eval1(double w, double z) const {
        double v = 0.0;
        for (int m = 0; m <= 3; ++m)
            for (int p = 0; p <= 3; ++p) {
                const auto i = static_cast<std::size_t>(2 * (4 * m + p));
                v += (a1[i] * std::cos(2.0 * M_PI * m * w) + a1[i + 1] * std::sin(2.0 * M_PI * m * w)) * std::pow(z, p);
            }
        return v;
    }
    static double eval_trig(const std::vector<double>& a, double w) {
        double v = 0.0;
        for (int m = 0; m <= 3; ++m)
            v += a[static_cast<std::size_t>(2 * m)] * std::cos(2.0 * M_PI * m * w) + a[static_cast<std::size_t>(2 * m + 1)] * std::sin(2.0 * M_PI * m * w);
        return v;
    }
    double eval2(double w) const { return eval_trig(a2, w); }
    double eval3(double w) const { return eval_trig(a3, w); }
};

inline SmoothData random_smooth_data(std::mt19937& rng) {
    std::normal_distribution<double> nd;
    SmoothData d;
    d.a1.resize(32);
    d.a2.resize(8);
    d.a3.resize(8);
    for (int m = 0; m <= 3; ++m)
        for (int p = 0; p <= 3; ++p) {
            const double s = std::exp(-0.5 * m) / (1.0 + p);
            d.a1[static_cast<std::size_t>(2 * (4 * m + p))] = s * nd(rng);
            d.a1[static_cast<std::size_t>(2 * (4 * m + p) + 1)] = m == 0 ? 0.0 : s * nd(rng);
        }
    for (auto* a : {&d.a2, &d.a3})
        for (int m = 0; m <= 3; ++m) {
            (*a)[static_cast<std::size_t>(2 * m)] = std::exp(-0.5 * m) * nd(rng);
            (*a)[static_cast<std::size_t>(2 * m + 1)] = m == 0 ? 0.0 : std::exp(-0.5 * m) * nd(rng);
        }
    return d;
}

struct OracleErrors {
    double g = 0.0, s = 0.0, q = 0.0;
};

/// Relative sup disagreement between the spectral solvers and the extrapolated finite-difference oracle.
inline OracleErrors oracle_errors(const SmoothData& data, std::mt19937& rng, double h) {
    OracleErrors e;
    const int n = 128, mz = 48, nfd = 256;
    const StripGrid sg{n, mz, h};
    const auto grid = sg.vertical();
    const int mw = sg.m_w();
    const auto zero2 = [](double, double) { return 0.0; };
    const auto zero1 = [](double) { return 0.0; };
    const auto nodes = torus_nodes(mw);
    auto sample = [&](const std::function<double(double)>& f, int nn) {
        std::vector<double> v(static_cast<std::size_t>(3 * nn / 2));
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(static_cast<double>(j) / static_cast<double>(v.size()));
        return from_grid(v, nn);
    };
    auto rel_trace = [&](const SpectralField& spec, const FdOracle& o) {
        double err = 0.0, scale = 0.0;
        for (int j = 0; j < o.nw; ++j) {
            const double w = static_cast<double>(j) / o.nw;
            const double ref = o.trace[static_cast<std::size_t>(j)];
            err = std::max(err, std::abs(spec.evaluate(w) - ref));
            scale = std::max(scale, std::abs(ref));
        }
        return err / scale;
    };
    // G
    {
        const auto f3 = sample([&](double w) { return data.eval3(w); }, n);
        const auto o = fd_oracle(nfd, h, zero2, zero1, [&](double w) { return data.eval3(w); });
        e.g = rel_trace(dirichlet_neumann(f3, h).with_mean(), o);
    }
    // S
    {
        BulkField f1(mw, grid, 1);
        for (int iz = 0; iz < grid.size(); ++iz)
            for (int j = 0; j < mw; ++j) f1(0, iz, j) = data.eval1(nodes[static_cast<std::size_t>(j)], grid[iz]);
        const auto f2 = sample([&](double w) { return data.eval2(w); }, n);
        const auto sol = solve_mixed_bvp(f1, f2);
        const auto o = fd_oracle(nfd, h, [&](double w, double z) { return data.eval1(w, z); }, [&](double w) { return data.eval2(w); }, zero1);
        e.s = rel_trace(sol.trace, o);
    }
    // flattened pressure for a random admissible map and the bulk-forced preset
    {
        const auto& p = preset("bulk-forced");
        std::uniform_real_distribution<double> uu(0.2, 0.8);
        const double up = uu(rng), kappa = up * up;
        const auto psi = random_psi(rng, n, 3, 0.2);
        const auto flat = solve_flat_pressure(up, psi, p.forcing, PhysicalParams{p.params.g, p.params.c, h}, sg);
        const auto& spec = p.forcing;
        auto layer_at = [&](double w, double z) {
            // R and d1 R at one point by direct summation
            double r1 = w, r2 = z, a = 1.0, b = 0.0;
            for (int xi = 1; xi < psi.modes(); ++xi) {
                const cplx c = psi.coeff(xi);
                const double cs = symbol::cosh_over_sinh(xi, z, h), ss = symbol::sinh_over_sinh(xi, z, h);
                const cplx ph = std::polar(1.0, 2.0 * M_PI * xi * w);
                r1 += 2.0 * (cplx(0.0, -cs) * c * ph).real();
                r2 += 2.0 * (ss * c * ph).real();
                a += 2.0 * (symbol::wavenumber(xi) * cs * c * ph).real();
                b += 2.0 * (cplx(0.0, 2.0 * M_PI * xi) * ss * c * ph).real();
            }
            return std::array<double, 4>{r1, r2, a, b};
        };
        const auto F1 = [&](double w, double z) {
            const auto L = layer_at(w, z);
            return kappa * (L[2] * L[2] + L[3] * L[3]) * evaluate_quantity(spec, Quantity::div_f, L[0], L[1]);
        };
        const auto F2 = [&](double w) {
            const auto L = layer_at(w, 0.0);
            return kappa * (-evaluate_quantity(spec, Quantity::f1, L[0], L[1]) * L[3] + evaluate_quantity(spec, Quantity::f2, L[0], L[1]) * L[2]);
        };
        const auto F3 = [&](double w) {
            const auto L = layer_at(w, h);
            return p.params.g * psi.evaluate(w) + kappa * evaluate_quantity(spec, Quantity::phi, L[0], L[1]);
        };
        const auto o = fd_oracle(nfd, h, F1, F2, F3);
        double err = 0.0, scale = 0.0;
        const int stride = mw / o.nw;
        for (int i = 0; i <= o.nz; ++i) {
            const double z = i * h / o.nz;
            for (int j = 0; j < o.nw; ++j) {
                const auto col = flat.q.component(0).col(j * stride);
                const std::vector<double> vals(col.data(), col.data() + col.size());
                const double qs = cheb::interpolate(grid.z(), vals, z);
                err = std::max(err, std::abs(qs - o.u(i, j)));
                scale = std::max(scale, std::abs(o.u(i, j)));
            }
        }
        e.q = err / scale;
    }
    return e;
}

inline SuiteResult suite_oracle_equivalence(int sets, std::uint32_t seed) {
    Stopwatch sw;
    SuiteResult r{"oracle_equivalence", 0.0, 1e-5, false, 0.0, {}};
    std::mt19937 rng(seed);
    double eg = 0.0, es = 0.0, eq = 0.0;
    for (int k = 0; k < sets; ++k) {
        const double h = k % 2 == 0 ? 1.0 : 0.75;
        const auto data = random_smooth_data(rng);
        const auto e = oracle_errors(data, rng, h);
        eg = std::max(eg, e.g);
        es = std::max(es, e.s);
        eq = std::max(eq, e.q);
    }
    r.max_error = std::max({eg, es, eq});
    r.pass = r.max_error <= r.tolerance;
    r.seconds = sw.seconds();
    char buf[160];
    std::snprintf(buf, sizeof buf, "relative sup error vs Richardson-extrapolated 5-point FD (finest 256x256): G %.2e, S %.2e, q %.2e",
                  eg, es, eq);
    r.note = buf;
    return r;
}

/// mu(xi) = 1 + g S_down(xi) / (2 pi g |xi| - 2 pi i c xi), written out independently of the library.
inline cplx mu_oracle(int xi, double g, double c, double h) {
    const double k = 2.0 * M_PI * std::abs(xi);
    const double sdown = k * (std::tanh(k * h) - 1.0);
    return 1.0 + g * sdown / cplx(g * k, -2.0 * M_PI * c * xi);
}

/// Central-difference derivative of F at (0, 0) along cos and sin modes against mu.
inline SuiteResult suite_linearization() {
    Stopwatch sw;
    SuiteResult r{"linearization", 0.0, 1e-6, false, 0.0, {}};
    const int n = 64;
    const double eps = 1e-5;
    for (auto [g, c] : {std::pair{1.0, 0.0}, std::pair{1.0, 1.0}, std::pair{0.0, 1.0}}) {
        const WaveOperator op(preset("gravity-cosine").forcing, PhysicalParams{g, c, 1.0}, n, 24);
        for (int xi = 1; xi <= 16; ++xi)
            for (cplx dir : {cplx(0.5, 0.0), cplx(0.0, -0.5)}) {
                SpectralField e(n);
                e.set_coeff(xi, dir);
                const auto dF = (op.fixed_point_F(0.0, eps * e) - op.fixed_point_F(0.0, -eps * e)) * (0.5 / eps);
                SpectralField expect(n);
                expect.set_coeff(xi, mu_oracle(xi, g, c, 1.0) * dir);
                r.max_error = std::max(r.max_error, (dF - expect).l2_norm() / expect.l2_norm());
            }
    }
    r.pass = r.max_error <= r.tolerance;
    r.seconds = sw.seconds();
    r.note = "relative error over xi = 1..16, (g, c) in {(1,0), (1,1), (0,1)}";
    return r;
}

}  // namespace darcywave::testing
