#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/Polynomials>

#include "darcywave/bulk_field.hpp"
#include "darcywave/conformal.hpp"
#include "darcywave/errors.hpp"
#include "darcywave/fourier.hpp"
#include "darcywave/params.hpp"

namespace darcywave {

enum class Target { f1, f2, phi };
enum class WaveKind { cos, sin };

inline const char* to_string(Target t) {
    switch (t) {
        case Target::f1: return "f1";
        case Target::f2: return "f2";
        case Target::phi: return "phi";
    }
    return "?";
}

/// One separable term amp * W(2 pi m w) * Z(z) with W in {cos, sin} and Z a polynomial of degree <= 4.
struct ForcingTerm {
    Target target = Target::phi;
    double amp = 0.0;
    WaveKind kind = WaveKind::cos;
    int m = 0;
    std::vector<double> z{1.0};  ///< coefficients c0, c1, ... of Z

    bool operator==(const ForcingTerm&) const = default;
};

/// The forcing profiles f = (f1, f2) and phi as a finite sum of separable terms.
/// The solver multiplies the profiles by kappa = upkappa^2.
struct ForcingSpec {
    std::vector<ForcingTerm> terms;

    /// Throws ContractViolation when a z-factor exceeds degree 4 or m is negative.
    void validate() const {
        for (const auto& t : terms) {
            if (t.z.size() > 5) throw ContractViolation("ForcingSpec: z-factor degree exceeds 4");
            if (t.m < 0) throw ContractViolation("ForcingSpec: negative wavenumber");
            if (!std::isfinite(t.amp)) throw ContractViolation("ForcingSpec: non-finite amplitude");
        }
    }

    bool is_zero(Target t) const {
        for (const auto& term : terms)
            if (term.target == t && term.amp != 0.0 && std::any_of(term.z.begin(), term.z.end(), [](double c) { return c != 0.0; }))
                return false;
        return true;
    }

    bool f_zero() const { return is_zero(Target::f1) && is_zero(Target::f2); }
    bool trivial() const { return f_zero() && is_zero(Target::phi); }

    bool operator==(const ForcingSpec&) const = default;
};

/// Derivative multi-index (order in w, order in z).
struct Deriv {
    int w = 0;
    int z = 0;
};

namespace detail {

inline double trig_derivative(WaveKind kind, int m, int order, double w) {
    const double a = kTwoPi * m;
    const double t = a * w;
    // d^k cos = a^k cos(t + k pi/2), d^k sin = a^k sin(t + k pi/2)
    double v = 0.0;
    const int r = order % 4;
    const double c = std::cos(t), s = std::sin(t);
    if (kind == WaveKind::cos)
        v = r == 0 ? c : r == 1 ? -s : r == 2 ? -c : s;
    else
        v = r == 0 ? s : r == 1 ? c : r == 2 ? -s : -c;
    return std::pow(a, order) * v;
}

inline double poly_derivative(const std::vector<double>& c, int order, double z) {
    double acc = 0.0;
    for (int k = static_cast<int>(c.size()) - 1; k >= order; --k) {
        double f = 1.0;
        for (int q = 0; q < order; ++q) f *= (k - q);
        acc = acc * z + f * c[static_cast<std::size_t>(k)];
    }
    return acc;
}

}  // namespace detail

/// Exact derivative of one profile at a point.
inline double evaluate_forcing(const ForcingSpec& spec, Target target, double w, double z, Deriv d = {}) {
    if (d.w < 0 || d.z < 0 || d.w + d.z > 2) throw ContractViolation("evaluate_forcing: derivative order must be <= 2");
    double s = 0.0;
    for (const auto& t : spec.terms) {
        if (t.target != target || t.amp == 0.0) continue;
        const double zf = detail::poly_derivative(t.z, d.z, z);
        if (zf == 0.0) continue;
        s += t.amp * detail::trig_derivative(t.kind, t.m, d.w, w) * zf;
    }
    return s;
}

/// Batch form over a list of (w, z) points.
inline std::vector<double> evaluate_forcing(const ForcingSpec& spec, Target target,
                                            std::span<const std::pair<double, double>> points, Deriv d = {}) {
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = evaluate_forcing(spec, target, points[i].first, points[i].second, d);
    return out;
}

enum class Quantity { f1, f2, phi, div_f, d1_phi, d2_phi };

/// Evaluates a derived forcing quantity at a physical point.
inline double evaluate_quantity(const ForcingSpec& spec, Quantity q, double x1, double x2) {
    switch (q) {
        case Quantity::f1: return evaluate_forcing(spec, Target::f1, x1, x2);
        case Quantity::f2: return evaluate_forcing(spec, Target::f2, x1, x2);
        case Quantity::phi: return evaluate_forcing(spec, Target::phi, x1, x2);
        case Quantity::div_f:
            return evaluate_forcing(spec, Target::f1, x1, x2, {1, 0}) + evaluate_forcing(spec, Target::f2, x1, x2, {0, 1});
        case Quantity::d1_phi: return evaluate_forcing(spec, Target::phi, x1, x2, {1, 0});
        case Quantity::d2_phi: return evaluate_forcing(spec, Target::phi, x1, x2, {0, 1});
    }
    throw ContractViolation("evaluate_quantity: unknown quantity");
}

enum class Trace { bulk, top, bottom };

/// quantity o R on the requested node set. Bulk output is row-major, z outer and w inner.
inline std::vector<double> compose_with_map(const ForcingSpec& spec, const BulkField& R, Trace which, Quantity q) {
    if (R.components() != 2) throw ShapeError("compose_with_map: R must be a 2-vector field");
    const int mz = R.m_z(), mw = R.m_w();
    const int z0 = which == Trace::top ? mz - 1 : 0;
    const int z1 = which == Trace::bottom ? 1 : mz;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>((z1 - z0) * mw));
    for (int iz = z0; iz < z1; ++iz)
        for (int j = 0; j < mw; ++j) out.push_back(evaluate_quantity(spec, q, R(0, iz, j), R(1, iz, j)));
    return out;
}

/// quantity o R along a single map layer.
inline std::vector<double> compose_with_map(const ForcingSpec& spec, const MapLayer& L, Quantity q) {
    std::vector<double> out(static_cast<std::size_t>(L.size()));
    for (int j = 0; j < L.size(); ++j) {
        const auto i = static_cast<std::size_t>(j);
        out[i] = evaluate_quantity(spec, q, L.r1[i], L.r2[i]);
    }
    return out;
}

enum class EllipticityMode { gravity, speed };

struct EllipticityReport {
    EllipticityMode mode = EllipticityMode::gravity;
    double margin = -std::numeric_limits<double>::infinity();
    double z_min = 0.0;
    double z_max = 0.0;
    bool certified = false;
};

namespace detail {

/// z-polynomial coefficients (ascending) of the given derivative of a target at fixed w.
inline std::array<double, 5> z_polynomial(const ForcingSpec& spec, Target target, double w, Deriv d) {
    std::array<double, 5> c{};
    for (const auto& t : spec.terms) {
        if (t.target != target || t.amp == 0.0) continue;
        const double wf = t.amp * trig_derivative(t.kind, t.m, d.w, w);
        for (int k = d.z; k < static_cast<int>(t.z.size()); ++k) {
            double f = 1.0;
            for (int q = 0; q < d.z; ++q) f *= (k - q);
            c[static_cast<std::size_t>(k - d.z)] += wf * f * t.z[static_cast<std::size_t>(k)];
        }
    }
    return c;
}

inline double poly_eval(const std::array<double, 5>& c, double z) {
    double acc = 0.0;
    for (int k = 4; k >= 0; --k) acc = acc * z + c[static_cast<std::size_t>(k)];
    return acc;
}

/// Exact minimum of a degree <= 4 polynomial over [a, b] via its critical points.
inline double poly_min(const std::array<double, 5>& c, double a, double b) {
    double m = std::min(poly_eval(c, a), poly_eval(c, b));
    int deg = 4;
    while (deg > 0 && c[static_cast<std::size_t>(deg)] == 0.0) --deg;
    if (deg <= 1) return m;
    Eigen::VectorXd dp(deg);
    for (int k = 1; k <= deg; ++k) dp(k - 1) = k * c[static_cast<std::size_t>(k)];
    if (deg - 1 == 1) {
        const double r = -dp(0) / dp(1);
        if (r > a && r < b) m = std::min(m, poly_eval(c, r));
        return m;
    }
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(dp);
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
        const auto r = solver.roots()[i];
        if (std::abs(r.imag()) > 1e-9 * (1.0 + std::abs(r.real()))) continue;
        if (r.real() > a && r.real() < b) m = std::min(m, poly_eval(c, r.real()));
    }
    return m;
}

inline std::array<double, 5> poly_sub(std::array<double, 5> a, const std::array<double, 5>& b) {
    for (std::size_t i = 0; i < 5; ++i) a[i] -= b[i];
    return a;
}

}  // namespace detail

/// Certifies one of the hidden-ellipticity sign conditions over T x [z_min, z_max].
///
/// Gravity mode needs g > 0 and d2 phi - f2 >= 0; speed mode needs c != 0 and
/// c (d1 phi - f1) >= 0. The z-minimum is exact per sample of w; w is sampled
/// at w_samples equispaced points. The mode with the larger margin is reported.
inline EllipticityReport ellipticity_certify(const ForcingSpec& spec, const PhysicalParams& params, double z_min,
                                             double z_max, int w_samples = 512) {
    if (!(z_min <= z_max)) throw DomainError("ellipticity_certify: empty box");
    EllipticityReport gravity{EllipticityMode::gravity, std::numeric_limits<double>::infinity(), z_min, z_max, false};
    EllipticityReport speed{EllipticityMode::speed, std::numeric_limits<double>::infinity(), z_min, z_max, false};
    for (int i = 0; i < w_samples; ++i) {
        const double w = static_cast<double>(i) / w_samples;
        const auto grav = detail::poly_sub(detail::z_polynomial(spec, Target::phi, w, {0, 1}),
                                           detail::z_polynomial(spec, Target::f2, w, {0, 0}));
        gravity.margin = std::min(gravity.margin, detail::poly_min(grav, z_min, z_max));
        auto sp = detail::poly_sub(detail::z_polynomial(spec, Target::phi, w, {1, 0}),
                                   detail::z_polynomial(spec, Target::f1, w, {0, 0}));
        for (auto& v : sp) v *= params.c;
        speed.margin = std::min(speed.margin, detail::poly_min(sp, z_min, z_max));
    }
    gravity.certified = params.g > 0.0 && gravity.margin >= 0.0;
    speed.certified = params.c != 0.0 && speed.margin >= 0.0;
    if (gravity.certified && speed.certified) return gravity.margin >= speed.margin ? gravity : speed;
    if (gravity.certified) return gravity;
    if (speed.certified) return speed;
    if (params.g > 0.0 && (params.c == 0.0 || gravity.margin >= speed.margin)) return gravity;
    return params.c != 0.0 ? speed : gravity;
}

}  // namespace darcywave
