#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>

#include "darcywave/errors.hpp"
#include "darcywave/fourier.hpp"
#include "darcywave/spectral_field.hpp"

namespace darcywave {

namespace testing_hooks {
/// When set, the S-down symbol changes sign. Used by the selftest mutation check only.
inline std::atomic<bool>& flip_sdown_sign() {
    static std::atomic<bool> flag{false};
    return flag;
}
}  // namespace testing_hooks

/// Scalar symbols of the Fourier multipliers, evaluated in overflow-free form.
///
/// With k = 2 pi |xi| and x = k h every hyperbolic ratio is rewritten in terms
/// of exp(-2x) and exp(k (z - h)), so nothing grows with |xi|.
namespace symbol {

inline double wavenumber(int xi) { return kTwoPi * std::abs(xi); }

/// 2 pi |xi| tanh(2 pi h |xi|).
inline double dirichlet_neumann(int xi, double h) {
    const double k = wavenumber(xi);
    return k * std::tanh(k * h);
}

/// 2 pi |xi| (tanh(2 pi h |xi|) - 1) = -k 2e^{-2x} / (1 + e^{-2x}).
inline double s_down(int xi, double h) {
    const double k = wavenumber(xi);
    const double e = std::exp(-2.0 * k * h);
    const double v = -k * 2.0 * e / (1.0 + e);
    return testing_hooks::flip_sdown_sign().load(std::memory_order_relaxed) ? -v : v;
}

/// 2 pi |xi| (coth(2 pi h |xi|) - 1) for xi != 0, and 1 at xi = 0.
inline double s_up(int xi, double h) {
    if (xi == 0) return 1.0;
    const double k = wavenumber(xi);
    const double e = std::exp(-2.0 * k * h);
    return k * 2.0 * e / (-std::expm1(-2.0 * k * h));
}

/// cosh(k z) / sinh(k h), for xi != 0.
inline double cosh_over_sinh(int xi, double z, double h) {
    const double k = wavenumber(xi);
    return std::exp(k * (z - h)) * (1.0 + std::exp(-2.0 * k * z)) / (-std::expm1(-2.0 * k * h));
}

/// sinh(k z) / sinh(k h), for xi != 0.
inline double sinh_over_sinh(int xi, double z, double h) {
    const double k = wavenumber(xi);
    return std::exp(k * (z - h)) * (-std::expm1(-2.0 * k * z)) / (-std::expm1(-2.0 * k * h));
}

/// cosh(k z) / cosh(k h); equals 1 at xi = 0.
inline double cosh_over_cosh(int xi, double z, double h) {
    const double k = wavenumber(xi);
    return std::exp(k * (z - h)) * (1.0 + std::exp(-2.0 * k * z)) / (1.0 + std::exp(-2.0 * k * h));
}

/// sinh(k z) / cosh(k h).
inline double sinh_over_cosh(int xi, double z, double h) {
    const double k = wavenumber(xi);
    return std::exp(k * (z - h)) * (-std::expm1(-2.0 * k * z)) / (1.0 + std::exp(-2.0 * k * h));
}

/// -i xi cosh(2 pi |xi| z) / (|xi| sinh(2 pi |xi| h)); zero at xi = 0.
inline cplx hilbert_layer(int xi, double z, double h) {
    if (xi == 0) return {};
    const double s = xi > 0 ? 1.0 : -1.0;
    return cplx(0.0, -s * cosh_over_sinh(xi, z, h));
}

/// 2 pi i xi.
inline cplx derivative(int xi) { return cplx(0.0, kTwoPi * xi); }

}  // namespace symbol

namespace detail {
inline void check_depth(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("depth h must be positive and finite");
}
}  // namespace detail

/// Applies a symbol with sym(-xi) = conj(sym(xi)) to a real field.
template <class Symbol>
SpectralField apply_real_symbol(const SpectralField& f, Symbol&& sym, bool mean_zero_out) {
    std::vector<cplx> half(f.half().begin(), f.half().end());
    for (int xi = 0; xi < f.modes(); ++xi) half[static_cast<std::size_t>(xi)] *= sym(xi);
    if (!mean_zero_out) return SpectralField::from_half(std::move(half), false);
    half[0] = {};
    return SpectralField::from_half(std::move(half), true);
}

/// Applies an arbitrary symbol to a complex spectrum.
template <class Symbol>
ComplexSpectrum apply_symbol(const ComplexSpectrum& f, Symbol&& sym) {
    ComplexSpectrum r(f.size());
    for (int xi = -f.kmax(); xi <= f.kmax(); ++xi) r.at(xi) = sym(xi) * f.coeff(xi);
    return r;
}

/// Finite-depth Dirichlet-to-Neumann operator G.
inline SpectralField dirichlet_neumann(const SpectralField& f, double h) {
    detail::check_depth(h);
    return apply_real_symbol(f, [h](int xi) { return cplx(symbol::dirichlet_neumann(xi, h)); }, true);
}

enum class Smoothing { down, up };

/// The exponentially smoothing multipliers S-down (G - |D|) and S-up.
inline SpectralField smoothing_multipliers(const SpectralField& f, double h, Smoothing which) {
    detail::check_depth(h);
    if (which == Smoothing::down)
        return apply_real_symbol(f, [h](int xi) { return cplx(symbol::s_down(xi, h)); }, true);
    return apply_real_symbol(f, [h](int xi) { return cplx(symbol::s_up(xi, h)); }, f.mean_zero());
}

/// Horizontal component of the Cauchy-Riemann extension at height z.
inline SpectralField hilbert_layer(const SpectralField& f, double z, double h) {
    detail::check_depth(h);
    if (!(z >= 0.0 && z <= h)) throw DomainError("hilbert_layer: z must lie in [0, h]");
    return apply_real_symbol(f, [z, h](int xi) { return symbol::hilbert_layer(xi, z, h); }, true);
}

/// d/dw.
inline SpectralField derivative(const SpectralField& f) {
    return apply_real_symbol(f, [](int xi) { return symbol::derivative(xi); }, true);
}

inline ComplexSpectrum derivative(const ComplexSpectrum& f) {
    return apply_symbol(f, [](int xi) { return symbol::derivative(xi); });
}

/// |D|, the symbol 2 pi |xi|.
inline SpectralField abs_derivative(const SpectralField& f) {
    return apply_real_symbol(f, [](int xi) { return cplx(symbol::wavenumber(xi)); }, true);
}

enum class Half { plus, minus };

/// Keeps the strictly positive (plus) or strictly negative (minus) frequencies.
inline ComplexSpectrum project_pm(const ComplexSpectrum& f, Half sign) {
    return apply_symbol(f, [sign](int xi) {
        return cplx((sign == Half::plus ? xi > 0 : xi < 0) ? 1.0 : 0.0);
    });
}

inline ComplexSpectrum project_pm(const SpectralField& f, Half sign) {
    return project_pm(ComplexSpectrum::from_real(f), sign);
}

}  // namespace darcywave
