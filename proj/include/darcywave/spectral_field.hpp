#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "darcywave/errors.hpp"
#include "darcywave/fourier.hpp"

namespace darcywave {

/// Real periodic function on T held as truncated Fourier coefficients.
///
/// Only the non-negative frequencies 0..N/2-1 are stored; negative ones are
/// their conjugates, so Hermitian symmetry holds by construction and the
/// Nyquist mode is always zero. A field marked mean-zero keeps coeff(0) == 0.
class SpectralField {
public:
    SpectralField() = default;

    explicit SpectralField(int n, bool mean_zero = true) : n_(n), mean_zero_(mean_zero) {
        if (n < 2 || n % 2 != 0)
            throw InvalidGridError("SpectralField: truncation size must be even and >= 2, got " +
                                   std::to_string(n));
        half_.assign(static_cast<std::size_t>(n / 2), cplx{});
    }

    /// Builds a field from coefficients for xi = 0..N/2-1.
    static SpectralField from_half(std::vector<cplx> half, bool mean_zero) {
        SpectralField f(static_cast<int>(half.size()) * 2, mean_zero);
        f.half_ = std::move(half);
        f.half_[0] = cplx(mean_zero ? 0.0 : f.half_[0].real(), 0.0);
        return f;
    }

    int size() const noexcept { return n_; }
    int modes() const noexcept { return n_ / 2; }
    bool mean_zero() const noexcept { return mean_zero_; }
    std::span<const cplx> half() const noexcept { return half_; }

    cplx coeff(int xi) const {
        const int a = xi < 0 ? -xi : xi;
        if (a >= n_ / 2) return {};
        const cplx c = half_[static_cast<std::size_t>(a)];
        return xi < 0 ? std::conj(c) : c;
    }

    void set_coeff(int xi, cplx v) {
        if (xi < 0 || xi >= n_ / 2) throw DomainError("SpectralField::set_coeff: frequency out of range");
        if (xi == 0) {
            if (mean_zero_ && v != cplx{})
                throw ContractViolation("SpectralField::set_coeff: mean-zero field cannot take a zero mode");
            v = cplx(v.real(), 0.0);
        }
        half_[static_cast<std::size_t>(xi)] = v;
    }

    double mean() const { return half_.empty() ? 0.0 : half_[0].real(); }

    /// Copy with the zero mode removed and the mean-zero flag set.
    SpectralField mean_free() const {
        SpectralField r = *this;
        r.mean_zero_ = true;
        if (!r.half_.empty()) r.half_[0] = {};
        return r;
    }

    /// Copy with the mean-zero flag cleared (coefficients untouched).
    SpectralField with_mean() const {
        SpectralField r = *this;
        r.mean_zero_ = false;
        return r;
    }

    /// Zero-pads or truncates to truncation size n.
    SpectralField resized(int n) const {
        SpectralField r(n, mean_zero_);
        const int k = std::min(n, n_) / 2;
        std::copy_n(half_.begin(), k, r.half_.begin());
        return r;
    }

    /// L2(T) norm by Parseval.
    double l2_norm() const {
        double s = std::norm(half_[0]);
        for (std::size_t k = 1; k < half_.size(); ++k) s += 2.0 * std::norm(half_[k]);
        return std::sqrt(s);
    }

    /// Largest stored coefficient modulus.
    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& c : half_) m = std::max(m, std::abs(c));
        return m;
    }

    /// Values at the m equispaced nodes j/m (m even, m >= N).
    std::vector<double> to_grid(int m) const {
        if (m < n_ || m % 2 != 0)
            throw InvalidGridError("SpectralField::to_grid: grid must be even and >= N");
        std::vector<cplx> c(static_cast<std::size_t>(m));
        c[0] = half_[0];
        for (int k = 1; k < n_ / 2; ++k) {
            c[static_cast<std::size_t>(k)] = half_[static_cast<std::size_t>(k)];
            c[static_cast<std::size_t>(m - k)] = std::conj(half_[static_cast<std::size_t>(k)]);
        }
        const auto x = fft::inverse(c);
        std::vector<double> out(x.size());
        std::transform(x.begin(), x.end(), out.begin(), [](const cplx& v) { return v.real(); });
        return out;
    }

    /// Point evaluation by direct summation.
    double evaluate(double w) const {
        double s = half_[0].real();
        for (int k = 1; k < n_ / 2; ++k) {
            const cplx e = std::polar(1.0, kTwoPi * k * w);
            s += 2.0 * (half_[static_cast<std::size_t>(k)] * e).real();
        }
        return s;
    }

    SpectralField& operator+=(const SpectralField& o) {
        check_same(o);
        for (std::size_t k = 0; k < half_.size(); ++k) half_[k] += o.half_[k];
        mean_zero_ = mean_zero_ && o.mean_zero_;
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        check_same(o);
        for (std::size_t k = 0; k < half_.size(); ++k) half_[k] -= o.half_[k];
        mean_zero_ = mean_zero_ && o.mean_zero_;
        return *this;
    }
    SpectralField& operator*=(double a) {
        for (auto& c : half_) c *= a;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
    friend SpectralField operator*(SpectralField a, double s) { return a *= s; }

    friend bool operator==(const SpectralField&, const SpectralField&) = default;

private:
    void check_same(const SpectralField& o) const {
        if (o.n_ != n_) throw ShapeError("SpectralField: truncation sizes differ");
    }

    int n_ = 0;
    bool mean_zero_ = true;
    std::vector<cplx> half_;
};

/// Complex periodic function on T; coefficients for |xi| <= N/2-1.
///
/// Produced by the half-line projections P+ and P-, which do not preserve
/// reality. real_part()/imag_part() return the Hermitian components.
class ComplexSpectrum {
public:
    ComplexSpectrum() = default;

    explicit ComplexSpectrum(int n) : n_(n) {
        if (n < 2 || n % 2 != 0) throw InvalidGridError("ComplexSpectrum: truncation size must be even");
        c_.assign(static_cast<std::size_t>(n - 1), cplx{});
    }

    static ComplexSpectrum from_real(const SpectralField& f) {
        ComplexSpectrum r(f.size());
        for (int xi = -r.kmax(); xi <= r.kmax(); ++xi) r.at(xi) = f.coeff(xi);
        return r;
    }

    int size() const noexcept { return n_; }
    int kmax() const noexcept { return n_ / 2 - 1; }

    cplx coeff(int xi) const {
        if (xi < -kmax() || xi > kmax()) return {};
        return c_[static_cast<std::size_t>(xi + kmax())];
    }
    cplx& at(int xi) {
        if (xi < -kmax() || xi > kmax()) throw DomainError("ComplexSpectrum::at: frequency out of range");
        return c_[static_cast<std::size_t>(xi + kmax())];
    }

    /// max |c(-xi) - conj(c(xi))|; zero iff the function is real.
    double hermitian_defect() const {
        double d = 0.0;
        for (int xi = 0; xi <= kmax(); ++xi) d = std::max(d, std::abs(coeff(-xi) - std::conj(coeff(xi))));
        return d;
    }

    /// Real part as a SpectralField: (c(xi) + conj c(-xi)) / 2.
    SpectralField real_part(bool mean_zero = false) const {
        std::vector<cplx> half(static_cast<std::size_t>(n_ / 2));
        for (int xi = 0; xi <= kmax(); ++xi)
            half[static_cast<std::size_t>(xi)] = 0.5 * (coeff(xi) + std::conj(coeff(-xi)));
        return SpectralField::from_half(std::move(half), mean_zero);
    }

    /// Imaginary part as a SpectralField: (c(xi) - conj c(-xi)) / (2i).
    SpectralField imag_part() const {
        std::vector<cplx> half(static_cast<std::size_t>(n_ / 2));
        for (int xi = 0; xi <= kmax(); ++xi)
            half[static_cast<std::size_t>(xi)] = (coeff(xi) - std::conj(coeff(-xi))) / cplx(0.0, 2.0);
        return SpectralField::from_half(std::move(half), false);
    }

    std::vector<cplx> to_grid(int m) const {
        if (m < n_ || m % 2 != 0) throw InvalidGridError("ComplexSpectrum::to_grid: grid must be even and >= N");
        std::vector<cplx> c(static_cast<std::size_t>(m));
        for (int xi = -kmax(); xi <= kmax(); ++xi) c[static_cast<std::size_t>(fft_slot(xi, m))] = coeff(xi);
        return fft::inverse(c);
    }

    double l2_norm() const {
        double s = 0.0;
        for (const auto& v : c_) s += std::norm(v);
        return std::sqrt(s);
    }

    ComplexSpectrum& operator+=(const ComplexSpectrum& o) {
        if (o.n_ != n_) throw ShapeError("ComplexSpectrum: truncation sizes differ");
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    ComplexSpectrum& operator-=(const ComplexSpectrum& o) {
        if (o.n_ != n_) throw ShapeError("ComplexSpectrum: truncation sizes differ");
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    ComplexSpectrum& operator*=(cplx a) {
        for (auto& v : c_) v *= a;
        return *this;
    }
    friend ComplexSpectrum operator+(ComplexSpectrum a, const ComplexSpectrum& b) { return a += b; }
    friend ComplexSpectrum operator-(ComplexSpectrum a, const ComplexSpectrum& b) { return a -= b; }
    friend ComplexSpectrum operator*(cplx s, ComplexSpectrum a) { return a *= s; }

private:
    int n_ = 0;
    std::vector<cplx> c_;
};

/// Trigonometric interpolant of M equispaced real samples (M even).
/// The result has truncation size M; the Nyquist coefficient is dropped.
inline SpectralField forward_transform(std::span<const double> samples) {
    const int m = static_cast<int>(samples.size());
    if (m < 2 || m % 2 != 0) throw InvalidGridError("forward_transform: sample count must be even, got " + std::to_string(m));
    const auto c = fft::forward(samples);
    std::vector<cplx> half(static_cast<std::size_t>(m / 2));
    half[0] = cplx(c[0].real(), 0.0);
    for (int k = 1; k < m / 2; ++k) {
        // average with the mirrored slot so roundoff asymmetry cannot break reality
        half[static_cast<std::size_t>(k)] =
            0.5 * (c[static_cast<std::size_t>(k)] + std::conj(c[static_cast<std::size_t>(m - k)]));
    }
    return SpectralField::from_half(std::move(half), false);
}

/// forward_transform followed by truncation to n modes.
inline SpectralField from_grid(std::span<const double> samples, int n) {
    const int m = static_cast<int>(samples.size());
    if (m < n) throw InvalidGridError("from_grid: fewer samples than the truncation size");
    return forward_transform(samples).resized(n);
}

/// Complex samples on M nodes to a complex spectrum truncated at n.
inline ComplexSpectrum complex_from_grid(std::span<const cplx> samples, int n) {
    const int m = static_cast<int>(samples.size());
    if (m < n || m % 2 != 0) throw InvalidGridError("complex_from_grid: need an even sample count >= N");
    const auto c = fft::forward(samples);
    ComplexSpectrum r(n);
    for (int xi = -r.kmax(); xi <= r.kmax(); ++xi) r.at(xi) = c[static_cast<std::size_t>(fft_slot(xi, m))];
    return r;
}

}  // namespace darcywave
