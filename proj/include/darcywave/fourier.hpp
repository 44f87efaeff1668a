#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "darcywave/errors.hpp"

namespace darcywave {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace fft {

namespace detail {
inline Eigen::FFT<double>& engine() {
    // kissfft caches twiddles per size; one engine per thread keeps calls reentrant.
    thread_local Eigen::FFT<double> e = [] {
        Eigen::FFT<double> f;
        f.SetFlag(Eigen::FFT<double>::Unscaled);
        return f;
    }();
    return e;
}
}  // namespace detail

/// Analysis: c_k = (1/M) sum_j x_j exp(-2 pi i j k / M).
inline std::vector<cplx> forward(std::span<const cplx> x) {
    std::vector<cplx> in(x.begin(), x.end());
    std::vector<cplx> out;
    detail::engine().fwd(out, in);
    const double scale = 1.0 / static_cast<double>(x.size());
    for (auto& v : out) v *= scale;
    return out;
}

inline std::vector<cplx> forward(std::span<const double> x) {
    std::vector<cplx> in(x.begin(), x.end());
    return forward(std::span<const cplx>(in));
}

/// Synthesis: x_j = sum_k c_k exp(2 pi i j k / M).
inline std::vector<cplx> inverse(std::span<const cplx> c) {
    std::vector<cplx> in(c.begin(), c.end());
    std::vector<cplx> out;
    detail::engine().inv(out, in);
    return out;
}

}  // namespace fft

/// Signed frequency stored in slot k of a length-m FFT array (Nyquist maps to +m/2).
inline int signed_frequency(int k, int m) { return k <= m / 2 ? k : k - m; }

/// Slot of frequency xi in a length-m FFT array.
inline int fft_slot(int xi, int m) { return xi >= 0 ? xi : xi + m; }

/// Equispaced nodes w_j = j/m on the unit torus.
inline std::vector<double> torus_nodes(int m) {
    std::vector<double> w(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) w[static_cast<std::size_t>(j)] = static_cast<double>(j) / m;
    return w;
}

/// Smallest even grid size holding the 3/2-rule products of an n-mode field.
inline int dealiased_size(int n) {
    int m = (3 * n + 1) / 2;
    if (m % 2 != 0) ++m;
    return m;
}

/// Periodic distance on T = R/Z.
inline double torus_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), 1.0);
    return d > 0.5 ? 1.0 - d : d;
}

}  // namespace darcywave
