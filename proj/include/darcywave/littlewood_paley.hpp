#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "darcywave/errors.hpp"
#include "darcywave/fourier.hpp"
#include "darcywave/spectral_field.hpp"

namespace darcywave {

/// Dyadic Littlewood-Paley profile built from the C-infinity step
/// theta(t) = 1 for |t| <= 0.9, 0 for |t| >= 1.1.
///
/// The low-frequency piece is theta and the annulus piece is
/// chi(t) = theta(t/2) - theta(t), so the blocks telescope to
/// theta(xi / 2^J) and the partition of unity is exact on |xi| <= 0.9 * 2^J.
class LPProfile {
public:
    static constexpr double inner = 0.9;
    static constexpr double outer = 1.1;

    /// Profile with enough blocks to cover frequencies |xi| <= max_frequency.
    explicit LPProfile(int max_frequency) {
        if (max_frequency < 0) throw DomainError("LPProfile: negative frequency range");
        j_max_ = 1;
        while (inner * std::ldexp(1.0, j_max_) < max_frequency) ++j_max_;
    }

    int j_max() const noexcept { return j_max_; }

    static double step(double t) {
        const double a = std::abs(t);
        if (a <= inner) return 1.0;
        if (a >= outer) return 0.0;
        const double p = bump_glue(outer - a);
        const double q = bump_glue(a - inner);
        return p / (p + q);
    }

    static double low(double xi) { return step(xi); }
    static double annulus(double t) { return step(0.5 * t) - step(t); }

    /// Multiplier of block j at frequency xi.
    double weight(int j, double xi) const {
        if (j < 0 || j > j_max_) throw DomainError("LPProfile: block index out of range");
        if (j == 0) return low(xi);
        return annulus(xi / std::ldexp(1.0, j - 1));
    }

private:
    static double bump_glue(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

    int j_max_ = 1;
};

/// Dyadic block Delta_j of a real field.
inline SpectralField lp_block(const SpectralField& f, int j, const LPProfile& profile) {
    std::vector<cplx> half(f.half().begin(), f.half().end());
    for (int xi = 0; xi < f.modes(); ++xi) half[static_cast<std::size_t>(xi)] *= profile.weight(j, xi);
    return SpectralField::from_half(std::move(half), f.mean_zero() || j > 0);
}

/// Discrete L^p norm over T sampled on the 3/2-padded grid (p = inf gives the max).
inline double grid_lp_norm(const SpectralField& f, double p) {
    if (!(p >= 1.0)) throw DomainError("grid_lp_norm: p must be >= 1");
    const auto v = f.to_grid(dealiased_size(f.size()));
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), p);
    return std::pow(s / static_cast<double>(v.size()), 1.0 / p);
}

/// Besov norm: l^{p2} over j of 2^{js} ||Delta_j f||_{L^{p1}}.
inline double besov_norm(const SpectralField& f, double s, double p1, double p2, const LPProfile& profile) {
    if (!(p2 >= 1.0)) throw DomainError("besov_norm: p2 must be >= 1");
    double acc = 0.0;
    for (int j = 0; j <= profile.j_max(); ++j) {
        const double term = std::pow(2.0, j * s) * grid_lp_norm(lp_block(f, j, profile), p1);
        if (std::isinf(p2))
            acc = std::max(acc, term);
        else
            acc += std::pow(term, p2);
    }
    return std::isinf(p2) ? acc : std::pow(acc, 1.0 / p2);
}

/// H^s norm: sqrt(sum over all xi of (1 + 4 pi^2 xi^2)^s |c_xi|^2).
inline double sobolev_norm(const SpectralField& f, double s) {
    double acc = std::norm(f.coeff(0));
    for (int xi = 1; xi < f.modes(); ++xi)
        acc += 2.0 * std::pow(1.0 + kTwoPi * kTwoPi * xi * xi, s) * std::norm(f.coeff(xi));
    return std::sqrt(acc);
}

}  // namespace darcywave
