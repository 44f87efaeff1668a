#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "darcywave/errors.hpp"
#include "darcywave/fourier.hpp"

namespace darcywave::cheb {

/// Chebyshev-Gauss-Lobatto nodes on [0, h], increasing: z_i = h (1 - cos(pi i / (m - 1))) / 2.
inline std::vector<double> nodes(int m, double h) {
    if (m < 2) throw InvalidGridError("cheb::nodes: need at least two nodes");
    std::vector<double> z(static_cast<std::size_t>(m));
    const int n = m - 1;
    for (int i = 0; i <= n; ++i) {
        // sin form keeps the nodes symmetric to the last bit
        const double s = std::sin(kPi * (2 * i - n) / (2.0 * n));
        z[static_cast<std::size_t>(i)] = 0.5 * h * (1.0 + s);
    }
    z.front() = 0.0;
    z.back() = h;
    return z;
}

/// First-derivative collocation matrix d/dz on the nodes of nodes(m, h).
inline Eigen::MatrixXd diff_matrix(int m, double h) {
    const int n = m - 1;
    std::vector<double> x(static_cast<std::size_t>(m));
    for (int i = 0; i <= n; ++i) x[static_cast<std::size_t>(i)] = std::sin(kPi * (n - 2 * i) / (2.0 * n));
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
    auto c = [n](int i) { return (i == 0 || i == n) ? 2.0 : 1.0; };
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            if (i == j) continue;
            const double sgn = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            d(i, j) = c(i) / c(j) * sgn / (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
        }
        d(i, i) = -d.row(i).sum();
    }
    // x runs from 1 to -1 while z runs from 0 to h: dz = -(h/2) dx
    return (-2.0 / h) * d;
}

/// Clenshaw-Curtis quadrature weights for the nodes of nodes(m, h).
inline std::vector<double> quadrature_weights(int m, double h) {
    const int n = m - 1;
    std::vector<double> w(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i <= n; ++i) {
        const double theta = kPi * i / n;
        double s = 0.0;
        for (int k = 1; k <= n / 2; ++k) {
            const double b = (2 * k == n) ? 1.0 : 2.0;
            s += b * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
        }
        const double c = (i == 0 || i == n) ? 1.0 : 2.0;
        w[static_cast<std::size_t>(i)] = c / n * (1.0 - s) * 0.5 * h;
    }
    return w;
}

/// Barycentric interpolation from Chebyshev-Lobatto samples to an arbitrary point in [0, h].
inline double interpolate(const std::vector<double>& z, const std::vector<double>& values, double at) {
    const int m = static_cast<int>(z.size());
    double num = 0.0, den = 0.0;
    for (int j = 0; j < m; ++j) {
        const double dz = at - z[static_cast<std::size_t>(j)];
        if (dz == 0.0) return values[static_cast<std::size_t>(j)];
        double wj = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == m - 1) wj *= 0.5;
        num += wj / dz * values[static_cast<std::size_t>(j)];
        den += wj / dz;
    }
    return num / den;
}

}  // namespace darcywave::cheb
