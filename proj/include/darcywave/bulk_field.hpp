#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "darcywave/chebyshev.hpp"
#include "darcywave/errors.hpp"
#include "darcywave/fourier.hpp"
#include "darcywave/spectral_field.hpp"

namespace darcywave {

enum class NodeFamily { equispaced, chebyshev };

/// Vertical nodes on [0, h], strictly increasing with z.front() == 0 and z.back() == h.
class VerticalGrid {
public:
    VerticalGrid() = default;

    VerticalGrid(NodeFamily family, int m, double h) : family_(family), h_(h) {
        if (m < 2) throw InvalidGridError("VerticalGrid: need at least two nodes");
        if (!(h > 0.0)) throw DomainError("VerticalGrid: depth must be positive");
        if (family == NodeFamily::chebyshev) {
            z_ = cheb::nodes(m, h);
        } else {
            z_.resize(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) z_[static_cast<std::size_t>(i)] = h * i / (m - 1);
        }
    }

    static VerticalGrid chebyshev(int m, double h) { return {NodeFamily::chebyshev, m, h}; }

    NodeFamily family() const noexcept { return family_; }
    int size() const noexcept { return static_cast<int>(z_.size()); }
    double depth() const noexcept { return h_; }
    const std::vector<double>& z() const noexcept { return z_; }
    double operator[](int i) const { return z_[static_cast<std::size_t>(i)]; }

    bool operator==(const VerticalGrid& o) const { return family_ == o.family_ && h_ == o.h_ && z_ == o.z_; }

private:
    NodeFamily family_ = NodeFamily::chebyshev;
    double h_ = 1.0;
    std::vector<double> z_;
};

/// Scalar or vector field on the tensor grid (M_w equispaced nodes on T) x (vertical nodes).
///
/// Component c is an M_z x M_w matrix: row iz holds the values at height z[iz].
class BulkField {
public:
    BulkField() = default;

    BulkField(int m_w, VerticalGrid grid, int components = 1) : m_w_(m_w), grid_(std::move(grid)) {
        if (m_w < 2 || m_w % 2 != 0) throw InvalidGridError("BulkField: horizontal grid must be even");
        if (components < 1) throw ShapeError("BulkField: need at least one component");
        comp_.assign(static_cast<std::size_t>(components), Eigen::MatrixXd::Zero(grid_.size(), m_w));
    }

    int m_w() const noexcept { return m_w_; }
    int m_z() const noexcept { return grid_.size(); }
    int components() const noexcept { return static_cast<int>(comp_.size()); }
    const VerticalGrid& grid() const noexcept { return grid_; }

    Eigen::MatrixXd& component(int c) { return comp_.at(static_cast<std::size_t>(c)); }
    const Eigen::MatrixXd& component(int c) const { return comp_.at(static_cast<std::size_t>(c)); }

    double& operator()(int c, int iz, int iw) { return comp_[static_cast<std::size_t>(c)](iz, iw); }
    double operator()(int c, int iz, int iw) const { return comp_[static_cast<std::size_t>(c)](iz, iw); }

    /// Row of component c at vertical node iz.
    std::vector<double> row(int c, int iz) const {
        const auto& m = component(c);
        std::vector<double> r(static_cast<std::size_t>(m_w_));
        for (int j = 0; j < m_w_; ++j) r[static_cast<std::size_t>(j)] = m(iz, j);
        return r;
    }

    void set_row(int c, int iz, const std::vector<double>& v) {
        if (static_cast<int>(v.size()) != m_w_) throw ShapeError("BulkField::set_row: length mismatch");
        auto& m = component(c);
        for (int j = 0; j < m_w_; ++j) m(iz, j) = v[static_cast<std::size_t>(j)];
    }

    bool compatible(const BulkField& o) const { return m_w_ == o.m_w_ && grid_ == o.grid_; }

    /// Largest absolute value over all components and nodes.
    double max_abs() const {
        double m = 0.0;
        for (const auto& c : comp_) m = std::max(m, c.cwiseAbs().maxCoeff());
        return m;
    }

private:
    int m_w_ = 0;
    VerticalGrid grid_;
    std::vector<Eigen::MatrixXd> comp_;
};

/// Spectral derivative in w of one row of grid samples (any even length).
inline std::vector<double> grid_derivative_w(const std::vector<double>& row) {
    const int m = static_cast<int>(row.size());
    auto c = fft::forward(std::span<const double>(row));
    for (int k = 0; k < m; ++k) {
        const int xi = signed_frequency(k, m);
        c[static_cast<std::size_t>(k)] *= (2 * xi == m) ? cplx{} : cplx(0.0, kTwoPi * xi);
    }
    const auto d = fft::inverse(c);
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) out[static_cast<std::size_t>(k)] = d[static_cast<std::size_t>(k)].real();
    return out;
}

/// d/dw of every row of component c.
inline Eigen::MatrixXd derivative_w(const BulkField& f, int c) {
    Eigen::MatrixXd out(f.m_z(), f.m_w());
    for (int iz = 0; iz < f.m_z(); ++iz) {
        const auto d = grid_derivative_w(f.row(c, iz));
        for (int j = 0; j < f.m_w(); ++j) out(iz, j) = d[static_cast<std::size_t>(j)];
    }
    return out;
}

/// d/dz of component c (Chebyshev differentiation; requires Chebyshev nodes).
inline Eigen::MatrixXd derivative_z(const BulkField& f, int c) {
    if (f.grid().family() != NodeFamily::chebyshev)
        throw InvalidGridError("derivative_z: vertical grid must be Chebyshev-Gauss-Lobatto");
    return cheb::diff_matrix(f.m_z(), f.grid().depth()) * f.component(c);
}

}  // namespace darcywave
