#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "darcywave/bulk_field.hpp"
#include "darcywave/errors.hpp"
#include "darcywave/fourier.hpp"
#include "darcywave/multipliers.hpp"
#include "darcywave/spectral_field.hpp"

namespace darcywave {

/// Grid samples of R_psi and d/dw R_psi along one horizontal line z = const.
struct MapLayer {
    double z = 0.0;
    std::vector<double> w;    ///< nodes j/m
    std::vector<double> r1;   ///< e1 . R
    std::vector<double> r2;   ///< e2 . R
    std::vector<double> d1r1; ///< e1 . d1 R
    std::vector<double> d1r2; ///< e2 . d1 R

    int size() const noexcept { return static_cast<int>(w.size()); }

    /// |d1 R|^2, which equals det grad R by the Cauchy-Riemann equations.
    double jacobian(int j) const {
        const auto i = static_cast<std::size_t>(j);
        return d1r1[i] * d1r1[i] + d1r2[i] * d1r2[i];
    }
};

namespace detail {
inline void require_mean_zero(const SpectralField& psi, const char* who) {
    if (!psi.mean_zero() && psi.mean() != 0.0)
        throw ContractViolation(std::string(who) + ": psi must have zero mean");
}
}  // namespace detail

/// Samples E psi, R_psi and d1 R_psi on m equispaced nodes at height z.
inline MapLayer map_layer(const SpectralField& psi, double z, double h, int m) {
    detail::require_mean_zero(psi, "map_layer");
    detail::check_depth(h);
    if (!(z >= 0.0 && z <= h)) throw DomainError("map_layer: z must lie in [0, h]");
    const int modes = psi.modes();
    std::vector<cplx> e1(static_cast<std::size_t>(modes)), e2(e1), d1(e1), d2(e1);
    for (int xi = 1; xi < modes; ++xi) {
        const cplx c = psi.coeff(xi);
        const double cs = symbol::cosh_over_sinh(xi, z, h);
        const double ss = symbol::sinh_over_sinh(xi, z, h);
        const auto i = static_cast<std::size_t>(xi);
        e1[i] = cplx(0.0, -cs) * c;
        e2[i] = ss * c;
        d1[i] = symbol::wavenumber(xi) * cs * c;
        d2[i] = symbol::derivative(xi) * ss * c;
    }
    MapLayer L;
    L.z = z;
    L.w = torus_nodes(m);
    L.r1 = SpectralField::from_half(std::move(e1), true).to_grid(m);
    L.r2 = SpectralField::from_half(std::move(e2), true).to_grid(m);
    L.d1r1 = SpectralField::from_half(std::move(d1), true).to_grid(m);
    L.d1r2 = SpectralField::from_half(std::move(d2), true).to_grid(m);
    for (int j = 0; j < m; ++j) {
        const auto i = static_cast<std::size_t>(j);
        L.r1[i] += L.w[i];
        L.r2[i] += z;
        L.d1r1[i] += 1.0;
    }
    return L;
}

/// Cauchy-Riemann extension E psi on the tensor grid (m_w x vertical nodes).
inline BulkField cauchy_riemann_extend(const SpectralField& psi, const VerticalGrid& grid, int m_w) {
    detail::require_mean_zero(psi, "cauchy_riemann_extend");
    BulkField out(m_w, grid, 2);
    for (int iz = 0; iz < grid.size(); ++iz) {
        const auto L = map_layer(psi, grid[iz], grid.depth(), m_w);
        for (int j = 0; j < m_w; ++j) {
            const auto i = static_cast<std::size_t>(j);
            out(0, iz, j) = L.r1[i] - L.w[i];
            out(1, iz, j) = L.r2[i] - L.z;
        }
    }
    return out;
}

inline BulkField cauchy_riemann_extend(const SpectralField& psi, const VerticalGrid& grid) {
    return cauchy_riemann_extend(psi, grid, dealiased_size(psi.size()));
}

/// R_psi = id + E psi on the tensor grid.
inline BulkField riemann_map(const SpectralField& psi, const VerticalGrid& grid, int m_w) {
    BulkField R = cauchy_riemann_extend(psi, grid, m_w);
    const auto w = torus_nodes(m_w);
    for (int iz = 0; iz < grid.size(); ++iz)
        for (int j = 0; j < m_w; ++j) {
            R(0, iz, j) += w[static_cast<std::size_t>(j)];
            R(1, iz, j) += grid[iz];
        }
    return R;
}

inline BulkField riemann_map(const SpectralField& psi, const VerticalGrid& grid) {
    return riemann_map(psi, grid, dealiased_size(psi.size()));
}

/// Gradient columns d1 R and d2 R = (d1 R)^perp on the tensor grid, packed as
/// a 2-component field holding d1 R.
inline BulkField map_derivative(const SpectralField& psi, const VerticalGrid& grid, int m_w) {
    BulkField out(m_w, grid, 2);
    for (int iz = 0; iz < grid.size(); ++iz) {
        const auto L = map_layer(psi, grid[iz], grid.depth(), m_w);
        for (int j = 0; j < m_w; ++j) {
            out(0, iz, j) = L.d1r1[static_cast<std::size_t>(j)];
            out(1, iz, j) = L.d1r2[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

/// Distance on the cylinder T x R between two points of R^2.
inline double cylinder_distance(double x0, double y0, double x1, double y1) {
    return std::hypot(torus_distance(x0, x1), y0 - y1);
}

struct AdmissibilityReport {
    double min_jacobian = 0.0;
    double min_boundary_speed = 0.0;
    bool injectivity_ok = false;
    double distortion = 0.0;
    bool graphical = false;
    bool distortion_reliable = true;

    bool admissible() const noexcept { return min_jacobian > 0.0 && injectivity_ok; }
};

struct GeometryOptions {
    int oversample = 4;  ///< boundary samples per retained mode pair
    int m_z = 33;        ///< vertical nodes for the Jacobian scan
};

namespace detail {

/// Boundary curve samples at oversample * N points.
inline MapLayer top_curve(const SpectralField& psi, double h, const GeometryOptions& opt) {
    return map_layer(psi.mean_free(), h, h, opt.oversample * psi.size());
}

inline bool segments_cross(double ax, double ay, double bx, double by, double cx, double cy, double dx, double dy) {
    auto orient = [](double px, double py, double qx, double qy, double rx, double ry) {
        const double v = (qx - px) * (ry - py) - (qy - py) * (rx - px);
        return (v > 0.0) - (v < 0.0);
    };
    auto on_seg = [](double px, double py, double qx, double qy, double rx, double ry) {
        return std::min(px, qx) <= rx && rx <= std::max(px, qx) && std::min(py, qy) <= ry && ry <= std::max(py, qy);
    };
    const int o1 = orient(ax, ay, bx, by, cx, cy), o2 = orient(ax, ay, bx, by, dx, dy);
    const int o3 = orient(cx, cy, dx, dy, ax, ay), o4 = orient(cx, cy, dx, dy, bx, by);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_seg(ax, ay, bx, by, cx, cy)) return true;
    if (o2 == 0 && on_seg(ax, ay, bx, by, dx, dy)) return true;
    if (o3 == 0 && on_seg(cx, cy, dx, dy, ax, ay)) return true;
    if (o4 == 0 && on_seg(cx, cy, dx, dy, bx, by)) return true;
    return false;
}

/// True when the periodic polyline through the samples has no self-intersection.
inline bool polyline_simple(const MapLayer& c) {
    const int m = c.size();
    struct Seg {
        double ax, ay, bx, by, xmin, xmax, ymin, ymax;
    };
    std::vector<Seg> s(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const auto a = static_cast<std::size_t>(i);
        const auto b = static_cast<std::size_t>((i + 1) % m);
        const double shift = (i + 1 == m) ? 1.0 : 0.0;
        Seg g{c.r1[a], c.r2[a], c.r1[b] + shift, c.r2[b], 0, 0, 0, 0};
        g.xmin = std::min(g.ax, g.bx);
        g.xmax = std::max(g.ax, g.bx);
        g.ymin = std::min(g.ay, g.by);
        g.ymax = std::max(g.ay, g.by);
        s[a] = g;
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            for (int n = -1; n <= 1; ++n) {
                // the last segment ends where the first one, shifted by one period, begins
                const bool adjacent = (n == 0 && j == i + 1) || (n == -1 && i == 0 && j == m - 1);
                if (adjacent) continue;
                const Seg& p = s[static_cast<std::size_t>(i)];
                const Seg& q = s[static_cast<std::size_t>(j)];
                if (q.xmin + n > p.xmax || q.xmax + n < p.xmin || q.ymin > p.ymax || q.ymax < p.ymin) continue;
                if (segments_cross(p.ax, p.ay, p.bx, p.by, q.ax + n, q.ay, q.bx + n, q.by)) return false;
            }
        }
    }
    return true;
}

inline double distortion_of_curve(const MapLayer& c) {
    const int m = c.size();
    double d = 0.0;
    for (int j = 0; j < m; ++j) {
        const double speed = std::sqrt(c.jacobian(j));
        if (speed == 0.0) return std::numeric_limits<double>::infinity();
        d = std::max(d, 1.0 / speed);
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(j);
            const double num = torus_distance(c.w[a], c.w[b]);
            const double den = cylinder_distance(c.r1[a], c.r2[a], c.r1[b], c.r2[b]);
            if (den == 0.0) return std::numeric_limits<double>::infinity();
            d = std::max(d, num / den);
        }
    }
    return d;
}

}  // namespace detail

/// Maximal distortion of the free-surface parametrization w -> R_psi(w, h).
inline double distortion(const SpectralField& psi, double h, const GeometryOptions& opt = {}) {
    return detail::distortion_of_curve(detail::top_curve(psi, h, opt));
}

/// Sufficient graph condition: e1 . d1 R_psi(w, h) > 0 on the boundary sampling.
inline bool graphical_check(const SpectralField& psi, double h, const GeometryOptions& opt = {}) {
    const auto c = detail::top_curve(psi, h, opt);
    return *std::min_element(c.d1r1.begin(), c.d1r1.end()) > 0.0;
}

/// Jacobian scan, boundary self-intersection test, distortion and graph test.
inline AdmissibilityReport admissibility_check(const SpectralField& psi, double h, const GeometryOptions& opt = {}) {
    AdmissibilityReport rep;
    const auto top = detail::top_curve(psi, h, opt);
    const int m = top.size();
    rep.min_boundary_speed = std::numeric_limits<double>::infinity();
    rep.min_jacobian = std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) {
        rep.min_boundary_speed = std::min(rep.min_boundary_speed, std::sqrt(top.jacobian(j)));
        rep.min_jacobian = std::min(rep.min_jacobian, top.jacobian(j));
    }
    const auto z = cheb::nodes(opt.m_z, h);
    for (int iz = 0; iz + 1 < opt.m_z; ++iz) {
        const auto L = map_layer(psi.mean_free(), z[static_cast<std::size_t>(iz)], h, m);
        for (int j = 0; j < m; ++j) rep.min_jacobian = std::min(rep.min_jacobian, L.jacobian(j));
    }
    const double lowest = *std::min_element(top.r2.begin(), top.r2.end());
    rep.injectivity_ok = rep.min_jacobian > 0.0 && lowest > 0.0 && detail::polyline_simple(top);
    rep.graphical = *std::min_element(top.d1r1.begin(), top.d1r1.end()) > 0.0;
    rep.distortion = detail::distortion_of_curve(top);
    rep.distortion_reliable = rep.admissible();
    return rep;
}

}  // namespace darcywave
