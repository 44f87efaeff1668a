#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "darcywave/conformal.hpp"
#include "darcywave/errors.hpp"
#include "darcywave/forcing.hpp"
#include "darcywave/gmres.hpp"
#include "darcywave/littlewood_paley.hpp"
#include "darcywave/spectral_field.hpp"
#include "darcywave/waveop.hpp"

namespace darcywave {

struct ContinuationConfig {
    double newton_tol = 1e-10;
    int max_newton_iters = 12;
    double linear_tol = 1e-10;
    double fd_step = 1e-6;
    double initial_step = 0.01;
    double min_step = 1e-5;
    double max_step = 0.0125;
    double step_grow = 1.5;
    double step_shrink = 0.5;
    int fast_newton_iters = 3;  ///< grow the step when the corrector needs at most this many iterations
    double upkappa_max = 0.3;
    double distortion_max = 50.0;
    double jacobian_min = 1e-4;
    double sobolev_max = std::numeric_limits<double>::infinity();
    double holder_max = std::numeric_limits<double>::infinity();
    int max_steps = 200;
    int n = 256;
    int m_z = 48;
    double epsilon = 0.25;
    int trend_window = 5;

    void validate() const {
        if (!(epsilon > 0.0 && epsilon <= 0.5)) throw ConfigError("continuation: epsilon must lie in (0, 1/2]");
        if (n < 4 || n % 2 != 0) throw ConfigError("continuation: N must be even and >= 4");
        if (m_z < 4) throw ConfigError("continuation: M_z must be >= 4");
        if (!(newton_tol > 0.0)) throw ConfigError("continuation: newton_tol must be positive");
        if (!(min_step > 0.0 && min_step <= initial_step && initial_step <= max_step))
            throw ConfigError("continuation: need 0 < min_step <= initial_step <= max_step");
        if (!(step_shrink > 0.0 && step_shrink < 1.0) || !(step_grow >= 1.0))
            throw ConfigError("continuation: step factors out of range");
        if (max_steps < 1 || max_newton_iters < 1) throw ConfigError("continuation: budgets must be positive");
    }
};

/// Blow-up monitors of one branch point.
struct Monitors {
    double upkappa = 0.0;
    double sobolev = 0.0;      ///< H^{1/2 + eps} norm
    double holder = 0.0;       ///< B^{eps}_{inf, inf} Littlewood-Paley monitor
    double distortion = 1.0;
    double min_jacobian = 1.0;
    bool admissible = true;
    bool graphical = true;
    double ellipticity_margin = 0.0;  ///< min |X - iY| on the top trace
    double residual = 0.0;            ///< ||P(upkappa, psi)||_{L2}
};

/// Names of the monitored quantities, in the order used for trend flags.
inline const std::vector<std::string>& monitor_names() {
    static const std::vector<std::string> names{"upkappa", "sobolev", "holder", "distortion", "jacobian_min"};
    return names;
}

struct BranchPoint {
    double upkappa = 0.0;
    SpectralField psi;
    Monitors monitors;
    double arclength = 0.0;
    int newton_iterations = 0;
};

enum class Termination { upkappa_max, distortion_max, jacobian_min, sobolev_max, holder_max, newton_failure, step_budget };

inline std::string to_string(Termination t) {
    switch (t) {
        case Termination::upkappa_max: return "upkappa_max";
        case Termination::distortion_max: return "distortion_max";
        case Termination::jacobian_min: return "jacobian_min";
        case Termination::sobolev_max: return "sobolev_max";
        case Termination::holder_max: return "holder_max";
        case Termination::newton_failure: return "newton_failure";
        case Termination::step_budget: return "step_budget";
    }
    return "unknown";
}

inline Termination termination_from_string(const std::string& s) {
    for (auto t : {Termination::upkappa_max, Termination::distortion_max, Termination::jacobian_min, Termination::sobolev_max,
                   Termination::holder_max, Termination::newton_failure, Termination::step_budget})
        if (to_string(t) == s) return t;
    throw ConfigError("unknown termination reason '" + s + "'");
}

struct Branch {
    std::vector<BranchPoint> points;
    Termination reason = Termination::step_budget;
    std::string tripped;         ///< monitor that crossed its threshold (empty for solver-side stops)
    std::string fastest_growing; ///< monitor with the largest relative growth over the trailing window
    std::string detail;
};

/// Computes |upkappa|, the H^{1/2+eps} norm, the C^eps monitor, distortion and the admissibility data.
inline Monitors blowup_monitors(double upkappa, const SpectralField& psi, const ContinuationConfig& cfg, double h) {
    Monitors m;
    m.upkappa = std::abs(upkappa);
    m.sobolev = sobolev_norm(psi, 0.5 + cfg.epsilon);
    const LPProfile profile(psi.size() / 2);
    m.holder = besov_norm(psi, cfg.epsilon, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), profile);
    const auto rep = admissibility_check(psi, h);
    m.distortion = rep.injectivity_ok ? rep.distortion : std::numeric_limits<double>::infinity();
    m.min_jacobian = rep.min_jacobian;
    m.admissible = rep.admissible();
    m.graphical = rep.graphical;
    return m;
}

/// Monitor values in monitor_names() order, each oriented so that growth means approach to breakdown.
inline std::vector<double> monitor_vector(const Monitors& m) {
    return {m.upkappa, m.sobolev, m.holder, m.distortion, m.min_jacobian > 0.0 ? 1.0 / m.min_jacobian : std::numeric_limits<double>::infinity()};
}

/// Monitor with the largest relative growth over the last `window` points.
inline std::string fastest_growing_monitor(const std::vector<BranchPoint>& pts, int window) {
    if (pts.size() < 2) return monitor_names()[0];
    const std::size_t last = pts.size() - 1;
    const std::size_t first = last >= static_cast<std::size_t>(window) ? last - static_cast<std::size_t>(window) : 0;
    const auto a = monitor_vector(pts[first].monitors);
    const auto b = monitor_vector(pts[last].monitors);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double tiny = 1e-300;
        double g = std::isinf(b[i]) ? std::numeric_limits<double>::max() : std::log((b[i] + tiny) / (a[i] + tiny));
        if (!std::isfinite(g)) g = std::numeric_limits<double>::max();
        if (g > best) {
            best = g;
            arg = i;
        }
    }
    return monitor_names()[arg];
}

struct NewtonReport {
    bool converged = false;
    int iterations = 0;
    std::vector<double> residuals;  ///< ||P|| before each step and after the last one
    std::string message;
};

/// Newton failure carrying the last iterate.
class NewtonFailure : public NonConvergenceError {
public:
    NewtonFailure(const std::string& what, SpectralField last, NewtonReport report)
        : NonConvergenceError(what, report.residuals.empty() ? 0.0 : report.residuals.back()),
          last_(std::move(last)),
          report_(std::move(report)) {}

    const SpectralField& last_iterate() const noexcept { return last_; }
    const NewtonReport& report() const noexcept { return report_; }

private:
    SpectralField last_;
    NewtonReport report_;
};

namespace detail {

inline double top_min_jacobian(const WaveOperator& op, const SpectralField& psi) {
    const auto L = map_layer(psi, op.params().h, op.params().h, op.m());
    double mn = std::numeric_limits<double>::infinity();
    for (int j = 0; j < L.size(); ++j) mn = std::min(mn, L.jacobian(j));
    return mn;
}

inline double residual_norm(const SpectralField& P) { return P.l2_norm(); }

/// H^{1/2} weights of the packed coordinates.
inline Eigen::VectorXd half_weights(int n) {
    Eigen::VectorXd w(n - 2);
    for (int xi = 1; xi < n / 2; ++xi) {
        const double v = std::sqrt(1.0 + kTwoPi * kTwoPi * xi * xi);
        w(2 * (xi - 1)) = v;
        w(2 * (xi - 1) + 1) = v;
    }
    return w;
}

/// Dense LU of A(upkappa, psi) for right preconditioning.
inline Eigen::PartialPivLU<Eigen::MatrixXd> principal_lu(const WaveOperator& op, const EllipticityFields& xy) {
    op.check_elliptic(xy);
    return op.assemble_A(xy).partialPivLu();
}

}  // namespace detail

/// Damped Newton for P(upkappa, psi) = 0 at fixed upkappa.
///
/// The Jacobian acts by one-sided differences and each linear solve is
/// GMRES right-preconditioned by a dense LU of A(upkappa, psi).
inline std::pair<SpectralField, NewtonReport> newton_solve(const WaveOperator& op, double upkappa, const SpectralField& psi0,
                                                           const ContinuationConfig& cfg) {
    NewtonReport rep;
    SpectralField psi = psi0.mean_free();
    SpectralField P = op.residual(upkappa, psi);
    double r = detail::residual_norm(P);
    rep.residuals.push_back(r);
    while (r > cfg.newton_tol) {
        if (rep.iterations >= cfg.max_newton_iters)
            throw NewtonFailure("newton_solve: iteration limit reached", psi, rep);
        const auto xy = op.xy_fields(upkappa, psi);
        const auto lu = detail::principal_lu(op, xy);
        const Eigen::VectorXd base = pack(P);
        const double delta = cfg.fd_step * (1.0 + psi.l2_norm());
        const LinearMap J = [&](const Eigen::VectorXd& v) {
            const double nv = v.norm();
            if (nv == 0.0) return Eigen::VectorXd::Zero(v.size()).eval();
            const double e = delta / nv;
            return ((pack(op.residual(upkappa, psi + e * unpack(v))) - base) / e).eval();
        };
        const LinearMap M = [&](const Eigen::VectorXd& v) { return lu.solve(v).eval(); };
        const auto sol = fgmres(J, -base, M, GmresOptions{cfg.linear_tol, 40, 120});
        const SpectralField step = unpack(sol.x);
        double lambda = 1.0;
        bool accepted = false;
        for (int b = 0; b < 10; ++b, lambda *= 0.5) {
            const SpectralField trial = psi + lambda * step;
            if (!(detail::top_min_jacobian(op, trial) > 0.0)) continue;
            SpectralField Pt;
            try {
                Pt = op.residual(upkappa, trial);
            } catch (const Error&) {
                continue;
            }
            const double rt = detail::residual_norm(Pt);
            if (std::isfinite(rt) && rt < (1.0 - 1e-4 * lambda) * r) {
                psi = trial;
                P = Pt;
                r = rt;
                accepted = true;
                break;
            }
        }
        ++rep.iterations;
        rep.residuals.push_back(r);
        if (!accepted) {
            if (!(detail::top_min_jacobian(op, psi + step) > 0.0))
                throw DegenerateMapError("newton_solve: Newton step leaves the admissible set");
            throw NewtonFailure("newton_solve: line search failed", psi, rep);
        }
    }
    rep.converged = true;
    return {psi, rep};
}

namespace detail {

struct CorrectorResult {
    bool ok = false;
    double upkappa = 0.0;
    SpectralField psi;
    int iterations = 0;
    double residual = 0.0;
};

/// Newton on the bordered system [P(upkappa, psi); tau . W (y - y_pred)] = 0.
inline CorrectorResult bordered_corrector(const WaveOperator& op, double up_pred, const SpectralField& psi_pred,
                                          double tau_up, const Eigen::VectorXd& tau_psi, const ContinuationConfig& cfg) {
    const Eigen::VectorXd W = half_weights(op.n());
    const Eigen::VectorXd wtau = tau_psi.cwiseProduct(W).cwiseProduct(W);
    const Eigen::VectorXd y_pred = pack(psi_pred);
    CorrectorResult res;
    double up = up_pred;
    SpectralField psi = psi_pred;
    auto constraint = [&](double u, const SpectralField& p) { return tau_up * (u - up_pred) + wtau.dot(pack(p) - y_pred); };
    SpectralField P = op.residual(up, psi);
    double r = std::hypot(P.l2_norm(), constraint(up, psi));
    const int d = op.dim();
    while (r > cfg.newton_tol) {
        if (res.iterations >= cfg.max_newton_iters) return res;
        EllipticityFields xy;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu;
        try {
            xy = op.xy_fields(up, psi);
            op.check_elliptic(xy);
        } catch (const Error&) {
            return res;
        }
        const Eigen::VectorXd base = pack(P);
        const double delta = cfg.fd_step * (1.0 + psi.l2_norm() + std::abs(up));
        const Eigen::VectorXd Jup = (pack(op.residual(up + delta, psi)) - base) / delta;
        Eigen::MatrixXd B(d + 1, d + 1);
        B.topLeftCorner(d, d) = op.assemble_A(xy);
        B.topRightCorner(d, 1) = Jup;
        B.bottomLeftCorner(1, d) = wtau.transpose();
        B(d, d) = tau_up;
        const auto blu = B.partialPivLu();
        const LinearMap J = [&](const Eigen::VectorXd& v) {
            const double nv = v.norm();
            Eigen::VectorXd out(d + 1);
            if (nv == 0.0) return Eigen::VectorXd::Zero(d + 1).eval();
            const double e = delta / nv;
            out.head(d) = (pack(op.residual(up + e * v(d), psi + e * unpack(v.head(d)))) - base) / e;
            out(d) = wtau.dot(v.head(d)) + tau_up * v(d);
            return out;
        };
        const LinearMap M = [&](const Eigen::VectorXd& v) { return blu.solve(v).eval(); };
        Eigen::VectorXd rhs(d + 1);
        rhs.head(d) = -base;
        rhs(d) = -constraint(up, psi);
        const auto sol = fgmres(J, rhs, M, GmresOptions{cfg.linear_tol, 40, 120});
        double lambda = 1.0;
        bool accepted = false;
        for (int b = 0; b < 8; ++b, lambda *= 0.5) {
            const SpectralField tp = psi + lambda * unpack(sol.x.head(d));
            const double tu = up + lambda * sol.x(d);
            if (!(top_min_jacobian(op, tp) > 0.0)) continue;
            SpectralField Pt;
            try {
                Pt = op.residual(tu, tp);
            } catch (const Error&) {
                continue;
            }
            const double rt = std::hypot(Pt.l2_norm(), constraint(tu, tp));
            if (std::isfinite(rt) && rt < (1.0 - 1e-4 * lambda) * r) {
                psi = tp;
                up = tu;
                P = Pt;
                r = rt;
                accepted = true;
                break;
            }
        }
        ++res.iterations;
        if (!accepted) return res;
    }
    res.ok = true;
    res.upkappa = up;
    res.psi = psi;
    res.residual = P.l2_norm();
    return res;
}

}  // namespace detail

/// Observer invoked after every accepted point (used for streaming output).
using PointObserver = std::function<void(const BranchPoint&)>;

/// Pseudo-arclength continuation of P(upkappa, psi) = 0 from (0, 0).
inline Branch continue_branch(const ForcingSpec& spec, const PhysicalParams& params, const ContinuationConfig& cfg,
                              const PointObserver& observer = {}) {
    cfg.validate();
    const WaveOperator op(spec, params, cfg.n, cfg.m_z);
    const Eigen::VectorXd W = detail::half_weights(cfg.n);
    auto metric = [&](double du, const Eigen::VectorXd& dpsi) { return std::sqrt(du * du + dpsi.cwiseProduct(W).squaredNorm()); };

    Branch branch;
    auto accept = [&](double up, const SpectralField& psi, int iters, double ds) {
        BranchPoint bp;
        bp.upkappa = up;
        bp.psi = psi;
        bp.newton_iterations = iters;
        bp.arclength = branch.points.empty() ? 0.0 : branch.points.back().arclength + ds;
        bp.monitors = blowup_monitors(up, psi, cfg, params.h);
        const auto xy = op.xy_fields(up, psi);
        bp.monitors.ellipticity_margin = xy.min_abs_x_minus_iy;
        bp.monitors.residual = op.residual(up, psi).l2_norm();
        branch.points.push_back(bp);
        if (observer) observer(branch.points.back());
    };
    auto finish = [&](Termination t, std::string tripped, std::string why) {
        branch.reason = t;
        branch.tripped = std::move(tripped);
        branch.fastest_growing = fastest_growing_monitor(branch.points, cfg.trend_window);
        branch.detail = std::move(why);
        return branch;
    };
    auto check_thresholds = [&]() -> std::optional<Termination> {
        const auto& m = branch.points.back().monitors;
        if (!m.admissible || m.distortion >= cfg.distortion_max) return Termination::distortion_max;
        if (m.min_jacobian <= cfg.jacobian_min) return Termination::jacobian_min;
        if (m.sobolev >= cfg.sobolev_max) return Termination::sobolev_max;
        if (m.holder >= cfg.holder_max) return Termination::holder_max;
        if (m.upkappa >= cfg.upkappa_max) return Termination::upkappa_max;
        return std::nullopt;
    };
    auto tripped_name = [](Termination t) -> std::string {
        switch (t) {
            case Termination::upkappa_max: return "upkappa";
            case Termination::distortion_max: return "distortion";
            case Termination::jacobian_min: return "jacobian_min";
            case Termination::sobolev_max: return "sobolev";
            case Termination::holder_max: return "holder";
            default: return "";
        }
    };

    accept(0.0, SpectralField(cfg.n), 0, 0.0);

    // The branch leaves (0, 0) tangent to the upkappa axis; the first step is taken in upkappa directly.
    double step = cfg.initial_step;
    for (;;) {
        try {
            auto [psi1, rep] = newton_solve(op, step, SpectralField(cfg.n), cfg);
            accept(step, psi1, rep.iterations, metric(step, pack(psi1)));
            break;
        } catch (const Error& e) {
            step *= cfg.step_shrink;
            if (step < cfg.min_step)
                throw ConfigError(std::string("continuation failed at the first step: ") + e.what());
        }
    }
    if (auto t = check_thresholds()) return finish(*t, tripped_name(*t), "threshold reached");

    for (int k = 1; k < cfg.max_steps; ++k) {
        const auto& p1 = branch.points[branch.points.size() - 1];
        const auto& p0 = branch.points[branch.points.size() - 2];
        double du = p1.upkappa - p0.upkappa;
        Eigen::VectorXd dpsi = pack(p1.psi) - pack(p0.psi);
        const double len = metric(du, dpsi);
        du /= len;
        dpsi /= len;
        for (;;) {
            const double up_pred = p1.upkappa + step * du;
            const SpectralField psi_pred = p1.psi + step * unpack(dpsi);
            auto c = detail::bordered_corrector(op, up_pred, psi_pred, du, dpsi, cfg);
            if (c.ok) {
                const double ds = metric(c.upkappa - p1.upkappa, pack(c.psi) - pack(p1.psi));
                // reject corrector jumps far beyond the requested step
                if (ds <= 2.0 * step) {
                    accept(c.upkappa, c.psi, c.iterations, ds);
                    if (c.iterations <= cfg.fast_newton_iters) step = std::min(cfg.max_step, step * cfg.step_grow);
                    break;
                }
            }
            step *= cfg.step_shrink;
            if (step < cfg.min_step) return finish(Termination::newton_failure, "", "corrector failed at the minimum step");
        }
        if (auto t = check_thresholds()) return finish(*t, tripped_name(*t), "threshold reached");
    }
    return finish(Termination::step_budget, "", "step budget exhausted");
}

}  // namespace darcywave
