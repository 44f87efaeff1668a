#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace darcywave {

struct GmresOptions {
    double rel_tol = 1e-12;
    int restart = 60;
    int max_iters = 300;
};

struct GmresResult {
    Eigen::VectorXd x;
    double rel_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Right-preconditioned flexible GMRES with restarts for A x = b.
/// The preconditioner may change between iterations.
inline GmresResult fgmres(const LinearMap& A, const Eigen::VectorXd& b, const LinearMap& M,
                          const GmresOptions& opt = {}, const Eigen::VectorXd* x0 = nullptr) {
    const Eigen::Index n = b.size();
    GmresResult res;
    res.x = x0 ? *x0 : Eigen::VectorXd::Zero(n);
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.x.setZero();
        res.converged = true;
        return res;
    }
    const int m = opt.restart;
    while (res.iterations < opt.max_iters) {
        Eigen::VectorXd r = b - A(res.x);
        double beta = r.norm();
        res.rel_residual = beta / bnorm;
        if (res.rel_residual <= opt.rel_tol) {
            res.converged = true;
            return res;
        }
        std::vector<Eigen::VectorXd> V{r / beta}, Z;
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
        Eigen::VectorXd cs = Eigen::VectorXd::Zero(m), sn = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
        g(0) = beta;
        int k = 0;
        for (; k < m && res.iterations < opt.max_iters; ++k, ++res.iterations) {
            Z.push_back(M(V[static_cast<std::size_t>(k)]));
            Eigen::VectorXd w = A(Z.back());
            // modified Gram-Schmidt, twice for stability
            for (int pass = 0; pass < 2; ++pass)
                for (int i = 0; i <= k; ++i) {
                    const double hij = V[static_cast<std::size_t>(i)].dot(w);
                    H(i, k) += hij;
                    w -= hij * V[static_cast<std::size_t>(i)];
                }
            H(k + 1, k) = w.norm();
            for (int i = 0; i < k; ++i) {
                const double t = cs(i) * H(i, k) + sn(i) * H(i + 1, k);
                H(i + 1, k) = -sn(i) * H(i, k) + cs(i) * H(i + 1, k);
                H(i, k) = t;
            }
            const double den = std::hypot(H(k, k), H(k + 1, k));
            cs(k) = den == 0.0 ? 1.0 : H(k, k) / den;
            sn(k) = den == 0.0 ? 0.0 : H(k + 1, k) / den;
            H(k, k) = den;
            H(k + 1, k) = 0.0;
            g(k + 1) = -sn(k) * g(k);
            g(k) = cs(k) * g(k);
            res.rel_residual = std::abs(g(k + 1)) / bnorm;
            const double sub = w.norm();
            if (res.rel_residual <= opt.rel_tol || sub == 0.0) {
                ++k;
                ++res.iterations;
                break;
            }
            V.push_back(w / sub);
        }
        const Eigen::VectorXd y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
        for (int i = 0; i < k; ++i) res.x += y(i) * Z[static_cast<std::size_t>(i)];
        if (res.rel_residual <= opt.rel_tol) {
            // confirm with the true residual
            res.rel_residual = (b - A(res.x)).norm() / bnorm;
            if (res.rel_residual <= 10.0 * opt.rel_tol) {
                res.converged = true;
                return res;
            }
        }
    }
    res.rel_residual = (b - A(res.x)).norm() / bnorm;
    res.converged = res.rel_residual <= opt.rel_tol;
    return res;
}

}  // namespace darcywave
