// Damped Newton ascent shared by the likelihood maximizers.
#ifndef ERGM_SRC_OPTIMIZE_HPP
#define ERGM_SRC_OPTIMIZE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "numeric.hpp"

namespace ergm::detail {

struct NewtonProblem {
    std::function<double(const Eigen::VectorXd&)> value;
    /// Score and a PSD information matrix (Fisher-type) at theta.
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd&)> local;
    /// Try the finite-difference negative Hessian of the score first; it
    /// restores quadratic convergence when the map theta -> eta is curved.
    bool observed_hessian = false;
    /// Trust region: trial points failing this are treated as infeasible.
    std::function<bool(const Eigen::VectorXd&)> feasible;
};

struct NewtonSettings {
    int max_iterations = 500;
    double gradient_tolerance = 1e-8;
    double step_tolerance = 1e-4;
    double divergence_cap = 50;
    int max_halvings = 40;
};

struct NewtonResult {
    Eigen::VectorXd theta;
    double value = 0;
    int iterations = 0;
    double gradient_norm = 0;
    Eigen::MatrixXd information;
    bool converged = false;
    bool diverged = false;
    /// Set when the last accepted step was shortened by the trust region.
    bool constrained = false;
    /// g' I^-1 g at theta: twice the gain a Newton step still expects.
    double decrement = 0;
};

inline Eigen::MatrixXd fd_negative_hessian(const NewtonProblem& pr, const Eigen::VectorXd& t) {
    const Eigen::Index p = t.size();
    Eigen::MatrixXd H(p, p);
    Eigen::VectorXd gu, gd;
    Eigen::MatrixXd scratch;
    for (Eigen::Index k = 0; k < p; ++k) {
        const double h = 1e-5 * std::max(1.0, std::abs(t(k)));
        Eigen::VectorXd up = t, down = t;
        up(k) += h;
        down(k) -= h;
        pr.local(up, gu, scratch);
        pr.local(down, gd, scratch);
        H.col(k) = -(gu - gd) / (2 * h);
    }
    return 0.5 * (H + H.transpose());
}

inline NewtonResult newton_maximize(const NewtonProblem& pr, Eigen::VectorXd theta0,
                                    const NewtonSettings& s) {
    NewtonResult r;
    r.theta = std::move(theta0);
    double current = pr.value(r.theta);
    Eigen::VectorXd grad;
    for (r.iterations = 0; r.iterations < s.max_iterations; ++r.iterations) {
        pr.local(r.theta, grad, r.information);
        r.gradient_norm = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
        const Eigen::VectorXd fisher = solve_psd(r.information, grad);
        Eigen::VectorXd step = fisher;
        bool observed = false;
        if (pr.observed_hessian) {
            Eigen::LLT<Eigen::MatrixXd> llt(fd_negative_hessian(pr, r.theta));
            if (llt.info() == Eigen::Success) {
                Eigen::VectorXd newton = llt.solve(grad);
                if (newton.allFinite()) {
                    step = newton;
                    observed = true;
                }
            }
        }
        // A small score alone is not enough: on the boundary of the convex
        // hull the score vanishes while the Newton step stays O(1).
        if (r.gradient_norm < s.gradient_tolerance &&
            (step.size() == 0 || step.cwiseAbs().maxCoeff() < s.step_tolerance)) {
            r.converged = true;
            break;
        }

        bool moved = false;
        bool improved = false;
        // The finite-difference Hessian can be poor along nearly flat
        // directions; fall back to the Fisher step when it makes no progress.
        for (int attempt = 0; attempt < (observed ? 2 : 1) && !improved; ++attempt) {
            if (attempt == 1) step = fisher;
            r.constrained = false;
            for (int halving = 0; halving < s.max_halvings; ++halving) {
                const Eigen::VectorXd trial = r.theta + step;
                if (pr.feasible && !pr.feasible(trial)) {
                    r.constrained = true;
                    step *= 0.5;
                    continue;
                }
                const double v = pr.value(trial);
                if (std::isfinite(v) && v >= current - 1e-12 * std::abs(current)) {
                    improved = v > current || halving == 0;
                    r.theta = trial;
                    current = v;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
        }
        if (r.theta.size() && r.theta.cwiseAbs().maxCoeff() > s.divergence_cap) {
            r.diverged = true;
            break;
        }
        if (!moved || !improved) break;
    }
    r.value = current;
    pr.local(r.theta, grad, r.information);
    r.gradient_norm = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
    r.decrement = grad.size() ? grad.dot(solve_psd(r.information, grad)) : 0.0;
    if (!r.converged && !r.diverged && r.gradient_norm < s.gradient_tolerance) {
        // Vanishing score with a Newton step that refuses to shrink: the
        // iterate is sliding along a direction of recession.
        const Eigen::VectorXd step = solve_psd(r.information, grad);
        if (step.size() && step.cwiseAbs().maxCoeff() >= s.step_tolerance && !r.constrained)
            r.diverged = true;
        else
            r.converged = true;
    }
    return r;
}

}  // namespace ergm::detail

#endif  // ERGM_SRC_OPTIMIZE_HPP
