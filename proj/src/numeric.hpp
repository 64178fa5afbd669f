// Small numerical helpers shared by the estimators.
#ifndef ERGM_SRC_NUMERIC_HPP
#define ERGM_SRC_NUMERIC_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace ergm::detail {

template <typename Derived>
double log_sum_exp(const Eigen::MatrixBase<Derived>& v) {
    if (v.size() == 0) return -std::numeric_limits<double>::infinity();
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().sum());
}

/// Solves A x = b for symmetric PSD A, adding the smallest ridge (relative to
/// the diagonal scale) that makes the factorization succeed.
inline Eigen::VectorXd solve_psd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const Eigen::Index p = A.rows();
    const double scale = std::max(A.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    double ridge = 0.0;
    for (int attempt = 0; attempt < 30; ++attempt) {
        Eigen::LLT<Eigen::MatrixXd> llt(A + ridge * Eigen::MatrixXd::Identity(p, p));
        if (llt.info() == Eigen::Success) {
            Eigen::VectorXd x = llt.solve(b);
            if (x.allFinite()) return x;
        }
        ridge = ridge == 0.0 ? 1e-12 * scale : ridge * 10;
    }
    return Eigen::VectorXd::Zero(p);
}

/// Smallest eigenvalue over largest (0 for a zero matrix).
inline double condition_ratio(const Eigen::MatrixXd& A) {
    if (A.size() == 0) return 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    const double hi = es.eigenvalues().maxCoeff();
    if (hi <= 0) return 0.0;
    return es.eigenvalues().minCoeff() / hi;
}

/// Normalized importance weights exp(v - lse(v)).
template <typename Derived>
Eigen::VectorXd softmax(const Eigen::MatrixBase<Derived>& v) {
    const double m = v.maxCoeff();
    Eigen::VectorXd w = (v.array() - m).exp();
    return w / w.sum();
}

/// Kish effective sample size of normalized weights.
inline double kish_ess(const Eigen::VectorXd& w) { return 1.0 / w.squaredNorm(); }

}  // namespace ergm::detail

#endif  // ERGM_SRC_NUMERIC_HPP
