#ifndef ERGM_EXACT_HPP
#define ERGM_EXACT_HPP

#include <Eigen/Dense>
#include <span>

#include "ergm/mask.hpp"
#include "ergm/model.hpp"

namespace ergm {

/// Limits on brute-force enumeration. Exact routines refuse (cap-exceeded)
/// rather than approximate beyond them.
struct ExactLimits {
    int max_nodes = 7;        // 2^21 graphs
    int max_free_dyads = 21;  // for sums over completions
};

/// Distinct statistic vectors of an enumerated graph set, with their
/// multiplicities. Rows of `stats` are unique.
struct StatSupport {
    Eigen::MatrixXd stats;
    Eigen::VectorXd log_count;

    Eigen::Index size() const { return stats.rows(); }
    /// log Σ_rows count * exp(<eta, s>).
    double log_sum(const EtaVector& eta) const;
};

/// Enumerates every assignment of `free_dyads` on top of `base` (whose free
/// dyads are taken as absent) in Gray-code order.
StatSupport enumerate_support(const ModelSpec& spec, const Graph& base,
                              std::span<const Dyad> free_dyads);

struct ExactMoments {
    double log_normalizer = 0;
    StatVector mean;
    Eigen::MatrixXd covariance;
};

/// ψ, E[s] and Cov[s] for one model by full enumeration; the support is
/// built once so repeated evaluation at different theta is cheap.
class ExactModel {
   public:
    explicit ExactModel(ModelSpec spec, ExactLimits limits = {});

    const ModelSpec& spec() const { return spec_; }
    const StatSupport& support() const { return support_; }

    double log_normalizer(const ThetaVector& theta) const;
    ExactMoments moments(const ThetaVector& theta) const;
    double loglik(const ThetaVector& theta, const StatVector& observed) const;

   private:
    ModelSpec spec_;
    StatSupport support_;
};

/// Moments of the statistics under the weights count * exp(<eta, s>),
/// normalized over the support.
ExactMoments support_moments(const StatSupport& support, const EtaVector& eta);

double log_normalizer(const ModelSpec& spec, const ThetaVector& theta, ExactLimits limits = {});
ExactMoments exact_moments(const ModelSpec& spec, const ThetaVector& theta,
                           ExactLimits limits = {});

struct ExactFit {
    ThetaVector theta;
    double loglik = 0;
    int iterations = 0;
    double gradient_norm = 0;  // sup-norm of the curved score at theta
    Eigen::MatrixXd information;  // J' Cov J at theta
};

struct NewtonOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-8;
    double divergence_cap = 50;  // |theta|_inf beyond this means no MLE
};

/// Networks sharing one spec, entering the pooled likelihood through their
/// summed statistics.
struct ExactGroup {
    const ExactModel* model = nullptr;
    StatVector total;
    double count = 1;
};

/// Maximizes the pooled exact log-likelihood over groups that share theta.
ExactFit exact_mle(std::span<const ExactGroup> groups, const ThetaVector& theta0,
                   NewtonOptions opt = {});

/// Maximizes the exact (pooled) log-likelihood by Fisher scoring with
/// step halving. Every network must share the same spec.
ExactFit exact_mle(const ExactModel& model, std::span<const StatVector> observed,
                   const ThetaVector& theta0, NewtonOptions opt = {});
ExactFit exact_mle(const ModelSpec& spec, const Graph& y, ExactLimits limits = {},
                   NewtonOptions opt = {});

/// log Σ_{y compatible with y_obs on observed dyads} exp(<eta, s(y)>).
double log_completion_sum(const ModelSpec& spec, const ThetaVector& theta, const Graph& y_obs,
                          const ObservationMask& mask, ExactLimits limits = {});

/// Observed-data log-likelihood: the completion sum minus ψ.
double exact_incomplete_loglik(const ModelSpec& spec, const ThetaVector& theta,
                               const Graph& y_obs, const ObservationMask& mask,
                               ExactLimits limits = {});

}  // namespace ergm

#endif  // ERGM_EXACT_HPP
