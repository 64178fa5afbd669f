#ifndef ERGM_ESTIMATE_HPP
#define ERGM_ESTIMATE_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ergm/exact.hpp"
#include "ergm/model.hpp"
#include "ergm/sampler.hpp"

namespace ergm {

/// One observed network with the spec instantiated for its size and
/// attributes. Every network in a data set shares the same theta.
struct Network {
    Graph graph;
    ModelSpec spec;
};

struct NetworkData {
    std::vector<Network> networks;

    void validate() const;
    int param_dim() const { return networks.front().spec.param_dim(); }
    const std::vector<std::string>& param_names() const {
        return networks.front().spec.param_names();
    }
};

enum class Method { mple, mcmle, stochastic_approx, exact };
std::string to_string(Method m);

struct FitDiagnostics {
    int iterations = 0;
    double gradient_norm = 0;  // sup-norm of the (estimated) curved score at theta_hat
    double score_se = 0;       // largest Monte Carlo SE of that score (0 when exact)
    double ess = 0;            // smallest importance-weight ESS at the final step
    double acceptance_rate = 0;
    bool converged = false;
    std::vector<ThetaVector> history;
    std::vector<double> ess_history;
};

struct FitResult {
    ThetaVector theta_hat;
    Eigen::VectorXd std_errors;
    Eigen::MatrixXd covariance;
    Method method = Method::mcmle;
    std::vector<std::string> param_names;
    FitDiagnostics diagnostics;
    McmcConfig config;
    std::vector<std::string> notes;
};

struct McmleOptions {
    int max_iterations = 60;
    double ess_fraction = 0.1;           // partial stepping threshold, fraction of draws
    double improvement_tolerance = 1e-6;  // surrogate gain treated as "no progress"
    double score_sigmas = 3;
    double divergence_cap = 50;
    double max_step = 1;                  // sup-norm limit on each iteration's move
    bool standard_errors = true;
};

/// Robbins-Monro gains a_t = a0 * t0 / (t + t0) within each phase, with a0
/// shrinking by `a0_decay` from phase to phase. The last phase is averaged.
struct GainSchedule {
    int phases = 4;
    int phase_iterations = 400;
    double a0 = 0.5;
    double a0_decay = 0.5;
    double t0 = 20;
    int scaling_draws = 0;  // draws for the scaling matrix; 0 = 7 + 3p, at least 100
    double divergence_cap = 50;
};

/// Maximum pseudo-likelihood: logistic regression of each dyad on its change
/// statistics. Not likelihood-based for dyad-dependent models.
FitResult mple(const NetworkData& data);

/// Monte Carlo MLE by iterated importance sampling with partial stepping.
FitResult mcmle(const NetworkData& data, const ThetaVector& theta0, const McmcConfig& cfg,
                const McmleOptions& opt = {});

FitResult stochastic_approximation(const NetworkData& data, const ThetaVector& theta0,
                                   const McmcConfig& cfg, const GainSchedule& gains = {});

/// Pooled exact MLE; every network must fit the enumeration cap.
FitResult exact_fit(const NetworkData& data, ExactLimits limits = {});

struct StandardErrors {
    Eigen::VectorXd std_errors;
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd information;
};

/// Inverse curved Fisher information summed over networks, with exact
/// moments where the enumeration cap allows and simulation otherwise.
StandardErrors standard_errors(const NetworkData& data, const ThetaVector& theta_hat,
                               const McmcConfig& cfg, ExactLimits limits = {});

struct FitOptions {
    Method method = Method::mcmle;
    std::optional<ThetaVector> theta0;
    McmleOptions mcmle;
    GainSchedule gains;
    ExactLimits limits;
};

/// Dispatches to the chosen estimator; MC methods start from the MPLE, or
/// from zeros when the MPLE does not exist.
FitResult fit_pooled(const NetworkData& data, const McmcConfig& cfg, const FitOptions& opt = {});

/// Throws mle-nonexistent when a parameter acting only on non-negative
/// counts sees a pooled observed value of zero, or every dyad is an edge
/// under an edges parameter: the likelihood then increases without bound.
void check_mle_boundary(const NetworkData& data);

}  // namespace ergm

#endif  // ERGM_ESTIMATE_HPP
