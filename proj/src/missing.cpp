#include "ergm/missing.hpp"

#include <cmath>
#include <limits>
#include <variant>

#include "ergm/error.hpp"
#include "ergm/rng.hpp"
#include "numeric.hpp"
#include "optimize.hpp"
#include "pooling.hpp"

namespace ergm {

std::string to_string(Design d) {
    switch (d) {
        case Design::ego: return "ego";
        case Design::link_trace: return "trace";
        case Design::subgraph: return "subgraph";
        case Design::mar: return "mar";
    }
    return "unknown";
}

void DesignParams::validate(int units) const {
    require(!inclusion.empty(), "inclusion probabilities missing");
    require(inclusion.size() == 1 || static_cast<int>(inclusion.size()) == units,
            "need one inclusion probability or one per unit (" + std::to_string(units) + ")");
    for (double p : inclusion) require(p >= 0 && p <= 1, "inclusion probability outside [0, 1]");
    require(waves >= 0, "waves must be non-negative");
    require(q >= 0 && q <= 1, "masking probability outside [0, 1]");
}

double DesignParams::inclusion_of(int unit) const {
    return inclusion.size() == 1 ? inclusion.front() : inclusion[static_cast<std::size_t>(unit)];
}

ObservationMask ego_mask(int n, std::span<const int> egos) {
    ObservationMask m = ObservationMask::none(n);
    for (int i : egos) {
        require(i >= 0 && i < n, "ego outside the node set");
        for (int j = 0; j < n; ++j)
            if (j != i) m.set_observed(Dyad::of(i, j), true);
    }
    return m;
}

namespace {

std::vector<int> draw_units(int units, const DesignParams& p, std::uint64_t seed) {
    Rng rng = make_stream(seed, 0x65676f);
    std::vector<int> out;
    for (int u = 0; u < units; ++u)
        if (uniform01(rng) < p.inclusion_of(u)) out.push_back(u);
    return out;
}

}  // namespace

ObservationMask ego_sample(const Graph& g, const DesignParams& p, std::uint64_t seed) {
    p.validate(g.node_count());
    return ego_mask(g.node_count(), draw_units(g.node_count(), p, seed));
}

ObservationMask link_trace(const Graph& g, const DesignParams& p, std::uint64_t seed) {
    p.validate(g.node_count());
    const int n = g.node_count();
    std::vector<int> wave = draw_units(n, p, seed);
    std::vector<char> ego(static_cast<std::size_t>(n), 0);
    std::vector<int> all = wave;
    for (int i : wave) ego[static_cast<std::size_t>(i)] = 1;
    for (int w = 0; w < p.waves && !wave.empty(); ++w) {
        std::vector<int> next;
        for (int i : wave)
            for (int j : g.neighbors(i))
                if (!ego[static_cast<std::size_t>(j)]) {
                    ego[static_cast<std::size_t>(j)] = 1;
                    next.push_back(j);
                }
        all.insert(all.end(), next.begin(), next.end());
        wave = std::move(next);
    }
    return ego_mask(n, all);
}

ObservationMask subgraph_sample(const BlockStructure& blocks, const DesignParams& p,
                                std::uint64_t seed) {
    p.validate(blocks.block_count);
    const std::vector<int> chosen = draw_units(blocks.block_count, p, seed);
    const int n = blocks.node_count();
    ObservationMask m = ObservationMask::none(n);
    for (int b : chosen) {
        const auto members = blocks.members(b);
        for (std::size_t x = 0; x < members.size(); ++x)
            for (std::size_t y = x + 1; y < members.size(); ++y)
                m.set_observed(Dyad::of(members[x], members[y]), true);
    }
    return m;
}

ObservationMask mar_mask(int n, double q, std::uint64_t seed) {
    require(q >= 0 && q <= 1, "masking probability outside [0, 1]");
    Rng rng = make_stream(seed, 0x6d6172);
    ObservationMask m = ObservationMask::full(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (uniform01(rng) < q) m.set_observed({i, j}, false);
    return m;
}

void IncompleteData::validate() const {
    data.validate();
    require(masks.size() == data.networks.size(), "need one mask per network");
    for (std::size_t k = 0; k < masks.size(); ++k)
        require(masks[k].node_count() == data.networks[k].graph.node_count(),
                "mask/graph size mismatch");
    if (!ignorable)
        fail(ErrorCode::non_ignorable_design,
             "the observation design is not ignorable; the face-value likelihood does not apply");
    bool any = false;
    for (const auto& m : masks) any = any || m.observed_count() > 0;
    require(any, "all-missing data: no dyad is observed in any network");
}

namespace {

struct ExactParts {
    std::vector<detail::Group> groups;
    std::vector<ExactModel> models;
    std::vector<StatSupport> completions;  // one per network
};

ExactParts exact_parts(const IncompleteData& d, ExactLimits limits) {
    ExactParts parts;
    parts.groups = detail::group_networks(d.data);
    parts.models.reserve(parts.groups.size());
    for (const auto& g : parts.groups) parts.models.emplace_back(*g.spec, limits);
    for (std::size_t k = 0; k < d.masks.size(); ++k) {
        const auto missing = d.masks[k].unobserved_dyads();
        require(static_cast<int>(missing.size()) <= limits.max_free_dyads,
                std::to_string(missing.size()) + " unobserved dyads exceed the exact cap of " +
                    std::to_string(limits.max_free_dyads),
                ErrorCode::cap_exceeded);
        parts.completions.push_back(
            enumerate_support(d.data.networks[k].spec, d.data.networks[k].graph, missing));
    }
    return parts;
}

bool exact_feasible(const IncompleteData& d, ExactLimits limits) {
    for (std::size_t k = 0; k < d.masks.size(); ++k)
        if (d.data.networks[k].spec.node_count() > limits.max_nodes ||
            d.masks[k].unobserved_count() > limits.max_free_dyads)
            return false;
    return true;
}

double parts_loglik(const IncompleteData& d, const ExactParts& parts, const ThetaVector& theta) {
    double v = 0;
    for (std::size_t k = 0; k < parts.completions.size(); ++k)
        v += parts.completions[k].log_sum(eta(d.data.networks[k].spec, theta));
    for (std::size_t g = 0; g < parts.groups.size(); ++g)
        v -= parts.groups[g].count() * parts.models[g].log_normalizer(theta);
    return v;
}

FitResult exact_incomplete_fit(const IncompleteData& d, const ThetaVector& theta0,
                               const IncompleteOptions& opt) {
    const ExactParts parts = exact_parts(d, opt.limits);
    const int p = d.data.param_dim();
    detail::NewtonProblem pr;
    pr.value = [&](const Eigen::VectorXd& t) { return parts_loglik(d, parts, t); };
    pr.local = [&](const Eigen::VectorXd& t, Eigen::VectorXd& grad, Eigen::MatrixXd& info) {
        grad = Eigen::VectorXd::Zero(p);
        info = Eigen::MatrixXd::Zero(p, p);
        for (std::size_t k = 0; k < parts.completions.size(); ++k) {
            const ModelSpec& spec = d.data.networks[k].spec;
            const ExactMoments m = support_moments(parts.completions[k], eta(spec, t));
            grad += spec.jacobian(t).transpose() * m.mean;
        }
        for (std::size_t g = 0; g < parts.groups.size(); ++g) {
            const ExactMoments m = parts.models[g].moments(t);
            const Eigen::MatrixXd J = parts.groups[g].spec->jacobian(t);
            grad -= parts.groups[g].count() * J.transpose() * m.mean;
            info += parts.groups[g].count() * J.transpose() * m.covariance * J;
        }
    };
    pr.observed_hessian = true;
    detail::NewtonSettings ns;
    ns.divergence_cap = opt.mcmle.divergence_cap;
    const auto r = detail::newton_maximize(pr, theta0, ns);
    if (r.diverged)
        fail(ErrorCode::mle_nonexistent,
             "observed-data likelihood increases without bound (|theta|_inf > " +
                 std::to_string(ns.divergence_cap) + ")");
    if (r.gradient_norm >= 1e-5 && r.decrement >= 1e-7)
        fail(ErrorCode::non_convergence,
             "observed-data Newton iteration stalled with score norm " +
                 std::to_string(r.gradient_norm));

    FitResult res;
    res.method = Method::exact;
    res.theta_hat = r.theta;
    res.param_names = d.data.param_names();
    res.diagnostics.iterations = r.iterations;
    res.diagnostics.gradient_norm = r.gradient_norm;
    res.diagnostics.converged = true;
    const Eigen::MatrixXd info = detail::fd_negative_hessian(pr, r.theta);
    if (detail::condition_ratio(info) < 1e-12)
        fail(ErrorCode::singular_information,
             "observed information is singular at the estimate: model is not identifiable");
    res.covariance = info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    res.covariance = 0.5 * (res.covariance + res.covariance.transpose());
    res.std_errors = res.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    return res;
}

std::uint64_t stream_of(int iteration, std::size_t unit, bool conditional) {
    return (static_cast<std::uint64_t>(iteration) << 32) | (conditional ? 1ULL << 31 : 0) | unit;
}

FitResult mc_incomplete_fit(const IncompleteData& d, const ThetaVector& theta0,
                            const McmcConfig& cfg, const IncompleteOptions& opt) {
    const auto groups = detail::group_networks(d.data);
    const std::size_t G = groups.size();
    const std::size_t K = d.data.networks.size();
    const int p = d.data.param_dim();
    McmcConfig ccfg = cfg;
    if (opt.conditional_draws > 0) ccfg.draws = opt.conditional_draws;
    const double N = static_cast<double>(cfg.draws);
    const double M = static_cast<double>(ccfg.draws);

    // Networks with missing dyads get a conditional chain; the rest enter
    // through their fixed statistics.
    std::vector<std::size_t> partial;
    std::vector<StatVector> observed_stats(K);
    for (std::size_t k = 0; k < K; ++k) {
        if (d.masks[k].is_full())
            observed_stats[k] = d.data.networks[k].spec.stats(d.data.networks[k].graph);
        else
            partial.push_back(k);
    }

    std::vector<Graph> ustate(G), cstate(K);
    for (std::size_t g = 0; g < G; ++g)
        ustate[g] = d.data.networks[static_cast<std::size_t>(groups[g].members.front())].graph;
    for (std::size_t k = 0; k < K; ++k) cstate[k] = d.data.networks[k].graph;
    std::vector<StatRun> usims(G), csims(K);

    FitResult res;
    res.method = Method::mcmle;
    res.param_names = d.data.param_names();
    res.config = cfg;
    res.notes.push_back("incomplete data: face-value likelihood under an ignorable design");
    ThetaVector theta = theta0, theta_hat = theta0;

    auto deta = [&](const ModelSpec& spec, const Eigen::VectorXd& t, const ThetaVector& at) {
        return Eigen::VectorXd(eta(spec, t) - eta(spec, at));
    };

    detail::NewtonProblem pr;
    for (int it = 0; it < opt.mcmle.max_iterations; ++it) {
        const std::size_t jobs = G + partial.size();
        parallel_for(jobs, cfg.threads, [&](std::size_t job) {
            if (job < G) {
                usims[job] = mh_sample_stats(*groups[job].spec, theta, cfg, ustate[job],
                                             stream_of(it, job, false));
            } else {
                const std::size_t k = partial[job - G];
                csims[k] = conditional_sample_stats(d.data.networks[k].spec, theta, cstate[k],
                                                    d.masks[k], ccfg, stream_of(it, k, true));
            }
        });
        for (std::size_t g = 0; g < G; ++g) ustate[g] = usims[g].last;
        for (std::size_t k : partial) cstate[k] = csims[k].last;

        // Score at theta with its Monte Carlo error.
        Eigen::VectorXd score = Eigen::VectorXd::Zero(p);
        Eigen::MatrixXd var = Eigen::MatrixXd::Zero(p, p);
        double chain_ess = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < G; ++g) {
            const Eigen::MatrixXd J = groups[g].spec->jacobian(theta);
            score -= groups[g].count() * J.transpose() * usims[g].stats.colwise().mean().transpose();
            var += groups[g].count() * groups[g].count() * J.transpose() *
                   batch_means_covariance(usims[g].stats) * J;
        }
        for (std::size_t k = 0; k < K; ++k) {
            const ModelSpec& spec = d.data.networks[k].spec;
            const Eigen::MatrixXd J = spec.jacobian(theta);
            if (d.masks[k].is_full()) {
                score += J.transpose() * observed_stats[k];
                continue;
            }
            score += J.transpose() * csims[k].stats.colwise().mean().transpose();
            const Eigen::MatrixXd bm = batch_means_covariance(csims[k].stats);
            var += J.transpose() * bm * J;
            // Autocorrelation-adjusted chain size on the leading coordinate.
            const Eigen::MatrixXd c = csims[k].stats.rowwise() - csims[k].stats.colwise().mean();
            const double v0 = c.col(0).squaredNorm() / std::max(1.0, M - 1);
            if (bm(0, 0) > 0) chain_ess = std::min(chain_ess, v0 / bm(0, 0));
        }
        const Eigen::VectorXd se = var.diagonal().cwiseMax(0.0).cwiseSqrt();
        bool score_ok = true;
        for (int a = 0; a < p; ++a)
            score_ok = score_ok && std::abs(score(a)) <= opt.mcmle.score_sigmas * se(a);

        pr.value = [&, theta](const Eigen::VectorXd& t) {
            double v = 0;
            for (std::size_t g = 0; g < G; ++g)
                v -= groups[g].count() *
                     (detail::log_sum_exp(usims[g].stats * deta(*groups[g].spec, t, theta)) -
                      std::log(N));
            for (std::size_t k = 0; k < K; ++k) {
                const Eigen::VectorXd de = deta(d.data.networks[k].spec, t, theta);
                v += d.masks[k].is_full()
                         ? de.dot(observed_stats[k])
                         : detail::log_sum_exp(csims[k].stats * de) - std::log(M);
            }
            return v;
        };
        pr.local = [&, theta](const Eigen::VectorXd& t, Eigen::VectorXd& grad,
                              Eigen::MatrixXd& info) {
            grad = Eigen::VectorXd::Zero(p);
            info = Eigen::MatrixXd::Zero(p, p);
            Eigen::VectorXd mean;
            Eigen::MatrixXd cov;
            for (std::size_t g = 0; g < G; ++g) {
                const Eigen::MatrixXd J = groups[g].spec->jacobian(t);
                detail::weighted_moments(
                    usims[g].stats,
                    detail::softmax(usims[g].stats * deta(*groups[g].spec, t, theta)), mean, cov);
                grad -= groups[g].count() * J.transpose() * mean;
                info += groups[g].count() * J.transpose() * cov * J;
            }
            for (std::size_t k = 0; k < K; ++k) {
                const ModelSpec& spec = d.data.networks[k].spec;
                const Eigen::MatrixXd J = spec.jacobian(t);
                if (d.masks[k].is_full()) {
                    grad += J.transpose() * observed_stats[k];
                    continue;
                }
                detail::weighted_moments(csims[k].stats,
                                         detail::softmax(csims[k].stats * deta(spec, t, theta)),
                                         mean, cov);
                grad += J.transpose() * mean;
            }
        };
        pr.feasible = [&, theta](const Eigen::VectorXd& t) {
            const double floor_u = opt.mcmle.ess_fraction * N;
            const double floor_c = opt.mcmle.ess_fraction * M;
            if ((t - theta).cwiseAbs().maxCoeff() > opt.mcmle.max_step) return false;
            for (std::size_t g = 0; g < G; ++g)
                if (detail::kish_ess(detail::softmax(
                        usims[g].stats * deta(*groups[g].spec, t, theta))) < floor_u)
                    return false;
            for (std::size_t k : partial)
                if (detail::kish_ess(detail::softmax(
                        csims[k].stats * deta(d.data.networks[k].spec, t, theta))) < floor_c)
                    return false;
            return true;
        };
        pr.observed_hessian = false;
        detail::NewtonSettings ns;
        ns.max_iterations = 100;
        ns.gradient_tolerance = 1e-9;
        ns.step_tolerance = 1e-7;
        ns.divergence_cap = opt.mcmle.divergence_cap;
        // Unconditional draws with no spread in some direction leave the
        // surrogate flat there; step along the score instead.
        Eigen::MatrixXd info0 = Eigen::MatrixXd::Zero(p, p);
        for (std::size_t g = 0; g < G; ++g) {
            Eigen::VectorXd mean;
            Eigen::MatrixXd cov;
            detail::weighted_moments(usims[g].stats,
                                     Eigen::VectorXd::Constant(usims[g].stats.rows(), 1 / N), mean,
                                     cov);
            const Eigen::MatrixXd J = groups[g].spec->jacobian(theta);
            info0 += groups[g].count() * J.transpose() * cov * J;
        }
        detail::NewtonResult r;
        if (detail::condition_ratio(info0) < 1e-10) {
            r.theta = theta;
            const double m = score.cwiseAbs().maxCoeff();
            if (m > 0) r.theta += opt.mcmle.max_step * score / m;
            r.value = pr.value(r.theta);
            r.constrained = m > 0;
        } else {
            r = detail::newton_maximize(pr, theta, ns);
        }
        if (r.diverged || r.theta.cwiseAbs().maxCoeff() > opt.mcmle.divergence_cap)
            fail(ErrorCode::mle_nonexistent,
                 "observed-data estimates diverge (|theta|_inf > " +
                     std::to_string(opt.mcmle.divergence_cap) + ")");
        if (r.constrained && (r.theta - theta).cwiseAbs().maxCoeff() < 1e-10 && !score_ok)
            fail(ErrorCode::ess_degenerate,
                 "importance weights collapse for every step away from the current estimate");

        res.diagnostics.iterations = it + 1;
        res.diagnostics.gradient_norm = score.cwiseAbs().maxCoeff();
        res.diagnostics.score_se = se.maxCoeff();
        res.diagnostics.ess = std::isfinite(chain_ess) ? chain_ess : M;
        res.diagnostics.history.push_back(r.theta);
        res.diagnostics.ess_history.push_back(res.diagnostics.ess);
        theta_hat = r.theta;
        if (score_ok || (r.value < opt.mcmle.improvement_tolerance && !r.constrained)) {
            res.diagnostics.converged = true;
            break;
        }
        theta = r.theta;
    }
    res.theta_hat = theta_hat;
    if (!res.diagnostics.converged)
        res.notes.push_back("no convergence after " + std::to_string(opt.mcmle.max_iterations) +
                            " iterations");

    if (opt.mcmle.standard_errors) {
        // Observed information: negative Hessian of the surrogate at theta_hat.
        const Eigen::MatrixXd info = detail::fd_negative_hessian(pr, theta_hat);
        if (!info.allFinite() || detail::condition_ratio(info) < 1e-12)
            fail(ErrorCode::singular_information,
                 "observed information is singular at the estimate");
        res.covariance = info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
        res.covariance = 0.5 * (res.covariance + res.covariance.transpose());
        res.std_errors = res.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    }
    return res;
}

/// A parameter that moves only edge counts has no finite maximizer when the
/// observed dyads are all edges or all non-edges: the completion sum and the
/// normalizer are then dominated by the same extreme graph.
void check_incomplete_boundary(const IncompleteData& d, const ThetaVector& at) {
    const int p = d.data.param_dim();
    std::int64_t observed = 0, ones = 0;
    for (std::size_t k = 0; k < d.masks.size(); ++k) {
        const Graph& g = d.data.networks[k].graph;
        const ObservationMask& m = d.masks[k];
        for (int i = 0; i < g.node_count(); ++i)
            for (int j = i + 1; j < g.node_count(); ++j)
                if (m.observed(i, j)) {
                    ++observed;
                    ones += g.has_edge(i, j);
                }
    }
    if (observed == 0 || (ones > 0 && ones < observed)) return;
    for (int a = 0; a < p; ++a) {
        bool touched = false, edges_only = true;
        for (const auto& net : d.data.networks) {
            const Eigen::MatrixXd J = net.spec.jacobian(at);
            const auto& terms = net.spec.terms().terms();
            for (Eigen::Index c = 0; c < J.rows(); ++c) {
                if (J(c, a) == 0) continue;
                touched = true;
                if (!std::holds_alternative<term::Edges>(terms[static_cast<std::size_t>(c)]))
                    edges_only = false;
            }
        }
        if (touched && edges_only)
            fail(ErrorCode::mle_nonexistent,
                 std::string("every observed dyad is ") + (ones ? "an edge" : "empty") +
                     ": the likelihood is monotone in '" + d.data.param_names()[static_cast<std::size_t>(a)] +
                     "'");
    }
}

}  // namespace

double incomplete_loglik(const IncompleteData& d, const ThetaVector& theta, ExactLimits limits) {
    d.validate();
    for (const auto& net : d.data.networks)
        require(net.spec.node_count() <= limits.max_nodes,
                "exact enumeration capped at n = " + std::to_string(limits.max_nodes),
                ErrorCode::cap_exceeded);
    d.data.networks.front().spec.check_theta(theta);
    return parts_loglik(d, exact_parts(d, limits), theta);
}

FitResult incomplete_fit(const IncompleteData& d, const ThetaVector& theta0, const McmcConfig& cfg,
                         const IncompleteOptions& opt) {
    d.validate();
    cfg.validate();
    d.data.networks.front().spec.check_theta(theta0);
    bool all_full = true;
    for (const auto& m : d.masks) all_full = all_full && m.is_full();
    if (all_full) return mcmle(d.data, theta0, cfg, opt.mcmle);
    check_incomplete_boundary(d, theta0);
    if (exact_feasible(d, opt.limits)) return exact_incomplete_fit(d, theta0, opt);
    return mc_incomplete_fit(d, theta0, cfg, opt);
}

}  // namespace ergm
