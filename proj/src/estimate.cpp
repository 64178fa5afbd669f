#include "ergm/estimate.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "ergm/error.hpp"
#include "numeric.hpp"
#include "optimize.hpp"
#include "pooling.hpp"

namespace ergm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct RowHash {
    std::size_t operator()(const std::vector<double>& v) const noexcept {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (double x : v) {
            std::uint64_t bits;
            std::memcpy(&bits, &x, sizeof bits);
            h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

/// Change-statistic design for one spec, with identical (row, response)
/// pairs merged into weights.
struct Design {
    const ModelSpec* spec = nullptr;
    Eigen::MatrixXd X;
    Eigen::VectorXd y, w;
};

std::vector<Design> mple_design(const NetworkData& data, const std::vector<detail::Group>& groups) {
    std::vector<Design> out;
    ChangeBuffer buf;
    for (const auto& g : groups) {
        const int q = g.spec->natural_dim();
        std::unordered_map<std::vector<double>, double, RowHash> rows;
        std::vector<double> key(static_cast<std::size_t>(q) + 1);
        for (int k : g.members) {
            const Graph& y = data.networks[static_cast<std::size_t>(k)].graph;
            const int n = y.node_count();
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    std::fill(key.begin(), key.end(), 0.0);
                    g.spec->terms().change(y, {i, j}, buf);
                    for (const auto& [c, d] : buf.entries()) key[static_cast<std::size_t>(c)] += d;
                    for (auto& v : key) v += 0.0;  // fold -0 into +0
                    key.back() = y.has_edge(i, j) ? 1.0 : 0.0;
                    rows[key] += 1.0;
                }
        }
        Design d;
        d.spec = g.spec;
        d.X.resize(static_cast<Eigen::Index>(rows.size()), q);
        d.y.resize(static_cast<Eigen::Index>(rows.size()));
        d.w.resize(static_cast<Eigen::Index>(rows.size()));
        Eigen::Index r = 0;
        for (const auto& [k, c] : rows) {
            for (int a = 0; a < q; ++a) d.X(r, a) = k[static_cast<std::size_t>(a)];
            d.y(r) = k.back();
            d.w(r) = c;
            ++r;
        }
        out.push_back(std::move(d));
    }
    return out;
}

struct MpleSolution {
    ThetaVector theta;
    Eigen::MatrixXd information;
    int iterations = 0;
    double gradient_norm = 0;
};

MpleSolution solve_mple(const NetworkData& data, const std::vector<detail::Group>& groups) {
    const auto designs = mple_design(data, groups);
    const int p = data.param_dim();
    bool curved = false;
    for (const auto& g : groups) curved = curved || g.spec->is_curved();

    detail::NewtonProblem pr;
    pr.value = [&](const Eigen::VectorXd& t) {
        double v = 0;
        for (const auto& d : designs) {
            const Eigen::VectorXd lo = d.X * eta(*d.spec, t);
            for (Eigen::Index r = 0; r < lo.size(); ++r)
                v += d.w(r) * (d.y(r) * lo(r) - softplus(lo(r)));
        }
        return v;
    };
    pr.local = [&](const Eigen::VectorXd& t, Eigen::VectorXd& grad, Eigen::MatrixXd& info) {
        grad = Eigen::VectorXd::Zero(p);
        info = Eigen::MatrixXd::Zero(p, p);
        for (const auto& d : designs) {
            const Eigen::MatrixXd J = d.spec->jacobian(t);
            const Eigen::MatrixXd XJ = d.X * J;
            const Eigen::VectorXd lo = d.X * eta(*d.spec, t);
            const Eigen::VectorXd prob = (1.0 + (-lo.array()).exp()).inverse().matrix();
            grad += XJ.transpose() * (d.w.array() * (d.y - prob).array()).matrix();
            const Eigen::VectorXd v = d.w.array() * prob.array() * (1 - prob.array());
            info += XJ.transpose() * v.asDiagonal() * XJ;
        }
    };
    pr.observed_hessian = curved;
    detail::NewtonSettings ns;
    const auto r = detail::newton_maximize(pr, ThetaVector::Zero(p), ns);
    bool saturated = false;
    if (detail::condition_ratio(r.information) < 1e-12) {
        for (const auto& d : designs) {
            const Eigen::VectorXd lo = d.X * eta(*d.spec, r.theta);
            saturated = saturated || lo.cwiseAbs().maxCoeff() > 30;
        }
    }
    if (r.diverged || saturated)
        fail(ErrorCode::mple_separation,
             "pseudo-likelihood estimates diverge: change statistics separate edges from "
             "non-edges");
    if (r.gradient_norm >= 1e-5 && r.decrement >= 1e-7)
        fail(ErrorCode::non_convergence,
             "pseudo-likelihood Newton iteration stalled with score norm " +
                 std::to_string(r.gradient_norm));
    return {r.theta, r.information, r.iterations, r.gradient_norm};
}

StandardErrors invert_information(const Eigen::MatrixXd& info) {
    require(info.allFinite(), "information matrix is not finite", ErrorCode::singular_information);
    if (detail::condition_ratio(info) < 1e-12)
        fail(ErrorCode::singular_information,
             "Fisher information is singular at the estimate: model is not identifiable");
    StandardErrors se;
    se.information = info;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    se.covariance = ldlt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols()));
    se.covariance = 0.5 * (se.covariance + se.covariance.transpose());
    se.std_errors = se.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    return se;
}

std::uint64_t stream_id(int iteration, std::size_t group) {
    return (static_cast<std::uint64_t>(iteration) << 24) | group;
}

ThetaVector check_theta0(const NetworkData& data, const ThetaVector& theta0) {
    data.networks.front().spec.check_theta(theta0);
    require(theta0.allFinite(), "starting value must be finite");
    return theta0;
}

}  // namespace

void NetworkData::validate() const {
    require(!networks.empty(), "need at least one network");
    const int p = networks.front().spec.param_dim();
    for (const auto& net : networks) {
        require(net.spec.param_dim() == p, "networks must share one parameter vector");
        require(net.graph.node_count() == net.spec.node_count(),
                "graph size does not match its model");
    }
}

std::string to_string(Method m) {
    switch (m) {
        case Method::mple: return "mple";
        case Method::mcmle: return "mcmle";
        case Method::stochastic_approx: return "stochastic-approx";
        case Method::exact: return "exact";
    }
    return "unknown";
}

void check_mle_boundary(const NetworkData& data) {
    data.validate();
    const int p = data.param_dim();
    for (int j = 0; j < p; ++j) {
        bool counts_only = true;
        bool edges_only = true;
        bool touched = false;
        double observed = 0;
        double edges = 0, dyads = 0;
        for (const auto& net : data.networks) {
            const ModelSpec& spec = net.spec;
            const StatVector s = spec.stats(net.graph);
            const auto& terms = spec.terms().terms();
            auto take = [&](int coord) {
                touched = true;
                const TermKind& t = terms[static_cast<std::size_t>(coord)];
                if (!is_count(t)) counts_only = false;
                if (!std::holds_alternative<term::Edges>(t)) edges_only = false;
                observed += s(coord);
            };
            for (const auto& e : spec.entries()) {
                std::visit(overloaded{
                               [&](const map::Linear& x) {
                                   if (x.theta == j) take(x.coord);
                               },
                               [&](const map::Gwesp& x) {
                                   if (x.base == j)
                                       for (int m = 0; m < x.count; ++m) take(x.first_coord + m);
                                   if (x.shift1 == j && x.count >= 1) take(x.first_coord);
                                   if (x.shift2 == j && x.count >= 2) take(x.first_coord + 1);
                                   if (x.decay == j) counts_only = edges_only = false;
                               },
                               [](const map::FixedOffset&) {},
                           },
                           e);
            }
            for (int c = 0; c < spec.natural_dim(); ++c)
                if (std::holds_alternative<term::Edges>(terms[static_cast<std::size_t>(c)])) {
                    edges += s(c);
                    dyads += static_cast<double>(dyad_count(spec.node_count()));
                }
        }
        const std::string& name = data.param_names()[static_cast<std::size_t>(j)];
        if (touched && counts_only && observed == 0)
            fail(ErrorCode::mle_nonexistent,
                 "statistics of parameter '" + name +
                     "' are zero in every network: the likelihood keeps increasing as it "
                     "decreases");
        if (touched && edges_only && observed == dyads && dyads > 0 && edges == dyads)
            fail(ErrorCode::mle_nonexistent,
                 "every dyad is an edge: the likelihood keeps increasing with '" + name + "'");
    }
}

FitResult mple(const NetworkData& data) {
    data.validate();
    const auto groups = detail::group_networks(data);
    const MpleSolution sol = solve_mple(data, groups);
    FitResult res;
    res.method = Method::mple;
    res.theta_hat = sol.theta;
    res.param_names = data.param_names();
    res.diagnostics.iterations = sol.iterations;
    res.diagnostics.gradient_norm = sol.gradient_norm;
    res.diagnostics.converged = true;
    res.notes.push_back("not likelihood-based: pseudo-likelihood standard errors are unreliable "
                        "for dyad-dependent models");
    try {
        const StandardErrors se = invert_information(sol.information);
        res.std_errors = se.std_errors;
        res.covariance = se.covariance;
    } catch (const Error&) {
        const auto p = static_cast<Eigen::Index>(res.param_names.size());
        res.std_errors = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
        res.covariance = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
        res.notes.push_back("pseudo-information is singular");
    }
    return res;
}

namespace {

/// Curved information sum_g K_g J' Cov_g J where Cov_g comes from `cov`.
template <class CovFn>
Eigen::MatrixXd pooled_information(const std::vector<detail::Group>& groups,
                                   const ThetaVector& theta, CovFn&& cov) {
    const auto p = theta.size();
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const Eigen::MatrixXd J = groups[g].spec->jacobian(theta);
        info += groups[g].count() * J.transpose() * cov(g) * J;
    }
    return info;
}

}  // namespace

FitResult mcmle(const NetworkData& data, const ThetaVector& theta0, const McmcConfig& cfg,
                const McmleOptions& opt) {
    data.validate();
    cfg.validate();
    check_mle_boundary(data);
    ThetaVector theta = check_theta0(data, theta0);
    const auto groups = detail::group_networks(data);
    const std::size_t G = groups.size();
    const int p = data.param_dim();
    const double N = static_cast<double>(cfg.draws);

    FitResult res;
    res.method = Method::mcmle;
    res.param_names = data.param_names();
    res.config = cfg;

    std::vector<Graph> state(G);
    for (std::size_t g = 0; g < G; ++g)
        state[g] = data.networks[static_cast<std::size_t>(groups[g].members.front())].graph;
    std::vector<StatRun> sims(G);
    ThetaVector theta_hat = theta;

    for (int it = 0; it < opt.max_iterations; ++it) {
        parallel_for(G, cfg.threads, [&](std::size_t g) {
            sims[g] = mh_sample_stats(*groups[g].spec, theta, cfg, state[g], stream_id(it, g));
        });
        double acc = 0;
        for (std::size_t g = 0; g < G; ++g) {
            state[g] = sims[g].last;
            acc += sims[g].acceptance_rate / static_cast<double>(G);
        }

        // Score at theta and its Monte Carlo standard error.
        Eigen::VectorXd score = Eigen::VectorXd::Zero(p);
        Eigen::MatrixXd score_var = Eigen::MatrixXd::Zero(p, p);
        std::vector<Eigen::VectorXd> eta0(G);
        for (std::size_t g = 0; g < G; ++g) {
            const auto& grp = groups[g];
            const Eigen::MatrixXd J = grp.spec->jacobian(theta);
            const Eigen::VectorXd mean = sims[g].stats.colwise().mean().transpose();
            score += J.transpose() * (grp.total - grp.count() * mean);
            score_var += grp.count() * grp.count() * J.transpose() *
                         batch_means_covariance(sims[g].stats) * J;
            eta0[g] = eta(*grp.spec, theta);
        }
        const Eigen::VectorXd score_se = score_var.diagonal().cwiseMax(0.0).cwiseSqrt();
        bool score_ok = true;
        for (int a = 0; a < p; ++a)
            score_ok = score_ok && std::abs(score(a)) <= opt.score_sigmas * score_se(a);

        // Importance-sampling surrogate for l(t) - l(theta).
        auto weights = [&](std::size_t g, const Eigen::VectorXd& t) {
            const Eigen::VectorXd d = eta(*groups[g].spec, t) - eta0[g];
            return detail::softmax(sims[g].stats * d);
        };
        detail::NewtonProblem pr;
        pr.value = [&](const Eigen::VectorXd& t) {
            double v = 0;
            for (std::size_t g = 0; g < G; ++g) {
                const Eigen::VectorXd d = eta(*groups[g].spec, t) - eta0[g];
                v += d.dot(groups[g].total) -
                     groups[g].count() * (detail::log_sum_exp(sims[g].stats * d) - std::log(N));
            }
            return v;
        };
        pr.local = [&](const Eigen::VectorXd& t, Eigen::VectorXd& grad, Eigen::MatrixXd& info) {
            grad = Eigen::VectorXd::Zero(p);
            info = Eigen::MatrixXd::Zero(p, p);
            for (std::size_t g = 0; g < G; ++g) {
                Eigen::VectorXd mean;
                Eigen::MatrixXd cov;
                detail::weighted_moments(sims[g].stats, weights(g, t), mean, cov);
                const Eigen::MatrixXd J = groups[g].spec->jacobian(t);
                grad += J.transpose() * (groups[g].total - groups[g].count() * mean);
                info += groups[g].count() * J.transpose() * cov * J;
            }
        };
        pr.feasible = [&](const Eigen::VectorXd& t) {
            if ((t - theta).cwiseAbs().maxCoeff() > opt.max_step) return false;
            for (std::size_t g = 0; g < G; ++g)
                if (detail::kish_ess(weights(g, t)) < opt.ess_fraction * N) return false;
            return true;
        };
        pr.observed_hessian = false;
        detail::NewtonSettings ns;
        ns.max_iterations = 100;
        ns.gradient_tolerance = 1e-9;
        ns.step_tolerance = 1e-7;
        ns.divergence_cap = opt.divergence_cap;

        detail::NewtonResult r;
        const Eigen::MatrixXd info0 = pooled_information(groups, theta, [&](std::size_t g) {
            Eigen::VectorXd mean;
            Eigen::MatrixXd cov;
            detail::weighted_moments(sims[g].stats, Eigen::VectorXd::Constant(sims[g].stats.rows(), 1 / N),
                                     mean, cov);
            return cov;
        });
        if (detail::condition_ratio(info0) < 1e-10) {
            // The draws do not vary in some direction (e.g. the chain is stuck at
            // the full graph), so the surrogate is flat there. Move along the score.
            r.theta = theta;
            const double m = score.cwiseAbs().maxCoeff();
            if (m > 0) r.theta += opt.max_step * score / m;
            r.value = pr.value(r.theta);
            r.constrained = m > 0;
        } else {
            r = detail::newton_maximize(pr, theta, ns);
        }
        if (r.diverged || r.theta.cwiseAbs().maxCoeff() > opt.divergence_cap)
            fail(ErrorCode::mle_nonexistent,
                 "parameter estimates diverge (|theta|_inf > " + std::to_string(opt.divergence_cap) +
                     "): observed statistics appear to lie on the boundary of the convex hull");

        double ess = N;
        for (std::size_t g = 0; g < G; ++g)
            ess = std::min(ess, detail::kish_ess(weights(g, r.theta)));

        res.diagnostics.iterations = it + 1;
        res.diagnostics.gradient_norm = score.cwiseAbs().maxCoeff();
        res.diagnostics.score_se = score_se.maxCoeff();
        res.diagnostics.ess = ess;
        res.diagnostics.acceptance_rate = acc;
        res.diagnostics.history.push_back(r.theta);
        res.diagnostics.ess_history.push_back(ess);

        theta_hat = r.theta;
        if (score_ok || (r.value < opt.improvement_tolerance && !r.constrained)) {
            res.diagnostics.converged = true;
            break;
        }
        theta = r.theta;
    }
    res.theta_hat = theta_hat;
    if (!res.diagnostics.converged)
        res.notes.push_back("no convergence after " + std::to_string(opt.max_iterations) +
                            " iterations");
    for (const auto& w : data.networks.front().spec.warnings(theta_hat)) res.notes.push_back(w);

    if (opt.standard_errors) {
        // Draws from the last iteration, reweighted to theta_hat.
        std::vector<Eigen::MatrixXd> covs(G);
        for (std::size_t g = 0; g < G; ++g) {
            const Eigen::VectorXd d = eta(*groups[g].spec, theta_hat) - eta(*groups[g].spec, theta);
            Eigen::VectorXd mean;
            detail::weighted_moments(sims[g].stats, detail::softmax(sims[g].stats * d), mean,
                                     covs[g]);
        }
        const auto se = invert_information(
            pooled_information(groups, theta_hat, [&](std::size_t g) { return covs[g]; }));
        res.std_errors = se.std_errors;
        res.covariance = se.covariance;
    }
    return res;
}

FitResult stochastic_approximation(const NetworkData& data, const ThetaVector& theta0,
                                   const McmcConfig& cfg, const GainSchedule& gains) {
    data.validate();
    cfg.validate();
    require(gains.phases >= 1 && gains.phase_iterations >= 1, "gain schedule needs iterations");
    require(gains.a0 > 0 && gains.t0 > 0 && gains.a0_decay > 0 && gains.a0_decay <= 1,
            "gains must be positive and non-increasing");
    check_mle_boundary(data);
    ThetaVector theta = check_theta0(data, theta0);
    const auto groups = detail::group_networks(data);
    const std::size_t G = groups.size();
    const int p = data.param_dim();

    std::vector<Chain> chains;
    chains.reserve(G);
    for (std::size_t g = 0; g < G; ++g) {
        const Graph& start = data.networks[static_cast<std::size_t>(groups[g].members.front())].graph;
        chains.emplace_back(*groups[g].spec, theta, start, make_stream(cfg.seed, g),
                            cfg.proposal, cfg.p_tie);
        chains.back().run(cfg.burnin_for(chains.back().free_count()));
    }
    auto advance = [&](std::size_t g) {
        chains[g].run(cfg.interval_for(chains[g].free_count()));
        chains[g].refresh();
    };

    // Scaling matrix D from draws at theta0.
    const int n1 = gains.scaling_draws > 0 ? gains.scaling_draws : std::max(100, 7 + 3 * p);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t g = 0; g < G; ++g) {
        Eigen::MatrixXd Z(n1, groups[g].spec->natural_dim());
        for (int k = 0; k < n1; ++k) {
            advance(g);
            Z.row(k) = chains[g].stats().transpose();
        }
        const Eigen::MatrixXd c = Z.rowwise() - Z.colwise().mean();
        const Eigen::MatrixXd J = groups[g].spec->jacobian(theta);
        D += groups[g].count() * J.transpose() * (c.transpose() * c / std::max(1, n1 - 1)) * J;
    }
    Eigen::MatrixXd Dinv(p, p);
    for (int a = 0; a < p; ++a) Dinv.col(a) = detail::solve_psd(D, Eigen::VectorXd::Unit(p, a));

    FitResult res;
    res.method = Method::stochastic_approx;
    res.param_names = data.param_names();
    res.config = cfg;
    Eigen::VectorXd average = Eigen::VectorXd::Zero(p);
    double a0 = gains.a0;
    for (int phase = 0; phase < gains.phases; ++phase, a0 *= gains.a0_decay) {
        for (int t = 0; t < gains.phase_iterations; ++t) {
            Eigen::VectorXd step = Eigen::VectorXd::Zero(p);
            for (std::size_t g = 0; g < G; ++g) {
                chains[g].set_theta(theta);
                advance(g);
                const Eigen::MatrixXd J = groups[g].spec->jacobian(theta);
                step += J.transpose() * (groups[g].total - groups[g].count() * chains[g].stats());
            }
            const double a = a0 * gains.t0 / (t + gains.t0);
            theta += a * Dinv * step;
            if (!theta.allFinite() || theta.cwiseAbs().maxCoeff() > gains.divergence_cap)
                fail(ErrorCode::divergence,
                     "stochastic approximation diverged (|theta|_inf > " +
                         std::to_string(gains.divergence_cap) + ") in phase " +
                         std::to_string(phase + 1));
            if (phase + 1 == gains.phases) average += theta;
        }
        res.diagnostics.history.push_back(theta);
    }
    res.theta_hat = average / gains.phase_iterations;
    res.diagnostics.iterations = gains.phases * gains.phase_iterations;
    res.diagnostics.converged = true;
    double acc = 0;
    for (const auto& c : chains)
        acc += static_cast<double>(c.accepted()) / std::max<double>(1.0, static_cast<double>(c.proposals()));
    res.diagnostics.acceptance_rate = acc / static_cast<double>(G);

    const StandardErrors se = standard_errors(data, res.theta_hat, cfg);
    res.std_errors = se.std_errors;
    res.covariance = se.covariance;
    for (const auto& w : data.networks.front().spec.warnings(res.theta_hat)) res.notes.push_back(w);
    return res;
}

FitResult exact_fit(const NetworkData& data, ExactLimits limits) {
    data.validate();
    check_mle_boundary(data);
    const auto groups = detail::group_networks(data);
    std::vector<ExactModel> models;
    models.reserve(groups.size());
    for (const auto& g : groups) models.emplace_back(*g.spec, limits);
    std::vector<ExactGroup> eg;
    for (std::size_t g = 0; g < groups.size(); ++g)
        eg.push_back({&models[g], groups[g].total, groups[g].count()});
    const ExactFit fit = exact_mle(eg, ThetaVector::Zero(data.param_dim()));

    FitResult res;
    res.method = Method::exact;
    res.theta_hat = fit.theta;
    res.param_names = data.param_names();
    res.diagnostics.iterations = fit.iterations;
    res.diagnostics.gradient_norm = fit.gradient_norm;
    res.diagnostics.converged = true;
    const StandardErrors se = invert_information(fit.information);
    res.std_errors = se.std_errors;
    res.covariance = se.covariance;
    for (const auto& w : data.networks.front().spec.warnings(fit.theta)) res.notes.push_back(w);
    return res;
}

StandardErrors standard_errors(const NetworkData& data, const ThetaVector& theta_hat,
                               const McmcConfig& cfg, ExactLimits limits) {
    data.validate();
    check_theta0(data, theta_hat);
    const auto groups = detail::group_networks(data);
    std::vector<Eigen::MatrixXd> covs(groups.size());
    parallel_for(groups.size(), cfg.threads, [&](std::size_t g) {
        const ModelSpec& spec = *groups[g].spec;
        if (spec.node_count() <= limits.max_nodes) {
            covs[g] = ExactModel(spec, limits).moments(theta_hat).covariance;
        } else {
            const Graph& start =
                data.networks[static_cast<std::size_t>(groups[g].members.front())].graph;
            const StatRun run = mh_sample_stats(spec, theta_hat, cfg, start, stream_id(1 << 20, g));
            const Eigen::MatrixXd c = run.stats.rowwise() - run.stats.colwise().mean();
            covs[g] = c.transpose() * c / std::max<double>(1.0, static_cast<double>(run.stats.rows() - 1));
        }
    });
    return invert_information(
        pooled_information(groups, theta_hat, [&](std::size_t g) { return covs[g]; }));
}

FitResult fit_pooled(const NetworkData& data, const McmcConfig& cfg, const FitOptions& opt) {
    data.validate();
    if (opt.method == Method::mple) return mple(data);
    if (opt.method == Method::exact) return exact_fit(data, opt.limits);

    std::vector<std::string> notes;
    ThetaVector theta0;
    if (opt.theta0) {
        theta0 = *opt.theta0;
    } else {
        check_mle_boundary(data);
        try {
            theta0 = solve_mple(data, detail::group_networks(data)).theta;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::mple_separation && e.code() != ErrorCode::non_convergence)
                throw;
            theta0 = ThetaVector::Zero(data.param_dim());
            notes.push_back("MPLE unavailable (" + std::string(e.token()) + "); started from zeros");
        }
    }
    FitResult res = opt.method == Method::mcmle
                        ? mcmle(data, theta0, cfg, opt.mcmle)
                        : stochastic_approximation(data, theta0, cfg, opt.gains);
    res.notes.insert(res.notes.begin(), notes.begin(), notes.end());
    return res;
}

}  // namespace ergm
