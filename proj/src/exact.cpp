#include "ergm/exact.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "numeric.hpp"
#include "optimize.hpp"

namespace ergm {

namespace {

struct VectorHash {
    std::size_t operator()(const std::vector<double>& v) const noexcept {
        std::size_t h = 1469598103934665603ULL;
        for (double x : v) {
            std::uint64_t bits;
            std::memcpy(&bits, &x, sizeof bits);
            h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

void check_cap(const ModelSpec& spec, const ExactLimits& limits) {
    require(spec.node_count() <= limits.max_nodes,
            "exact enumeration capped at n = " + std::to_string(limits.max_nodes) + ", got n = " +
                std::to_string(spec.node_count()),
            ErrorCode::cap_exceeded);
}

std::vector<Dyad> all_dyads(int n) {
    std::vector<Dyad> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.push_back({i, j});
    return out;
}

}  // namespace

double StatSupport::log_sum(const EtaVector& eta) const {
    return detail::log_sum_exp(stats * eta + log_count);
}

StatSupport enumerate_support(const ModelSpec& spec, const Graph& base,
                              std::span<const Dyad> free_dyads) {
    require(free_dyads.size() < 40, "too many free dyads to enumerate", ErrorCode::cap_exceeded);
    const TermSet& terms = spec.terms();
    Graph g = base;
    for (const Dyad& d : free_dyads) g.set(d, false);

    StatVector s = terms.stats(g);
    const auto q = static_cast<std::size_t>(s.size());
    std::unordered_map<std::vector<double>, double, VectorHash> counts;
    std::vector<double> key(q);
    auto record = [&] {
        for (std::size_t a = 0; a < q; ++a) key[a] = s(static_cast<Eigen::Index>(a)) + 0.0;
        counts[key] += 1.0;
    };

    ChangeBuffer buf;
    const bool refresh = terms.has_real_valued();
    record();
    const std::uint64_t states = std::uint64_t{1} << free_dyads.size();
    for (std::uint64_t k = 1; k < states; ++k) {
        const Dyad d = free_dyads[static_cast<std::size_t>(std::countr_zero(k))];
        terms.change(g, d, buf);
        buf.apply(s, g.has_edge(d) ? -1.0 : 1.0);
        g.toggle(d);
        if (refresh) terms.refresh_real_valued(g, s);
        record();
    }

    StatSupport out;
    out.stats.resize(static_cast<Eigen::Index>(counts.size()), static_cast<Eigen::Index>(q));
    out.log_count.resize(static_cast<Eigen::Index>(counts.size()));
    Eigen::Index r = 0;
    for (const auto& [vec, c] : counts) {
        for (std::size_t a = 0; a < q; ++a) out.stats(r, static_cast<Eigen::Index>(a)) = vec[a];
        out.log_count(r) = std::log(c);
        ++r;
    }
    return out;
}

ExactMoments support_moments(const StatSupport& support, const EtaVector& eta) {
    const Eigen::VectorXd logw = support.stats * eta + support.log_count;
    ExactMoments m;
    m.log_normalizer = detail::log_sum_exp(logw);
    const Eigen::VectorXd w = (logw.array() - m.log_normalizer).exp();
    m.mean = support.stats.transpose() * w;
    const Eigen::MatrixXd centered = support.stats.rowwise() - m.mean.transpose();
    m.covariance = centered.transpose() * w.asDiagonal() * centered;
    return m;
}

ExactModel::ExactModel(ModelSpec spec, ExactLimits limits) : spec_(std::move(spec)) {
    check_cap(spec_, limits);
    const auto dyads = all_dyads(spec_.node_count());
    support_ = enumerate_support(spec_, Graph(spec_.node_count()), dyads);
}

double ExactModel::log_normalizer(const ThetaVector& theta) const {
    return support_.log_sum(eta(spec_, theta));
}

ExactMoments ExactModel::moments(const ThetaVector& theta) const {
    return support_moments(support_, eta(spec_, theta));
}

double ExactModel::loglik(const ThetaVector& theta, const StatVector& observed) const {
    const EtaVector e = eta(spec_, theta);
    return e.dot(observed) - support_.log_sum(e);
}

double log_normalizer(const ModelSpec& spec, const ThetaVector& theta, ExactLimits limits) {
    return ExactModel(spec, limits).log_normalizer(theta);
}

ExactMoments exact_moments(const ModelSpec& spec, const ThetaVector& theta, ExactLimits limits) {
    return ExactModel(spec, limits).moments(theta);
}

ExactFit exact_mle(std::span<const ExactGroup> groups, const ThetaVector& theta0,
                   NewtonOptions opt) {
    require(!groups.empty(), "need at least one observed network");
    const int p = groups.front().model->spec().param_dim();
    bool curved = false;
    for (const auto& g : groups) {
        require(g.model->spec().param_dim() == p, "pooled models must share one parameter vector");
        require(g.total.size() == g.model->spec().natural_dim(), "statistic length mismatch");
        require(g.count > 0, "group count must be positive");
        curved = curved || g.model->spec().is_curved();
    }
    groups.front().model->spec().check_theta(theta0);

    detail::NewtonProblem pr;
    pr.value = [&](const Eigen::VectorXd& t) {
        double v = 0;
        for (const auto& g : groups) {
            const EtaVector e = eta(g.model->spec(), t);
            v += e.dot(g.total) - g.count * g.model->support().log_sum(e);
        }
        return v;
    };
    pr.local = [&](const Eigen::VectorXd& t, Eigen::VectorXd& grad, Eigen::MatrixXd& info) {
        grad = Eigen::VectorXd::Zero(p);
        info = Eigen::MatrixXd::Zero(p, p);
        for (const auto& g : groups) {
            const ExactMoments m = g.model->moments(t);
            const Eigen::MatrixXd J = g.model->spec().jacobian(t);
            grad += J.transpose() * (g.total - g.count * m.mean);
            info += g.count * J.transpose() * m.covariance * J;
        }
    };
    pr.observed_hessian = curved;
    detail::NewtonSettings ns;
    ns.max_iterations = opt.max_iterations;
    ns.gradient_tolerance = opt.gradient_tolerance;
    ns.divergence_cap = opt.divergence_cap;
    const detail::NewtonResult r = detail::newton_maximize(pr, theta0, ns);

    if (r.diverged)
        fail(ErrorCode::mle_nonexistent,
             "parameter estimates diverge (|theta|_inf > " + std::to_string(opt.divergence_cap) +
                 "): observed statistics lie on the boundary of the convex hull");
    if (detail::condition_ratio(r.information) < 1e-12)
        fail(ErrorCode::singular_information,
             "Fisher information is singular at the estimate: model is not identifiable");
    if (r.gradient_norm >= 1e3 * opt.gradient_tolerance)
        fail(ErrorCode::non_convergence,
             "exact Newton iteration stalled with score norm " + std::to_string(r.gradient_norm));
    ExactFit fit;
    fit.theta = r.theta;
    fit.loglik = r.value;
    fit.iterations = r.iterations;
    fit.gradient_norm = r.gradient_norm;
    fit.information = r.information;
    return fit;
}

ExactFit exact_mle(const ExactModel& model, std::span<const StatVector> observed,
                   const ThetaVector& theta0, NewtonOptions opt) {
    require(!observed.empty(), "need at least one observed network");
    ExactGroup g{&model, StatVector::Zero(model.spec().natural_dim()),
                 static_cast<double>(observed.size())};
    for (const auto& s : observed) g.total += s;
    return exact_mle(std::span<const ExactGroup>(&g, 1), theta0, opt);
}

ExactFit exact_mle(const ModelSpec& spec, const Graph& y, ExactLimits limits, NewtonOptions opt) {
    ExactModel model(spec, limits);
    const StatVector s = spec.stats(y);
    return exact_mle(model, std::span<const StatVector>(&s, 1),
                     ThetaVector::Zero(spec.param_dim()), opt);
}

double log_completion_sum(const ModelSpec& spec, const ThetaVector& theta, const Graph& y_obs,
                          const ObservationMask& mask, ExactLimits limits) {
    require(mask.node_count() == spec.node_count() && y_obs.node_count() == spec.node_count(),
            "mask/graph size mismatch");
    const auto missing = mask.unobserved_dyads();
    require(static_cast<int>(missing.size()) <= limits.max_free_dyads,
            std::to_string(missing.size()) + " unobserved dyads exceed the exact cap of " +
                std::to_string(limits.max_free_dyads),
            ErrorCode::cap_exceeded);
    return enumerate_support(spec, y_obs, missing).log_sum(eta(spec, theta));
}

double exact_incomplete_loglik(const ModelSpec& spec, const ThetaVector& theta,
                               const Graph& y_obs, const ObservationMask& mask,
                               ExactLimits limits) {
    const double numerator = log_completion_sum(spec, theta, y_obs, mask, limits);
    return numerator - log_normalizer(spec, theta, limits);
}

}  // namespace ergm
