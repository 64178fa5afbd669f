#include "ergm/sampler.hpp"

#include <atomic>
#include <cassert>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "ergm/error.hpp"

namespace ergm {

void McmcConfig::validate() const {
    require(burnin >= -1, "burnin must be non-negative");
    require(interval == -1 || interval >= 1, "interval must be at least 1");
    require(draws >= 1, "need at least one draw");
    require(p_tie > 0 && p_tie < 1, "p_tie must lie in (0, 1)");
}

std::int64_t McmcConfig::burnin_for(std::int64_t free_dyads) const {
    return burnin >= 0 ? burnin : 10 * free_dyads;
}

std::int64_t McmcConfig::interval_for(std::int64_t free_dyads) const {
    return interval >= 1 ? interval : std::max<std::int64_t>(1, free_dyads);
}

namespace {

std::vector<Dyad> every_dyad(int n) {
    std::vector<Dyad> out;
    out.reserve(static_cast<std::size_t>(dyad_count(n)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.push_back({i, j});
    return out;
}

}  // namespace

Chain::Chain(const ModelSpec& spec, const ThetaVector& theta, Graph start, Rng rng,
             Proposal proposal, double p_tie)
    : Chain(spec, theta, std::move(start), every_dyad(spec.node_count()), std::move(rng), proposal,
            p_tie) {}

Chain::Chain(const ModelSpec& spec, const ThetaVector& theta, Graph start,
             std::span<const Dyad> free_dyads, Rng rng, Proposal proposal, double p_tie)
    : spec_(&spec),
      eta_(eta(spec, theta)),
      g_(std::move(start)),
      rng_(std::move(rng)),
      proposal_(proposal),
      p_tie_(p_tie) {
    require(g_.node_count() == spec.node_count(), "start graph does not match the model size");
    require(p_tie > 0 && p_tie < 1, "p_tie must lie in (0, 1)");
    s_ = spec.stats(g_);
    init(free_dyads);
}

void Chain::init(std::span<const Dyad> free_dyads) {
    free_.assign(free_dyads.begin(), free_dyads.end());
    pos_.resize(free_.size());
    for (std::size_t k = 0; k < free_.size(); ++k) {
        g_.check_dyad(free_[k]);
        auto& list = g_.has_edge(free_[k]) ? on_ : off_;
        pos_[k] = static_cast<std::uint32_t>(list.size());
        list.push_back(static_cast<std::uint32_t>(k));
    }
}

double Chain::tie_branch(std::int64_t edges) const {
    if (edges <= 0) return 0.0;
    if (edges >= free_count()) return 1.0;
    return p_tie_;
}

void Chain::move(std::size_t slot) {
    // After the toggle, the slot belongs to the list matching its new state.
    const bool now_on = g_.has_edge(free_[slot]);
    auto& from = now_on ? off_ : on_;
    auto& to = now_on ? on_ : off_;
    const std::uint32_t p = pos_[slot];
    const std::uint32_t last = from.back();
    from[p] = last;
    pos_[last] = p;
    from.pop_back();
    pos_[slot] = static_cast<std::uint32_t>(to.size());
    to.push_back(static_cast<std::uint32_t>(slot));
}

bool Chain::step() {
    const auto F = static_cast<std::int64_t>(free_.size());
    if (F == 0) return false;
    ++proposed_;
    std::size_t slot;
    double log_q = 0;
    if (proposal_ == Proposal::uniform_dyad) {
        slot = static_cast<std::size_t>(uniform_index(rng_, static_cast<std::uint64_t>(F)));
    } else {
        const auto E = static_cast<std::int64_t>(on_.size());
        const double pi = tie_branch(E);
        const bool pick_edge = pi >= 1.0 || (pi > 0.0 && uniform01(rng_) < pi);
        if (pick_edge) {
            slot = on_[uniform_index(rng_, static_cast<std::uint64_t>(E))];
            const double fwd = pi / E;
            const double rev = (1 - tie_branch(E - 1)) / static_cast<double>(F - E + 1);
            log_q = std::log(rev) - std::log(fwd);
        } else {
            slot = off_[uniform_index(rng_, static_cast<std::uint64_t>(F - E))];
            const double fwd = (1 - pi) / static_cast<double>(F - E);
            const double rev = tie_branch(E + 1) / static_cast<double>(E + 1);
            log_q = std::log(rev) - std::log(fwd);
        }
    }
    const Dyad d = free_[slot];
    const bool present = g_.has_edge(d);
    spec_->terms().change(g_, d, buf_);
    const double sign = present ? -1.0 : 1.0;
    const double log_ratio = sign * buf_.dot(eta_) + log_q;
    if (log_ratio < 0 && uniform01(rng_) >= std::exp(log_ratio)) return false;
    buf_.apply(s_, sign);
    g_.toggle(d);
    move(slot);
    ++accepted_;
    return true;
}

void Chain::run(std::int64_t steps) {
    for (std::int64_t t = 0; t < steps; ++t) step();
}

void Chain::set_theta(const ThetaVector& theta) { eta_ = eta(*spec_, theta); }

void Chain::refresh() { spec_->terms().refresh_real_valued(g_, s_); }

namespace {

template <class Record>
double drive(Chain& chain, const McmcConfig& cfg, Record&& record) {
    const std::int64_t F = chain.free_count();
    chain.run(cfg.burnin_for(F));
    const std::int64_t before_p = chain.proposals();
    const std::int64_t before_a = chain.accepted();
    const std::int64_t interval = cfg.interval_for(F);
    for (std::int64_t k = 0; k < cfg.draws; ++k) {
        chain.run(interval);
        chain.refresh();
        record(k, chain);
    }
    const std::int64_t p = chain.proposals() - before_p;
    return p > 0 ? static_cast<double>(chain.accepted() - before_a) / static_cast<double>(p) : 0.0;
}

void check_conditional(const ModelSpec& spec, const Graph& y_obs, const ObservationMask& mask) {
    require(y_obs.node_count() == spec.node_count(), "graph does not match the model size");
    require(mask.node_count() == y_obs.node_count(), "mask/graph size mismatch");
}

}  // namespace

SampleRun mh_sample(const ModelSpec& spec, const ThetaVector& theta, const McmcConfig& cfg,
                    std::optional<Graph> start, std::uint64_t stream) {
    cfg.validate();
    spec.check_theta(theta);
    Chain chain(spec, theta, start ? std::move(*start) : Graph(spec.node_count()),
                make_stream(cfg.seed, stream), cfg.proposal, cfg.p_tie);
    SampleRun out;
    out.draws.reserve(static_cast<std::size_t>(cfg.draws));
    out.acceptance_rate = drive(chain, cfg, [&](std::int64_t, const Chain& c) {
        out.draws.push_back({c.graph(), c.stats()});
    });
    return out;
}

StatRun mh_sample_stats(const ModelSpec& spec, const ThetaVector& theta, const McmcConfig& cfg,
                        std::optional<Graph> start, std::uint64_t stream) {
    cfg.validate();
    spec.check_theta(theta);
    Chain chain(spec, theta, start ? std::move(*start) : Graph(spec.node_count()),
                make_stream(cfg.seed, stream), cfg.proposal, cfg.p_tie);
    StatRun out;
    out.stats.resize(cfg.draws, spec.natural_dim());
    out.acceptance_rate = drive(chain, cfg, [&](std::int64_t k, const Chain& c) {
        out.stats.row(k) = c.stats().transpose();
    });
    out.last = chain.graph();
    return out;
}

std::vector<Graph> conditional_sample(const ModelSpec& spec, const ThetaVector& theta,
                                      const Graph& y_obs, const ObservationMask& mask,
                                      const McmcConfig& cfg, std::uint64_t stream) {
    cfg.validate();
    spec.check_theta(theta);
    check_conditional(spec, y_obs, mask);
    const auto free = mask.unobserved_dyads();
    Chain chain(spec, theta, y_obs, free, make_stream(cfg.seed, stream), cfg.proposal, cfg.p_tie);
    std::vector<Graph> out;
    out.reserve(static_cast<std::size_t>(cfg.draws));
    drive(chain, cfg, [&](std::int64_t, const Chain& c) {
#ifndef NDEBUG
        for (int i = 0; i < y_obs.node_count(); ++i)
            for (int j = i + 1; j < y_obs.node_count(); ++j)
                assert(!mask.observed(i, j) || c.graph().has_edge(i, j) == y_obs.has_edge(i, j));
#endif
        out.push_back(c.graph());
    });
    return out;
}

StatRun conditional_sample_stats(const ModelSpec& spec, const ThetaVector& theta,
                                 const Graph& y_obs, const ObservationMask& mask,
                                 const McmcConfig& cfg, std::uint64_t stream) {
    cfg.validate();
    spec.check_theta(theta);
    check_conditional(spec, y_obs, mask);
    const auto free = mask.unobserved_dyads();
    Chain chain(spec, theta, y_obs, free, make_stream(cfg.seed, stream), cfg.proposal, cfg.p_tie);
    StatRun out;
    out.stats.resize(cfg.draws, spec.natural_dim());
    out.acceptance_rate = drive(chain, cfg, [&](std::int64_t k, const Chain& c) {
        out.stats.row(k) = c.stats().transpose();
    });
    out.last = chain.graph();
    return out;
}

std::vector<Graph> independent_sample(const ModelSpec& spec, const ThetaVector& theta,
                                      std::int64_t draws, std::uint64_t seed,
                                      std::uint64_t stream) {
    require(spec.dyad_independent(), "independent sampling needs a dyad-independent model");
    require(draws >= 1, "need at least one draw");
    spec.check_theta(theta);
    const int n = spec.node_count();
    const EtaVector e = eta(spec, theta);
    const Graph empty(n);
    ChangeBuffer buf;
    std::vector<Dyad> dyads = every_dyad(n);
    std::vector<double> prob(dyads.size());
    for (std::size_t k = 0; k < dyads.size(); ++k) {
        spec.terms().change(empty, dyads[k], buf);
        prob[k] = 1.0 / (1.0 + std::exp(-buf.dot(e)));
    }
    Rng rng = make_stream(seed, stream);
    std::vector<Graph> out;
    out.reserve(static_cast<std::size_t>(draws));
    std::vector<Dyad> edges;
    for (std::int64_t t = 0; t < draws; ++t) {
        edges.clear();
        for (std::size_t k = 0; k < dyads.size(); ++k)
            if (uniform01(rng) < prob[k]) edges.push_back(dyads[k]);
        out.push_back(Graph::from_edges(n, edges));
    }
    return out;
}

Eigen::MatrixXd batch_means_covariance(const Eigen::MatrixXd& rows) {
    const Eigen::Index N = rows.rows();
    const Eigen::Index q = rows.cols();
    require(N >= 2, "need at least two draws for a Monte Carlo error");
    const auto b = static_cast<Eigen::Index>(std::sqrt(static_cast<double>(N)));
    if (b < 2) {
        const Eigen::MatrixXd c = rows.rowwise() - rows.colwise().mean();
        return c.transpose() * c / static_cast<double>((N - 1) * N);
    }
    const Eigen::Index m = N / b;
    Eigen::MatrixXd means(b, q);
    for (Eigen::Index k = 0; k < b; ++k)
        means.row(k) = rows.block(N - b * m + k * m, 0, m, q).colwise().mean();
    const Eigen::MatrixXd c = means.rowwise() - means.colwise().mean();
    return c.transpose() * c / static_cast<double>((b - 1) * b);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    unsigned workers = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_lock;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t k; (k = next.fetch_add(1)) < count;) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(error_lock);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace ergm
