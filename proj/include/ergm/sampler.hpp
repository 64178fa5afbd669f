#ifndef ERGM_SAMPLER_HPP
#define ERGM_SAMPLER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ergm/mask.hpp"
#include "ergm/model.hpp"
#include "ergm/rng.hpp"

namespace ergm {

enum class Proposal { uniform_dyad, tie_no_tie };

/// Chain settings. Negative burnin/interval mean "scale with the number of
/// free dyads d": burnin 10 d, interval d.
struct McmcConfig {
    std::int64_t burnin = -1;
    std::int64_t interval = -1;
    std::int64_t draws = 1000;
    Proposal proposal = Proposal::tie_no_tie;
    double p_tie = 0.5;
    std::uint64_t seed = 20240917;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
    std::int64_t burnin_for(std::int64_t free_dyads) const;
    std::int64_t interval_for(std::int64_t free_dyads) const;
};

/// Metropolis-Hastings chain over the free dyads of a graph, keeping the
/// statistic vector in step with the state.
///
/// Free edges and free non-edges are held in two swap-remove arrays so that
/// tie-no-tie proposals cost O(1) to draw.
class Chain {
   public:
    /// Every dyad free.
    Chain(const ModelSpec& spec, const ThetaVector& theta, Graph start, Rng rng,
          Proposal proposal = Proposal::tie_no_tie, double p_tie = 0.5);
    /// Only `free_dyads` may change; the rest of `start` is held fixed.
    Chain(const ModelSpec& spec, const ThetaVector& theta, Graph start,
          std::span<const Dyad> free_dyads, Rng rng, Proposal proposal = Proposal::tie_no_tie,
          double p_tie = 0.5);

    /// Moves the target distribution; the current state is kept.
    void set_theta(const ThetaVector& theta);

    /// One proposal; returns true when it was accepted.
    bool step();
    void run(std::int64_t steps);

    const Graph& graph() const { return g_; }
    const StatVector& stats() const { return s_; }
    /// Recomputes real-valued coordinates from scratch to shed rounding drift.
    void refresh();
    std::int64_t free_count() const { return static_cast<std::int64_t>(free_.size()); }
    std::int64_t proposals() const { return proposed_; }
    std::int64_t accepted() const { return accepted_; }

   private:
    void init(std::span<const Dyad> free_dyads);
    double tie_branch(std::int64_t edges) const;
    void move(std::size_t slot);

    const ModelSpec* spec_;
    EtaVector eta_;
    Graph g_;
    StatVector s_;
    Rng rng_;
    Proposal proposal_;
    double p_tie_;
    ChangeBuffer buf_;
    std::vector<Dyad> free_;
    std::vector<std::uint32_t> on_, off_;  // slots of free edges / non-edges
    std::vector<std::uint32_t> pos_;       // position of each slot in on_ or off_
    std::int64_t proposed_ = 0;
    std::int64_t accepted_ = 0;
};

struct Draw {
    Graph graph;
    StatVector stats;
};

struct SampleRun {
    std::vector<Draw> draws;
    double acceptance_rate = 0;
};

/// Retained statistic rows only (draws x q); cheaper than keeping graphs.
struct StatRun {
    Eigen::MatrixXd stats;
    Graph last;
    double acceptance_rate = 0;
};

/// Unconditional simulation, starting from `start` (empty graph by default).
SampleRun mh_sample(const ModelSpec& spec, const ThetaVector& theta, const McmcConfig& cfg,
                    std::optional<Graph> start = std::nullopt, std::uint64_t stream = 0);
StatRun mh_sample_stats(const ModelSpec& spec, const ThetaVector& theta, const McmcConfig& cfg,
                        std::optional<Graph> start = std::nullopt, std::uint64_t stream = 0);

/// Completions of y_obs: only unobserved dyads move.
std::vector<Graph> conditional_sample(const ModelSpec& spec, const ThetaVector& theta,
                                      const Graph& y_obs, const ObservationMask& mask,
                                      const McmcConfig& cfg, std::uint64_t stream = 0);
StatRun conditional_sample_stats(const ModelSpec& spec, const ThetaVector& theta,
                                 const Graph& y_obs, const ObservationMask& mask,
                                 const McmcConfig& cfg, std::uint64_t stream = 0);

/// Exact independent draws for dyad-independent specs: each dyad is an
/// independent Bernoulli with log-odds <eta, change statistic>.
std::vector<Graph> independent_sample(const ModelSpec& spec, const ThetaVector& theta,
                                      std::int64_t draws, std::uint64_t seed,
                                      std::uint64_t stream = 0);

/// Covariance of the sample mean of a chain's rows, by batch means over
/// floor(sqrt(N)) batches.
Eigen::MatrixXd batch_means_covariance(const Eigen::MatrixXd& rows);

/// Runs fn(0..count-1) on up to `threads` workers (0 = hardware). fn must only
/// touch its own index.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace ergm

#endif  // ERGM_SAMPLER_HPP
