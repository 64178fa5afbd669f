#ifndef ERGM_MISSING_HPP
#define ERGM_MISSING_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ergm/estimate.hpp"
#include "ergm/mask.hpp"

namespace ergm {

enum class Design { ego, link_trace, subgraph, mar };
std::string to_string(Design d);

/// Parameters of the observation process. They share nothing with theta,
/// which is what makes the two variation-independent.
struct DesignParams {
    Design kind = Design::ego;
    /// Inclusion probability per node (ego, link-trace) or per block
    /// (subgraph); a single entry applies to every unit.
    std::vector<double> inclusion{1.0};
    int waves = 0;
    double q = 0;  // mar: probability that a dyad is unobserved
    bool ignorable = true;

    void validate(int units) const;
    double inclusion_of(int unit) const;
};

/// Observes the full dyad row of every listed ego.
ObservationMask ego_mask(int n, std::span<const int> egos);

ObservationMask ego_sample(const Graph& g, const DesignParams& p, std::uint64_t seed);
/// Wave 0 is ego_sample with the same seed; each further wave turns the
/// alters of the previous wave into egos.
ObservationMask link_trace(const Graph& g, const DesignParams& p, std::uint64_t seed);
/// Within-block dyads of sampled blocks; nothing else.
ObservationMask subgraph_sample(const BlockStructure& blocks, const DesignParams& p,
                                std::uint64_t seed);
ObservationMask mar_mask(int n, double q, std::uint64_t seed);

/// Networks observed through masks. Values of unobserved dyads in the graphs
/// are ignored.
struct IncompleteData {
    NetworkData data;
    std::vector<ObservationMask> masks;
    bool ignorable = true;

    void validate() const;
};

struct IncompleteOptions {
    McmleOptions mcmle;
    ExactLimits limits;
    std::int64_t conditional_draws = 0;  // per network; 0 = same as the unconditional draws
};

/// Observed-data log-likelihood summed over networks, by enumeration.
double incomplete_loglik(const IncompleteData& d, const ThetaVector& theta,
                         ExactLimits limits = {});

/// Maximizes the observed-data likelihood: exactly when every network is
/// within the enumeration caps, otherwise by missing-data MCML with an
/// unconditional chain per spec and a conditional chain per network.
/// Full masks hand over to mcmle unchanged.
FitResult incomplete_fit(const IncompleteData& d, const ThetaVector& theta0, const McmcConfig& cfg,
                         const IncompleteOptions& opt = {});

}  // namespace ergm

#endif  // ERGM_MISSING_HPP
