#ifndef ERGM_MASK_HPP
#define ERGM_MASK_HPP

#include <cstdint>
#include <vector>

#include "ergm/graph.hpp"

namespace ergm {

/// Per-dyad observation indicators (true = observed). Symmetric by
/// construction since it is indexed by canonical dyads.
class ObservationMask {
   public:
    ObservationMask() = default;
    /// All dyads observed when `observed` is true, none otherwise.
    explicit ObservationMask(int n, bool observed = true);

    static ObservationMask full(int n) { return ObservationMask(n, true); }
    static ObservationMask none(int n) { return ObservationMask(n, false); }

    int node_count() const { return index_.node_count(); }
    bool observed(int i, int j) const { return bits_[static_cast<std::size_t>(index_.index(i, j))] != 0; }
    bool observed(Dyad d) const { return observed(d.i, d.j); }
    void set_observed(Dyad d, bool value);

    std::int64_t observed_count() const;
    std::int64_t unobserved_count() const { return index_.size() - observed_count(); }
    std::vector<Dyad> unobserved_dyads() const;
    bool is_full() const { return unobserved_count() == 0; }

    /// Observed where either mask observes.
    ObservationMask unite(const ObservationMask& other) const;
    /// Observed where both masks observe; restricting twice is idempotent.
    ObservationMask restrict_to(const ObservationMask& other) const;

    /// Copy of g with every unobserved dyad cleared.
    Graph observed_part(const Graph& g) const;

    friend bool operator==(const ObservationMask& a, const ObservationMask& b) {
        return a.node_count() == b.node_count() && a.bits_ == b.bits_;
    }

   private:
    DyadIndex index_{1};
    std::vector<std::uint8_t> bits_;
};

}  // namespace ergm

#endif  // ERGM_MASK_HPP
