#include "ergm/mask.hpp"

#include "ergm/error.hpp"

namespace ergm {

ObservationMask::ObservationMask(int n, bool observed)
    : index_(n), bits_(static_cast<std::size_t>(dyad_count(n)), observed ? 1 : 0) {
    require(n >= 1, "node count must be positive");
}

void ObservationMask::set_observed(Dyad d, bool value) {
    require(d.i >= 0 && d.j < node_count() && d.i < d.j, "dyad outside the mask");
    bits_[static_cast<std::size_t>(index_.index(d))] = value ? 1 : 0;
}

std::int64_t ObservationMask::observed_count() const {
    std::int64_t c = 0;
    for (auto b : bits_) c += b;
    return c;
}

std::vector<Dyad> ObservationMask::unobserved_dyads() const {
    std::vector<Dyad> out;
    for (std::int64_t k = 0; k < index_.size(); ++k)
        if (!bits_[static_cast<std::size_t>(k)]) out.push_back(index_.dyad(k));
    return out;
}

ObservationMask ObservationMask::unite(const ObservationMask& other) const {
    require(other.node_count() == node_count(), "mask size mismatch");
    ObservationMask out = *this;
    for (std::size_t k = 0; k < bits_.size(); ++k) out.bits_[k] = bits_[k] | other.bits_[k];
    return out;
}

ObservationMask ObservationMask::restrict_to(const ObservationMask& other) const {
    require(other.node_count() == node_count(), "mask size mismatch");
    ObservationMask out = *this;
    for (std::size_t k = 0; k < bits_.size(); ++k) out.bits_[k] = bits_[k] & other.bits_[k];
    return out;
}

Graph ObservationMask::observed_part(const Graph& g) const {
    require(g.node_count() == node_count(), "mask/graph size mismatch");
    Graph out = g;
    for (const Dyad& d : unobserved_dyads()) out.set(d, false);
    return out;
}

}  // namespace ergm
