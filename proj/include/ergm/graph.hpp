#ifndef ERGM_GRAPH_HPP
#define ERGM_GRAPH_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ergm {

/// Unordered pair of distinct nodes, stored canonically with i < j.
struct Dyad {
    int i = 0;
    int j = 1;

    /// Canonicalizes (a, b); throws on a self-loop.
    static Dyad of(int a, int b);

    friend bool operator==(const Dyad&, const Dyad&) = default;
    friend auto operator<=>(const Dyad&, const Dyad&) = default;
};

inline std::int64_t dyad_count(int n) {
    return static_cast<std::int64_t>(n) * (n - 1) / 2;
}

/// Bijection between canonical dyads and 0..n(n-1)/2-1 in lexicographic order.
class DyadIndex {
   public:
    explicit DyadIndex(int n);

    int node_count() const { return n_; }
    std::int64_t size() const { return static_cast<std::int64_t>(dyads_.size()); }
    std::int64_t index(int i, int j) const;
    std::int64_t index(Dyad d) const { return index(d.i, d.j); }
    Dyad dyad(std::int64_t k) const { return dyads_[static_cast<std::size_t>(k)]; }

   private:
    int n_;
    std::vector<Dyad> dyads_;
};

/// Undirected simple graph on nodes 0..n-1.
///
/// Keeps a dense byte adjacency matrix for O(1) edge queries and sorted
/// neighbor lists for O(deg) iteration; both are updated on every toggle.
/// Safe to share for concurrent reads; mutation needs exclusive access.
class Graph {
   public:
    Graph() = default;
    explicit Graph(int n);

    /// Builds a graph from possibly duplicated, possibly non-canonical dyads.
    static Graph from_edges(int n, std::span<const Dyad> edges);
    static Graph complete(int n);

    int node_count() const { return n_; }
    std::int64_t edge_count() const { return edges_; }

    bool has_edge(int i, int j) const {
        return adj_[static_cast<std::size_t>(i) * n_ + j] != 0;
    }
    bool has_edge(Dyad d) const { return has_edge(d.i, d.j); }

    int degree(int i) const { return static_cast<int>(nbrs_[i].size()); }
    std::span<const int> neighbors(int i) const { return nbrs_[i]; }

    /// Flips the state of d in place.
    void toggle(Dyad d);
    void toggle(int i, int j) { toggle(Dyad::of(i, j)); }
    /// Sets the state of d; no-op when it already has that state.
    void set(Dyad d, bool present);

    /// Copy of this graph with d flipped.
    Graph toggled(Dyad d) const;

    /// Edges in canonical lexicographic order.
    std::vector<Dyad> edges() const;

    void check_node(int i) const;
    void check_dyad(Dyad d) const;

    friend bool operator==(const Graph& a, const Graph& b) {
        return a.n_ == b.n_ && a.adj_ == b.adj_;
    }

   private:
    int n_ = 0;
    std::int64_t edges_ = 0;
    std::vector<std::uint8_t> adj_;
    std::vector<std::vector<int>> nbrs_;
};

/// |N(i) ∩ N(j)|, by a linear merge of the sorted neighbor lists.
int common_neighbors(const Graph& g, int i, int j);

/// Shortest-path length counts over all dyads.
struct GeodesicHistogram {
    /// counts[d] = number of dyads at distance d, for d = 1..n-1 (index 0 unused).
    std::vector<std::int64_t> counts;
    std::int64_t unreachable = 0;

    std::int64_t total() const;
    friend bool operator==(const GeodesicHistogram&, const GeodesicHistogram&) = default;
};

GeodesicHistogram all_pairs_geodesics(const Graph& g);

/// Partition of the nodes into K non-empty blocks labelled 0..K-1.
struct BlockStructure {
    std::vector<int> assignment;
    int block_count = 0;

    static BlockStructure from_assignment(std::vector<int> assignment);
    /// K blocks of `size` consecutive nodes each.
    static BlockStructure equal_blocks(int K, int size);

    int node_count() const { return static_cast<int>(assignment.size()); }
    std::vector<int> members(int block) const;
};

/// Per-node covariates: categorical labels and real vectors (one row per node).
struct NodeAttributes {
    std::map<std::string, std::vector<std::string>> categorical;
    std::map<std::string, Eigen::MatrixXd> real;

    bool empty() const { return categorical.empty() && real.empty(); }
    /// Throws unless every attribute has exactly n records and names are unique
    /// across both kinds.
    void validate(int n) const;
    const std::vector<std::string>& labels(const std::string& name) const;
    const Eigen::MatrixXd& values(const std::string& name) const;

    friend bool operator==(const NodeAttributes& a, const NodeAttributes& b);
};

}  // namespace ergm

#endif  // ERGM_GRAPH_HPP
