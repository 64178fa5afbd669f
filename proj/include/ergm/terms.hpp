#ifndef ERGM_TERMS_HPP
#define ERGM_TERMS_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ergm/graph.hpp"

namespace ergm {

using StatVector = Eigen::VectorXd;

namespace term {

struct Edges {};
/// Number of nodes with degree exactly k.
struct DegreeCount {
    int k = 0;
};
/// Σ_i C(deg(i), 2).
struct TwoPaths {};
struct Triangles {};
/// Number of edges whose endpoints have exactly m common neighbors.
struct Esp {
    int m = 1;
};
/// Degree of one node (β-model propensity).
struct NodeDegree {
    int node = 0;
};
/// Edges joining nodes with equal labels of a categorical attribute.
struct NodeMatch {
    std::string attr;
};
/// Σ_{i<j} c_ij y_ij for a fixed symmetric table c.
struct DyadCovariate {
    std::string name;
    Eigen::MatrixXd values;

    enum class Transform { identity, log };
    /// c_ij = f(||x_i - x_j||) for the real attribute `attr`.
    static DyadCovariate distance(const NodeAttributes& attrs, const std::string& attr,
                                  Transform f = Transform::identity);
};
/// Fixed reference-measure weights o_ij; always enters with weight one.
struct Offset {
    std::string name;
    Eigen::MatrixXd values;

    /// o_ij = -log n on every dyad.
    static Offset sparse(int n);
};

}  // namespace term

using TermKind = std::variant<term::Edges, term::DegreeCount, term::TwoPaths, term::Triangles,
                              term::Esp, term::NodeDegree, term::NodeMatch,
                              term::DyadCovariate, term::Offset>;

bool same_term(const TermKind& a, const TermKind& b);
std::string term_label(const TermKind& t);
/// True when the change statistic of every dyad is independent of the rest
/// of the graph.
bool is_dyad_independent(const TermKind& t);
/// True when the statistic is always an integer count.
bool is_count(const TermKind& t);
bool is_offset(const TermKind& t);

/// Sparse list of (coordinate, delta) pairs; coordinates may repeat.
class ChangeBuffer {
   public:
    void clear() { entries_.clear(); }
    void add(int coord, double delta) { entries_.emplace_back(coord, delta); }
    const std::vector<std::pair<int, double>>& entries() const { return entries_; }

    template <typename Derived>
    double dot(const Eigen::MatrixBase<Derived>& eta) const {
        double s = 0.0;
        for (const auto& [c, d] : entries_) s += eta(c) * d;
        return s;
    }
    template <typename Derived>
    void apply(Eigen::MatrixBase<Derived>& stats, double sign) const {
        for (const auto& [c, d] : entries_) stats(c) += sign * d;
    }
    StatVector dense(int size) const;

   private:
    std::vector<std::pair<int, double>> entries_;
};

/// A validated, ordered list of terms bound to a node count and attributes.
///
/// Change statistics are computed locally: O(1) for edge, degree and dyadic
/// terms, O(deg) for triangles and O(deg^2) for the shared-partner bins.
class TermSet {
   public:
    TermSet() = default;
    TermSet(std::vector<TermKind> terms, int n, const NodeAttributes& attrs = {});

    int size() const { return static_cast<int>(terms_.size()); }
    int node_count() const { return n_; }
    const std::vector<TermKind>& terms() const { return terms_; }
    bool dyad_independent() const { return dyad_independent_; }

    StatVector stats(const Graph& g) const;
    /// Writes s(g with d present) - s(g with d absent) into `out` (cleared first).
    void change(const Graph& g, Dyad d, ChangeBuffer& out) const;
    StatVector change_vector(const Graph& g, Dyad d) const;

    /// True when some coordinate (covariate or offset) is real-valued.
    bool has_real_valued() const { return !table_terms_.empty(); }
    /// Recomputes the real-valued coordinates of s from scratch, summing in
    /// canonical dyad order exactly as stats() does.
    void refresh_real_valued(const Graph& g, StatVector& s) const;

   private:
    void check_graph(const Graph& g) const;

    int n_ = 0;
    std::vector<TermKind> terms_;
    bool dyad_independent_ = true;

    int edges_coord_ = -1;
    int twopaths_coord_ = -1;
    int triangles_coord_ = -1;
    std::vector<int> degree_coord_;  // degree k -> coordinate, -1 if unused
    std::vector<int> esp_coord_;     // shared-partner count m -> coordinate
    std::vector<std::vector<int>> node_coord_;  // node -> NodeDegree coordinates
    struct LabelTerm {
        int coord;
        std::vector<int> label_ids;
    };
    std::vector<LabelTerm> match_terms_;
    struct TableTerm {
        int coord;
        Eigen::MatrixXd values;
    };
    std::vector<TableTerm> table_terms_;
};

/// Value of a single term on g.
double stat_value(const TermKind& t, const Graph& g, const NodeAttributes& a = {});
StatVector stat_vector(const std::vector<TermKind>& terms, const Graph& g,
                       const NodeAttributes& a = {});
StatVector change_vector(const std::vector<TermKind>& terms, const Graph& g,
                         const NodeAttributes& a, Dyad d);

}  // namespace ergm

#endif  // ERGM_TERMS_HPP
