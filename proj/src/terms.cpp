#include "ergm/terms.hpp"

#include <cmath>
#include <map>

#include "ergm/error.hpp"

namespace ergm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool same_table(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

void check_table(const Eigen::MatrixXd& values, int n, const std::string& what) {
    require(values.rows() == n && values.cols() == n,
            what + " table must be " + std::to_string(n) + "x" + std::to_string(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            require(std::isfinite(values(i, j)) && values(i, j) == values(j, i),
                    what + " table must be finite and symmetric");
}

}  // namespace

term::DyadCovariate term::DyadCovariate::distance(const NodeAttributes& attrs,
                                                  const std::string& attr, Transform f) {
    const Eigen::MatrixXd& x = attrs.values(attr);
    const auto n = x.rows();
    DyadCovariate c;
    c.name = (f == Transform::log ? "logdist." : "dist.") + attr;
    c.values = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double d = (x.row(i) - x.row(j)).norm();
            if (f == Transform::log) {
                require(d > 0.0, "log-distance undefined for coincident nodes");
                d = std::log(d);
            }
            c.values(i, j) = c.values(j, i) = d;
        }
    }
    return c;
}

term::Offset term::Offset::sparse(int n) {
    require(n >= 2, "sparse offset needs at least two nodes");
    Offset o;
    o.name = "offset.sparse";
    o.values = Eigen::MatrixXd::Constant(n, n, -std::log(static_cast<double>(n)));
    o.values.diagonal().setZero();
    return o;
}

bool same_term(const TermKind& a, const TermKind& b) {
    if (a.index() != b.index()) return false;
    return std::visit(
        overloaded{
            [&](const term::DegreeCount& x) { return x.k == std::get<term::DegreeCount>(b).k; },
            [&](const term::Esp& x) { return x.m == std::get<term::Esp>(b).m; },
            [&](const term::NodeDegree& x) {
                return x.node == std::get<term::NodeDegree>(b).node;
            },
            [&](const term::NodeMatch& x) {
                return x.attr == std::get<term::NodeMatch>(b).attr;
            },
            [&](const term::DyadCovariate& x) {
                const auto& y = std::get<term::DyadCovariate>(b);
                return x.name == y.name && same_table(x.values, y.values);
            },
            [&](const term::Offset& x) {
                const auto& y = std::get<term::Offset>(b);
                return x.name == y.name && same_table(x.values, y.values);
            },
            [](const auto&) { return true; },
        },
        a);
}

std::string term_label(const TermKind& t) {
    return std::visit(
        overloaded{
            [](const term::Edges&) { return std::string("edges"); },
            [](const term::DegreeCount& x) { return "degree" + std::to_string(x.k); },
            [](const term::TwoPaths&) { return std::string("twopaths"); },
            [](const term::Triangles&) { return std::string("triangles"); },
            [](const term::Esp& x) { return "esp" + std::to_string(x.m); },
            [](const term::NodeDegree& x) { return "nodedegree" + std::to_string(x.node + 1); },
            [](const term::NodeMatch& x) { return "nodematch." + x.attr; },
            [](const term::DyadCovariate& x) { return x.name; },
            [](const term::Offset& x) { return x.name; },
        },
        t);
}

bool is_dyad_independent(const TermKind& t) {
    return std::holds_alternative<term::Edges>(t) || std::holds_alternative<term::NodeDegree>(t) ||
           std::holds_alternative<term::NodeMatch>(t) ||
           std::holds_alternative<term::DyadCovariate>(t) || std::holds_alternative<term::Offset>(t);
}

bool is_count(const TermKind& t) {
    return !std::holds_alternative<term::DyadCovariate>(t) &&
           !std::holds_alternative<term::Offset>(t);
}

bool is_offset(const TermKind& t) { return std::holds_alternative<term::Offset>(t); }

StatVector ChangeBuffer::dense(int size) const {
    StatVector v = StatVector::Zero(size);
    for (const auto& [c, d] : entries_) v(c) += d;
    return v;
}

TermSet::TermSet(std::vector<TermKind> terms, int n, const NodeAttributes& attrs)
    : n_(n), terms_(std::move(terms)) {
    require(n >= 1, "node count must be positive");
    node_coord_.resize(n);
    for (int c = 0; c < size(); ++c) {
        for (int prev = 0; prev < c; ++prev)
            require(!same_term(terms_[prev], terms_[c]),
                    "duplicate term '" + term_label(terms_[c]) + "'");
        dyad_independent_ = dyad_independent_ && is_dyad_independent(terms_[c]);
        std::visit(
            overloaded{
                [&](const term::Edges&) { edges_coord_ = c; },
                [&](const term::DegreeCount& x) {
                    require(x.k >= 0 && x.k <= n - 1,
                            "degree " + std::to_string(x.k) + " outside [0, n-1]");
                    if (degree_coord_.empty()) degree_coord_.assign(n + 1, -1);
                    degree_coord_[x.k] = c;
                },
                [&](const term::TwoPaths&) { twopaths_coord_ = c; },
                [&](const term::Triangles&) { triangles_coord_ = c; },
                [&](const term::Esp& x) {
                    require(x.m >= 1, "shared-partner count must be at least 1");
                    if (static_cast<int>(esp_coord_.size()) <= x.m) esp_coord_.resize(x.m + 1, -1);
                    esp_coord_[x.m] = c;
                },
                [&](const term::NodeDegree& x) {
                    require(x.node >= 0 && x.node < n, "node degree term names a missing node");
                    node_coord_[x.node].push_back(c);
                },
                [&](const term::NodeMatch& x) {
                    const auto& labels = attrs.labels(x.attr);
                    require(static_cast<int>(labels.size()) == n,
                            "attribute '" + x.attr + "' does not cover every node");
                    std::map<std::string, int> ids;
                    LabelTerm lt{c, {}};
                    for (const auto& l : labels) {
                        auto [it, _] = ids.emplace(l, static_cast<int>(ids.size()));
                        lt.label_ids.push_back(it->second);
                    }
                    match_terms_.push_back(std::move(lt));
                },
                [&](const term::DyadCovariate& x) {
                    check_table(x.values, n, x.name);
                    table_terms_.push_back({c, x.values});
                },
                [&](const term::Offset& x) {
                    check_table(x.values, n, x.name);
                    table_terms_.push_back({c, x.values});
                },
            },
            terms_[c]);
    }
}

void TermSet::check_graph(const Graph& g) const {
    require(g.node_count() == n_, "graph has " + std::to_string(g.node_count()) +
                                      " nodes, terms are bound to " + std::to_string(n_));
}

StatVector TermSet::stats(const Graph& g) const {
    check_graph(g);
    StatVector s = StatVector::Zero(size());
    const auto edges = g.edges();
    if (edges_coord_ >= 0) s(edges_coord_) = static_cast<double>(edges.size());
    if (twopaths_coord_ >= 0) {
        double t = 0;
        for (int i = 0; i < n_; ++i) {
            const double d = g.degree(i);
            t += d * (d - 1) / 2;
        }
        s(twopaths_coord_) = t;
    }
    if (!degree_coord_.empty())
        for (int i = 0; i < n_; ++i)
            if (int c = degree_coord_[g.degree(i)]; c >= 0) s(c) += 1;
    for (int i = 0; i < n_; ++i)
        for (int c : node_coord_[i]) s(c) = g.degree(i);
    if (triangles_coord_ >= 0 || !esp_coord_.empty()) {
        double closed = 0;
        for (const Dyad& e : edges) {
            const int cn = common_neighbors(g, e.i, e.j);
            closed += cn;
            if (cn < static_cast<int>(esp_coord_.size()) && esp_coord_[cn] >= 0)
                s(esp_coord_[cn]) += 1;
        }
        if (triangles_coord_ >= 0) s(triangles_coord_) = closed / 3;
    }
    for (const auto& lt : match_terms_)
        for (const Dyad& e : edges)
            if (lt.label_ids[e.i] == lt.label_ids[e.j]) s(lt.coord) += 1;
    for (const auto& tt : table_terms_) {
        double sum = 0;
        for (const Dyad& e : edges) sum += tt.values(e.i, e.j);
        s(tt.coord) = sum;
    }
    return s;
}

void TermSet::change(const Graph& g, Dyad d, ChangeBuffer& out) const {
    out.clear();
    const int i = d.i;
    const int j = d.j;
    const int present = g.has_edge(i, j) ? 1 : 0;
    if (edges_coord_ >= 0) out.add(edges_coord_, 1.0);

    // Degrees as they are with d absent.
    const int di = g.degree(i) - present;
    const int dj = g.degree(j) - present;
    if (twopaths_coord_ >= 0) out.add(twopaths_coord_, di + dj);
    if (!degree_coord_.empty()) {
        for (int deg : {di, dj}) {
            if (int c = degree_coord_[deg]; c >= 0) out.add(c, -1.0);
            if (int c = degree_coord_[deg + 1]; c >= 0) out.add(c, 1.0);
        }
    }
    for (int c : node_coord_[i]) out.add(c, 1.0);
    for (int c : node_coord_[j]) out.add(c, 1.0);

    if (triangles_coord_ >= 0 || !esp_coord_.empty()) {
        const int bins = static_cast<int>(esp_coord_.size());
        auto bump = [&](int m, double delta) {
            if (m >= 1 && m < bins && esp_coord_[m] >= 0) out.add(esp_coord_[m], delta);
        };
        int cn = 0;
        for (int k : g.neighbors(i)) {
            if (k == j || !g.has_edge(j, k)) continue;
            ++cn;
            if (bins == 0) continue;
            // Edges {i,k} and {j,k} each gain the partner j (resp. i).
            for (int end : {i, j}) {
                const int before = common_neighbors(g, end, k) - present;
                bump(before, -1.0);
                bump(before + 1, 1.0);
            }
        }
        bump(cn, 1.0);
        if (triangles_coord_ >= 0) out.add(triangles_coord_, cn);
    }

    for (const auto& lt : match_terms_)
        if (lt.label_ids[i] == lt.label_ids[j]) out.add(lt.coord, 1.0);
    for (const auto& tt : table_terms_) out.add(tt.coord, tt.values(i, j));
}

StatVector TermSet::change_vector(const Graph& g, Dyad d) const {
    check_graph(g);
    g.check_dyad(d);
    ChangeBuffer buf;
    change(g, d, buf);
    return buf.dense(size());
}

void TermSet::refresh_real_valued(const Graph& g, StatVector& s) const {
    for (const auto& tt : table_terms_) {
        double sum = 0;
        for (int i = 0; i < n_; ++i)
            for (int j : g.neighbors(i))
                if (j > i) sum += tt.values(i, j);
        s(tt.coord) = sum;
    }
}

double stat_value(const TermKind& t, const Graph& g, const NodeAttributes& a) {
    return TermSet({t}, g.node_count(), a).stats(g)(0);
}

StatVector stat_vector(const std::vector<TermKind>& terms, const Graph& g,
                       const NodeAttributes& a) {
    return TermSet(terms, g.node_count(), a).stats(g);
}

StatVector change_vector(const std::vector<TermKind>& terms, const Graph& g,
                         const NodeAttributes& a, Dyad d) {
    return TermSet(terms, g.node_count(), a).change_vector(g, d);
}

}  // namespace ergm
