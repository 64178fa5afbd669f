#include "ergm/graph.hpp"

#include <algorithm>
#include <queue>

#include "ergm/error.hpp"

namespace ergm {

Dyad Dyad::of(int a, int b) {
    require(a != b, "self-loop (" + std::to_string(a) + "," + std::to_string(b) + ")");
    return a < b ? Dyad{a, b} : Dyad{b, a};
}

DyadIndex::DyadIndex(int n) : n_(n) {
    dyads_.reserve(static_cast<std::size_t>(dyad_count(n)));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) dyads_.push_back({i, j});
}

std::int64_t DyadIndex::index(int i, int j) const {
    if (i > j) std::swap(i, j);
    const std::int64_t a = i;
    return a * (2 * static_cast<std::int64_t>(n_) - a - 1) / 2 + (j - i - 1);
}

Graph::Graph(int n) : n_(n) {
    require(n >= 1, "node count must be positive");
    adj_.assign(static_cast<std::size_t>(n) * n, 0);
    nbrs_.resize(n);
}

Graph Graph::from_edges(int n, std::span<const Dyad> edges) {
    Graph g(n);
    for (const Dyad& raw : edges) {
        const Dyad d = Dyad::of(raw.i, raw.j);
        g.check_dyad(d);
        g.set(d, true);
    }
    return g;
}

Graph Graph::complete(int n) {
    Graph g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.set({i, j}, true);
    return g;
}

void Graph::check_node(int i) const {
    require(i >= 0 && i < n_,
            "node " + std::to_string(i) + " out of range [0," + std::to_string(n_) + ")");
}

void Graph::check_dyad(Dyad d) const {
    check_node(d.i);
    check_node(d.j);
    require(d.i != d.j, "self-loop at node " + std::to_string(d.i));
}

void Graph::toggle(Dyad d) {
    check_dyad(d);
    const bool present = has_edge(d.i, d.j);
    const auto ij = static_cast<std::size_t>(d.i) * n_ + d.j;
    const auto ji = static_cast<std::size_t>(d.j) * n_ + d.i;
    auto& ni = nbrs_[d.i];
    auto& nj = nbrs_[d.j];
    if (present) {
        adj_[ij] = adj_[ji] = 0;
        ni.erase(std::lower_bound(ni.begin(), ni.end(), d.j));
        nj.erase(std::lower_bound(nj.begin(), nj.end(), d.i));
        --edges_;
    } else {
        adj_[ij] = adj_[ji] = 1;
        ni.insert(std::lower_bound(ni.begin(), ni.end(), d.j), d.j);
        nj.insert(std::lower_bound(nj.begin(), nj.end(), d.i), d.i);
        ++edges_;
    }
}

void Graph::set(Dyad d, bool present) {
    check_dyad(d);
    if (has_edge(d.i, d.j) != present) toggle(d);
}

Graph Graph::toggled(Dyad d) const {
    Graph copy = *this;
    copy.toggle(d);
    return copy;
}

std::vector<Dyad> Graph::edges() const {
    std::vector<Dyad> out;
    out.reserve(static_cast<std::size_t>(edges_));
    for (int i = 0; i < n_; ++i)
        for (int j : nbrs_[i])
            if (j > i) out.push_back({i, j});
    return out;
}

int common_neighbors(const Graph& g, int i, int j) {
    g.check_dyad(Dyad::of(i, j));
    const auto a = g.neighbors(i);
    const auto b = g.neighbors(j);
    int count = 0;
    auto p = a.begin();
    auto q = b.begin();
    while (p != a.end() && q != b.end()) {
        if (*p < *q) {
            ++p;
        } else if (*q < *p) {
            ++q;
        } else {
            ++count;
            ++p;
            ++q;
        }
    }
    return count;
}

std::int64_t GeodesicHistogram::total() const {
    std::int64_t t = unreachable;
    for (auto c : counts) t += c;
    return t;
}

GeodesicHistogram all_pairs_geodesics(const Graph& g) {
    const int n = g.node_count();
    GeodesicHistogram h;
    h.counts.assign(static_cast<std::size_t>(std::max(n, 1)), 0);
    std::vector<int> dist(n);
    std::queue<int> frontier;
    for (int s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[s] = 0;
        frontier.push(s);
        while (!frontier.empty()) {
            const int u = frontier.front();
            frontier.pop();
            for (int v : g.neighbors(u)) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    frontier.push(v);
                }
            }
        }
        for (int t = s + 1; t < n; ++t) {
            if (dist[t] < 0)
                ++h.unreachable;
            else
                ++h.counts[dist[t]];
        }
    }
    return h;
}

BlockStructure BlockStructure::from_assignment(std::vector<int> assignment) {
    BlockStructure b;
    int max_id = -1;
    for (int id : assignment) {
        require(id >= 0, "negative block id");
        max_id = std::max(max_id, id);
    }
    std::vector<int> sizes(static_cast<std::size_t>(max_id + 1), 0);
    for (int id : assignment) ++sizes[id];
    for (int k = 0; k <= max_id; ++k)
        require(sizes[k] > 0, "block " + std::to_string(k) + " is empty");
    b.assignment = std::move(assignment);
    b.block_count = max_id + 1;
    return b;
}

BlockStructure BlockStructure::equal_blocks(int K, int size) {
    require(K >= 1 && size >= 1, "block count and size must be positive");
    std::vector<int> a(static_cast<std::size_t>(K) * size);
    for (std::size_t v = 0; v < a.size(); ++v) a[v] = static_cast<int>(v) / size;
    return from_assignment(std::move(a));
}

std::vector<int> BlockStructure::members(int block) const {
    std::vector<int> out;
    for (int v = 0; v < node_count(); ++v)
        if (assignment[v] == block) out.push_back(v);
    return out;
}

void NodeAttributes::validate(int n) const {
    for (const auto& [name, labels] : categorical) {
        require(static_cast<int>(labels.size()) == n,
                "attribute '" + name + "' has " + std::to_string(labels.size()) +
                    " records, expected " + std::to_string(n));
        require(!real.contains(name), "duplicate attribute name '" + name + "'");
    }
    for (const auto& [name, values] : real)
        require(values.rows() == n, "attribute '" + name + "' has " +
                                        std::to_string(values.rows()) + " records, expected " +
                                        std::to_string(n));
}

const std::vector<std::string>& NodeAttributes::labels(const std::string& name) const {
    auto it = categorical.find(name);
    require(it != categorical.end(), "missing categorical attribute '" + name + "'");
    return it->second;
}

const Eigen::MatrixXd& NodeAttributes::values(const std::string& name) const {
    auto it = real.find(name);
    require(it != real.end(), "missing real attribute '" + name + "'");
    return it->second;
}

bool operator==(const NodeAttributes& a, const NodeAttributes& b) {
    if (a.categorical != b.categorical || a.real.size() != b.real.size()) return false;
    auto p = a.real.begin();
    for (auto q = b.real.begin(); q != b.real.end(); ++p, ++q) {
        if (p->first != q->first) return false;
        if (p->second.rows() != q->second.rows() || p->second.cols() != q->second.cols())
            return false;
        if (p->second != q->second) return false;
    }
    return true;
}

}  // namespace ergm
