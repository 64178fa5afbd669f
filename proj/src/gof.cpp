#include "ergm/gof.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ergm/error.hpp"
#include "pooling.hpp"

namespace ergm {

namespace {

void add_into(std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (std::size_t k = 0; k < b.size(); ++k) a[k] += b[k];
}

void bump(std::vector<std::int64_t>& h, std::size_t k) {
    if (h.size() <= k) h.resize(k + 1, 0);
    ++h[k];
}

/// Type-7 sample quantile of sorted values.
double quantile(const std::vector<double>& sorted, double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double at(const std::vector<std::int64_t>& h, std::size_t k) {
    return k < h.size() ? static_cast<double>(h[k]) : 0.0;
}

}  // namespace

GofStats& GofStats::operator+=(const GofStats& o) {
    add_into(degree, o.degree);
    add_into(esp, o.esp);
    add_into(geodesic, o.geodesic);
    unreachable += o.unreachable;
    edges += o.edges;
    triangles += o.triangles;
    return *this;
}

GofStats gof_summary(const Graph& g) {
    GofStats s;
    const int n = g.node_count();
    for (int i = 0; i < n; ++i) bump(s.degree, static_cast<std::size_t>(g.degree(i)));
    std::int64_t corners = 0;
    for (const Dyad& e : g.edges()) {
        const int m = common_neighbors(g, e.i, e.j);
        bump(s.esp, static_cast<std::size_t>(m));
        corners += m;
    }
    s.edges = g.edge_count();
    s.triangles = corners / 3;
    const GeodesicHistogram geo = all_pairs_geodesics(g);
    s.geodesic = geo.counts;
    while (s.geodesic.size() > 1 && s.geodesic.back() == 0) s.geodesic.pop_back();
    if (s.geodesic.size() <= 1) s.geodesic.clear();
    s.unreachable = geo.unreachable;
    return s;
}

GofStats gof_summary(std::span<const Graph> networks) {
    require(!networks.empty(), "need at least one network");
    GofStats s;
    for (const Graph& g : networks) s += gof_summary(g);
    return s;
}

std::string to_string(Family f) {
    switch (f) {
        case Family::edges: return "edges";
        case Family::degree: return "degree";
        case Family::esp: return "esp";
        case Family::geodesic: return "geodesic";
        case Family::triangles: return "triangles";
    }
    return "unknown";
}

const GofBin& GofReport::bin(Family f, const std::string& label) const {
    for (const auto& b : bins)
        if (b.family == f && b.label == label) return b;
    fail(ErrorCode::invalid_argument, "no " + to_string(f) + " bin '" + label + "'");
}

int GofReport::outside_count() const {
    return static_cast<int>(std::count_if(bins.begin(), bins.end(),
                                          [](const GofBin& b) { return b.outside; }));
}

GofReport gof_compare(const NetworkData& observed, const ThetaVector& theta, std::int64_t draws,
                      const McmcConfig& cfg) {
    observed.validate();
    require(draws >= 1, "goodness-of-fit needs at least one simulated draw");
    cfg.validate();
    observed.networks.front().spec.check_theta(theta);

    std::vector<Graph> graphs;
    for (const auto& net : observed.networks) graphs.push_back(net.graph);
    const GofStats obs = gof_summary(graphs);

    // One chain per spec group; consecutive states fill that group's slots
    // in successive replicates.
    const auto groups = detail::group_networks(observed);
    std::vector<std::vector<GofStats>> partial(groups.size(),
                                               std::vector<GofStats>(static_cast<std::size_t>(draws)));
    parallel_for(groups.size(), cfg.threads, [&](std::size_t g) {
        const ModelSpec& spec = *groups[g].spec;
        const Graph& start =
            observed.networks[static_cast<std::size_t>(groups[g].members.front())].graph;
        Chain chain(spec, theta, start, make_stream(cfg.seed, 0x676f66, g), cfg.proposal,
                    cfg.p_tie);
        const std::int64_t d = chain.free_count();
        chain.run(cfg.burnin_for(d));
        for (std::int64_t r = 0; r < draws; ++r)
            for (std::size_t m = 0; m < groups[g].members.size(); ++m) {
                chain.run(cfg.interval_for(d));
                partial[g][static_cast<std::size_t>(r)] += gof_summary(chain.graph());
            }
    });
    std::vector<GofStats> reps(static_cast<std::size_t>(draws));
    for (std::size_t r = 0; r < reps.size(); ++r)
        for (const auto& p : partial) reps[r] += p[r];

    std::size_t max_deg = obs.degree.size(), max_esp = obs.esp.size(), max_geo = obs.geodesic.size();
    for (const auto& r : reps) {
        max_deg = std::max(max_deg, r.degree.size());
        max_esp = std::max(max_esp, r.esp.size());
        max_geo = std::max(max_geo, r.geodesic.size());
    }

    GofReport report;
    report.draws = draws;
    report.seed = cfg.seed;
    std::vector<double> sim(reps.size());
    auto add_bin = [&](Family f, std::string label, double o, auto&& value_of) {
        for (std::size_t r = 0; r < reps.size(); ++r) sim[r] = value_of(reps[r]);
        std::sort(sim.begin(), sim.end());
        GofBin b;
        b.family = f;
        b.label = std::move(label);
        b.observed = o;
        b.lower = quantile(sim, 0.025);
        b.median = quantile(sim, 0.5);
        b.upper = quantile(sim, 0.975);
        b.outside = o < b.lower || o > b.upper;
        report.bins.push_back(std::move(b));
    };
    add_bin(Family::edges, "total", static_cast<double>(obs.edges),
            [](const GofStats& s) { return static_cast<double>(s.edges); });
    for (std::size_t k = 0; k < max_deg; ++k)
        add_bin(Family::degree, std::to_string(k), at(obs.degree, k),
                [k](const GofStats& s) { return at(s.degree, k); });
    for (std::size_t m = 0; m < max_esp; ++m)
        add_bin(Family::esp, std::to_string(m), at(obs.esp, m),
                [m](const GofStats& s) { return at(s.esp, m); });
    for (std::size_t d = 1; d < max_geo; ++d)
        add_bin(Family::geodesic, std::to_string(d), at(obs.geodesic, d),
                [d](const GofStats& s) { return at(s.geodesic, d); });
    add_bin(Family::geodesic, "inf", static_cast<double>(obs.unreachable),
            [](const GofStats& s) { return static_cast<double>(s.unreachable); });
    add_bin(Family::triangles, "total", static_cast<double>(obs.triangles),
            [](const GofStats& s) { return static_cast<double>(s.triangles); });
    return report;
}

double bimodality_gap(std::span<const double> densities) {
    constexpr int kBins = 20;
    std::vector<int> h(kBins, 0);
    for (double x : densities)
        ++h[static_cast<std::size_t>(std::clamp(static_cast<int>(x * kBins), 0, kBins - 1))];
    // Local maxima; a plateau counts once, at its left end.
    std::vector<int> modes;
    for (int b = 0; b < kBins; ++b) {
        if (h[b] == 0) continue;
        const int left = b > 0 ? h[b - 1] : -1;
        int right_end = b;
        while (right_end + 1 < kBins && h[right_end + 1] == h[b]) ++right_end;
        const int right = right_end + 1 < kBins ? h[right_end + 1] : -1;
        if (h[b] > left && h[b] > right) modes.push_back(b);
    }
    if (modes.size() < 2) return 0;
    std::stable_sort(modes.begin(), modes.end(), [&](int a, int b) { return h[a] > h[b]; });
    return std::abs(modes[0] - modes[1]) / static_cast<double>(kBins);
}

ScanReport degeneracy_scan(const ModelSpec& spec, std::span<const ThetaVector> grid,
                           const McmcConfig& cfg) {
    require(!grid.empty(), "scan grid is empty");
    cfg.validate();
    for (const auto& t : grid) spec.check_theta(t);
    const int n = spec.node_count();
    const double dyads = static_cast<double>(dyad_count(n));
    ScanReport report;
    report.seed = cfg.seed;
    report.points.resize(grid.size());
    parallel_for(grid.size(), cfg.threads, [&](std::size_t k) {
        const std::uint64_t stream = 0x7363616e00000000ULL | k;
        Chain chain(spec, grid[k], Graph(n), make_stream(cfg.seed, stream), cfg.proposal,
                    cfg.p_tie);
        const std::int64_t d = chain.free_count();
        chain.run(cfg.burnin_for(d));
        Eigen::MatrixXd dens(cfg.draws, 1);
        for (std::int64_t r = 0; r < cfg.draws; ++r) {
            chain.run(cfg.interval_for(d));
            dens(r, 0) = static_cast<double>(chain.graph().edge_count()) / dyads;
        }
        ScanPoint& p = report.points[k];
        p.theta = grid[k];
        p.stream = stream;
        p.mean_density = dens.mean();
        const double n_draws = static_cast<double>(cfg.draws);
        p.sd_density = cfg.draws > 1 ? std::sqrt((dens.array() - p.mean_density).square().sum() /
                                                 (n_draws - 1))
                                     : 0.0;
        p.mc_se = cfg.draws > 1 ? std::sqrt(std::max(0.0, batch_means_covariance(dens)(0, 0))) : 0.0;
        p.bimodality = bimodality_gap(std::span<const double>(dens.data(), dens.size()));
    });
    return report;
}

}  // namespace ergm
