#include <doctest.h>

#include <cmath>
#include <random>

#include "ergm/error.hpp"
#include "ergm/gof.hpp"
#include "oracle.hpp"

using namespace ergm;

namespace {

ThetaVector theta(std::initializer_list<double> v) {
    ThetaVector t(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double x : v) t(k++) = x;
    return t;
}

ModelSpec edges_model(int n) {
    ModelBuilder b(n);
    b.linear(term::Edges{}, 0);
    return b.build();
}

ModelSpec triangle_model(int n) {
    ModelBuilder b(n);
    b.linear(term::Edges{}, 0).linear(term::Triangles{}, 1);
    return b.build();
}

}  // namespace

TEST_CASE("gof summary") {
    const GofStats k3 = gof_summary(Graph::complete(3));
    CHECK(k3.degree == std::vector<std::int64_t>{0, 0, 3});
    CHECK(k3.esp == std::vector<std::int64_t>{0, 3});
    CHECK(k3.geodesic == std::vector<std::int64_t>{0, 3});
    CHECK(k3.unreachable == 0);
    CHECK(k3.triangles == 1);
    CHECK(k3.edges == 3);

    const GofStats empty = gof_summary(Graph(3));
    CHECK(empty.degree == std::vector<std::int64_t>{3});
    CHECK(empty.esp.empty());
    CHECK(empty.geodesic.empty());
    CHECK(empty.unreachable == 3);
    CHECK(empty.triangles == 0);

    const std::vector<Graph> two{Graph::complete(3), Graph::complete(3)};
    const GofStats doubled = gof_summary(two);
    CHECK(doubled.degree == std::vector<std::int64_t>{0, 0, 6});
    CHECK(doubled.esp == std::vector<std::int64_t>{0, 6});
    CHECK(doubled.geodesic == std::vector<std::int64_t>{0, 6});
    CHECK(doubled.triangles == 2);

    CHECK_THROWS_AS(gof_summary(std::span<const Graph>{}), Error);
}

TEST_CASE("gof summary agrees with term statistics") {
    std::mt19937_64 rng(14);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 4 + static_cast<int>(rng() % 8);
        const Graph g = oracle::random_graph(n, 0.35, rng);
        const auto a = oracle::adjacency(g);
        ModelBuilder b(n);
        int th = 0;
        for (int k = 0; k < n; ++k) b.linear(term::DegreeCount{k}, th++);
        for (int m = 1; m <= n - 2; ++m) b.linear(term::Esp{m}, th++);
        b.linear(term::Triangles{}, th++);
        const ModelSpec spec = b.build();
        const StatVector s = spec.stats(g);
        const GofStats gs = gof_summary(g);
        auto at = [](const std::vector<std::int64_t>& h, int k) {
            return k < static_cast<int>(h.size()) ? h[static_cast<std::size_t>(k)] : 0;
        };
        for (int k = 0; k < n; ++k) CHECK(at(gs.degree, k) == s(k));
        CHECK(at(gs.esp, 0) == oracle::esp(a, 0));
        for (int m = 1; m <= n - 2; ++m) CHECK(at(gs.esp, m) == s(n + m - 1));
        CHECK(gs.triangles == s(2 * n - 2));

        const auto dist = oracle::distances(a);
        std::vector<std::int64_t> geo(static_cast<std::size_t>(n), 0);
        std::int64_t unreachable = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                if (dist[i][j] < 0)
                    ++unreachable;
                else
                    ++geo[static_cast<std::size_t>(dist[i][j])];
            }
        for (int d = 1; d < n; ++d) CHECK(at(gs.geodesic, d) == geo[static_cast<std::size_t>(d)]);
        CHECK(gs.unreachable == unreachable);
    }
}

TEST_CASE("gof compare") {
    SUBCASE("zero draws") {
        NetworkData d{{{Graph(5), edges_model(5)}}};
        CHECK_THROWS_AS(gof_compare(d, theta({0}), 0, McmcConfig{}), Error);
    }
    SUBCASE("report layout") {
        std::mt19937_64 rng(1);
        NetworkData d{{{oracle::random_graph(8, 0.3, rng), edges_model(8)}}};
        McmcConfig cfg;
        cfg.seed = 3;
        const GofReport r = gof_compare(d, theta({-0.8}), 50, cfg);
        CHECK(r.draws == 50);
        CHECK(r.seed == 3);
        for (const auto& b : r.bins) {
            CHECK(b.lower <= b.median);
            CHECK(b.median <= b.upper);
            CHECK(b.outside == (b.observed < b.lower || b.observed > b.upper));
        }
        CHECK(r.bin(Family::geodesic, "inf").family == Family::geodesic);
        CHECK_THROWS_AS(r.bin(Family::esp, "99"), Error);
        const GofReport again = gof_compare(d, theta({-0.8}), 50, cfg);
        CHECK(again.bins.size() == r.bins.size());
        for (std::size_t k = 0; k < r.bins.size(); ++k) CHECK(again.bins[k].upper == r.bins[k].upper);
    }
    SUBCASE("Bernoulli data fit by the Bernoulli model is covered") {
        const int trials = 20;
        int covered = 0;
        for (int s = 0; s < trials; ++s) {
            const ModelSpec spec = edges_model(20);
            NetworkData d;
            for (const Graph& g : independent_sample(spec, theta({-1.4}), 2, 100 + s))
                d.networks.push_back({g, spec});
            const FitResult f = mple(d);
            McmcConfig cfg;
            cfg.seed = static_cast<std::uint64_t>(s);
            covered += !gof_compare(d, f.theta_hat, 200, cfg).bin(Family::edges, "total").outside;
        }
        MESSAGE("edge count inside the envelope in " << covered << " of " << trials);
        CHECK(covered >= 19);
    }
    SUBCASE("clustered data fit by the Bernoulli model is flagged") {
        ModelBuilder b(20);
        b.linear(term::Edges{}, 0).gwesp(1, 2);
        const ModelSpec truth = b.build();
        McmcConfig sim;
        sim.draws = 4;
        sim.interval = 5000;
        sim.seed = 8;
        const auto draws = mh_sample(truth, theta({-3.5, 1.2, 0.5}), sim);
        NetworkData d;
        for (const auto& dr : draws.draws) d.networks.push_back({dr.graph, edges_model(20)});
        const FitResult f = mple(d);
        const GofReport r = gof_compare(d, f.theta_hat, 200, McmcConfig{});
        const GofBin& tri = r.bin(Family::triangles, "total");
        MESSAGE("triangles observed " << tri.observed << ", envelope [" << tri.lower << ", "
                                      << tri.upper << "]");
        CHECK(tri.outside);
        CHECK(tri.observed > tri.upper);
    }
}

TEST_CASE("bimodality gap") {
    std::vector<double> one(100, 0.12);
    CHECK(bimodality_gap(one) == 0);
    std::vector<double> two;
    for (int k = 0; k < 60; ++k) two.push_back(0.02);
    for (int k = 0; k < 40; ++k) two.push_back(0.97);
    CHECK(bimodality_gap(two) == doctest::Approx(0.95));
    std::vector<double> plateau{0.11, 0.16, 0.11, 0.16};
    CHECK(bimodality_gap(plateau) == 0);
}

TEST_CASE("degeneracy scan") {
    const ModelSpec spec = triangle_model(30);
    McmcConfig cfg;
    cfg.draws = 2000;
    cfg.seed = 11;
    SUBCASE("Bernoulli point") {
        const std::vector<ThetaVector> grid{theta({-2, 0})};
        const ScanReport r = degeneracy_scan(spec, grid, cfg);
        REQUIRE(r.points.size() == 1);
        const ScanPoint& p = r.points.front();
        CHECK(std::abs(p.mean_density - oracle::logistic(-2)) < 3 * p.mc_se);
        // Bernoulli density sd over 435 dyads.
        const double sd = std::sqrt(oracle::logistic(-2) * (1 - oracle::logistic(-2)) / 435);
        CHECK(p.sd_density == doctest::Approx(sd).epsilon(0.1));
        CHECK(p.bimodality == 0);
    }
    SUBCASE("near-complete regime exists") {
        std::vector<ThetaVector> grid;
        for (double t2 : {0.0, 0.5, 1.0, 1.5}) grid.push_back(theta({-2, t2}));
        cfg.draws = 300;
        const ScanReport r = degeneracy_scan(spec, grid, cfg);
        REQUIRE(r.points.size() == 4);
        double best = 0;
        for (const auto& p : r.points) best = std::max(best, p.mean_density);
        CHECK(best > 0.9);
        CHECK(r.points.front().mean_density < 0.2);
    }
    SUBCASE("empty grid") {
        CHECK_THROWS_AS(degeneracy_scan(spec, std::span<const ThetaVector>{}, cfg), Error);
    }
}
