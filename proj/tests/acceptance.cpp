// End-to-end checks of the estimators against exact enumeration, known
// asymptotics and simulation. `acceptance <name>` runs one check, `acceptance`
// runs all; each prints PASS or FAIL with the numbers behind it.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ergm/config.hpp"
#include "ergm/error.hpp"
#include "ergm/estimate.hpp"
#include "ergm/exact.hpp"
#include "ergm/gof.hpp"
#include "ergm/missing.hpp"
#include "oracle.hpp"
#include "stat_tests.hpp"

using namespace ergm;

namespace {

ThetaVector theta(std::initializer_list<double> v) {
    ThetaVector t(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double x : v) t(k++) = x;
    return t;
}

Graph graph_of(int n, std::uint64_t mask) { return oracle::to_graph(oracle::from_mask(n, mask)); }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

ModelSpec triangle_model(int n) {
    ModelBuilder b(n);
    b.linear(term::Edges{}, 0).linear(term::Triangles{}, 1);
    return b.build();
}

ModelSpec gwesp_model(int n) {
    ModelBuilder b(n);
    b.linear(term::Edges{}, 0).gwesp(1, 2);
    return b.build();
}

/// Edges plus a random mix of other terms, with theta drawn to match.
ModelSpec random_model(int n, std::mt19937_64& rng, ThetaVector& t) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> th{u(rng)};
    ModelBuilder b(n);
    b.linear(term::Edges{}, 0);
    auto coin = [&] { return std::bernoulli_distribution(0.5)(rng); };
    auto add = [&](TermKind k) {
        b.linear(std::move(k), static_cast<int>(th.size()));
        th.push_back(0.5 * u(rng));
    };
    if (coin()) add(term::Triangles{});
    if (coin()) add(term::TwoPaths{});
    if (coin()) add(term::DegreeCount{std::uniform_int_distribution<int>(0, n - 1)(rng)});
    if (n >= 4 && coin()) {
        const int base = static_cast<int>(th.size());
        b.gwesp(base, base + 1);
        th.push_back(0.5 * u(rng));
        th.push_back(0.1 + std::uniform_real_distribution<double>(0, 2)(rng));
    } else if (n >= 3 && coin()) {
        add(term::Esp{1});
    }
    if (coin()) b.offset(term::Offset::sparse(n));
    t = Eigen::Map<ThetaVector>(th.data(), static_cast<Eigen::Index>(th.size()));
    return b.build();
}

struct Outcome {
    bool pass = false;
    double budget = 0;  // seconds
};

// --- checks ----------------------------------------------------------------

Outcome normalization() {
    std::mt19937_64 rng(101);
    double worst = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 2 + rep % 4;
        ThetaVector t;
        const ModelSpec spec = random_model(n, rng, t);
        const double psi = log_normalizer(spec, t);
        const int dyads = n * (n - 1) / 2;
        double total = 0;
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << dyads); ++m)
            total += std::exp(log_weight(spec, t, graph_of(n, m)) - psi);
        worst = std::max(worst, std::abs(total - 1));
    }
    std::printf("  50 models on 2..5 nodes, max |sum P - 1| = %.3g (tolerance 1e-12)\n", worst);
    return {worst <= 1e-12, 10};
}

Outcome mean_value() {
    std::mt19937_64 rng(202);
    double canonical = 0, curved = 0;
    int fitted_canonical = 0, fitted_curved = 0;
    std::vector<ModelSpec> canon;
    {
        ModelBuilder a(5), b(5), c(5);
        a.linear(term::Edges{}, 0).linear(term::Triangles{}, 1);
        b.linear(term::Edges{}, 0).linear(term::TwoPaths{}, 1);
        c.linear(term::Edges{}, 0).linear(term::DegreeCount{2}, 1).linear(term::Triangles{}, 2);
        canon = {a.build(), b.build(), c.build()};
    }
    for (const ModelSpec& spec : canon) {
        const ExactModel model(spec);
        for (int found = 0, tries = 0; found < 10 && tries < 500; ++tries) {
            const Graph y = oracle::random_graph(5, 0.5, rng);
            try {
                const ExactFit f = exact_mle(spec, y);
                const ExactMoments mo = model.moments(f.theta);
                canonical = std::max(canonical, (mo.mean - spec.stats(y)).cwiseAbs().maxCoeff());
                ++found;
                ++fitted_canonical;
            } catch (const Error&) {
            }
        }
    }
    const ModelSpec spec = gwesp_model(6);
    const ExactModel model(spec);
    for (int tries = 0; fitted_curved < 10 && tries < 500; ++tries) {
        const Graph y = oracle::random_graph(6, 0.55, rng);
        try {
            const ExactFit f = exact_mle(spec, y);
            const ExactMoments mo = model.moments(f.theta);
            const Eigen::VectorXd score = spec.jacobian(f.theta).transpose() * (spec.stats(y) - mo.mean);
            curved = std::max(curved, score.cwiseAbs().maxCoeff());
            ++fitted_curved;
        } catch (const Error&) {
        }
    }
    std::printf("  canonical n=5: %d fits, max |E[s] - s(y)| = %.3g (tolerance 1e-6)\n",
                fitted_canonical, canonical);
    std::printf("  curved GWESP n=6: %d fits, max |J'(s(y) - E[s])| = %.3g (tolerance 1e-6)\n",
                fitted_curved, curved);
    return {fitted_canonical == 30 && fitted_curved == 10 && canonical < 1e-6 && curved < 1e-6, 60};
}

Outcome gwesp_algebra() {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> base(-3, 3), decay(0.01, 3);
    std::uniform_int_distribution<int> pick(2, 58);
    const int n = 60;
    ModelBuilder b(n);
    b.gwesp(0, 1);
    const ModelSpec spec = b.build();
    double worst = 0;
    int decreasing = 0, positive = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const ThetaVector t = theta({base(rng), decay(rng)});
        const EtaVector e = eta(spec, t);
        const int m = pick(rng);
        const double added = t(0) * std::pow(1 - std::exp(-t(1)), m - 1);
        worst = std::max(worst, std::abs(e(m - 1) - e(m - 2) - added));
        if (t(0) > 0) {
            ++positive;
            bool ok = true;
            for (int k = 2; k <= n - 2; ++k)
                ok = ok && gwesp_added_value(t(0), t(1), k) < gwesp_added_value(t(0), t(1), k - 1);
            decreasing += ok;
        }
    }
    std::printf("  max telescoping error %.3g (tolerance 1e-12); strictly decreasing added values "
                "in %d/%d draws with positive base\n",
                worst, decreasing, positive);
    return {worst <= 1e-12 && decreasing == positive, 1};
}

Outcome mcmle_vs_exact() {
    struct Case {
        const char* name;
        ModelSpec spec;
        ThetaVector truth;
    };
    const std::vector<Case> cases{{"edges+triangles", triangle_model(6), theta({-1, 0.3})},
                                  {"edges+gwesp", gwesp_model(6), theta({-1, 0.5, 0.5})}};
    bool pass = true;
    for (const Case& c : cases) {
        int close = 0;
        double worst = 0;
        for (int seed = 0; seed < 20; ++seed) {
            // Ten pooled networks whose exact MLE exists.
            NetworkData data;
            FitResult exact;
            for (std::uint64_t sub = 0;; ++sub) {
                McmcConfig sim;
                sim.draws = 10;
                sim.interval = 200;
                sim.seed = 5000 + 100 * static_cast<std::uint64_t>(seed) + sub;
                data.networks.clear();
                for (const Draw& d : mh_sample(c.spec, c.truth, sim).draws)
                    data.networks.push_back({d.graph, c.spec});
                try {
                    exact = exact_fit(data);
                    break;
                } catch (const Error&) {
                }
            }
            McmcConfig cfg;
            cfg.draws = 20000;
            cfg.seed = 17 + static_cast<std::uint64_t>(seed);
            double err = INFINITY;
            try {
                const FitResult f = fit_pooled(data, cfg);
                err = (f.theta_hat - exact.theta_hat).cwiseAbs().maxCoeff();
            } catch (const Error& e) {
                std::printf("  %s seed %d: %s\n", c.name, seed, e.what());
            }
            worst = std::max(worst, err);
            close += err <= 0.05;
        }
        std::printf("  %s: %d/20 runs within 0.05 of the exact MLE (worst %.4f)\n", c.name, close,
                    worst);
        pass = pass && close >= 18;
    }
    return {pass, 300};
}

Outcome sampler_stationarity() {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> u(-1, 1);
    ModelBuilder b(4);
    b.linear(term::Edges{}, 0).linear(term::Triangles{}, 1).linear(term::TwoPaths{}, 2);
    const ModelSpec spec = b.build();
    const ThetaVector t = theta({u(rng), u(rng), 0.3 * u(rng)});
    const double psi = log_normalizer(spec, t);
    std::vector<double> probs(64);
    for (std::uint64_t m = 0; m < 64; ++m) probs[m] = std::exp(log_weight(spec, t, graph_of(4, m)) - psi);

    // 10^6 proposals; the state is recorded every 50.
    Chain chain(spec, t, Graph(4), make_stream(505, 0));
    std::vector<double> counts(64, 0.0);
    for (int k = 0; k < 20000; ++k) {
        chain.run(50);
        std::uint64_t state = 0;
        int bit = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j, ++bit)
                if (chain.graph().has_edge(i, j)) state |= std::uint64_t{1} << bit;
        counts[state] += 1;
    }
    const double x2 = stat_tests::pearson(counts, probs);
    const double pval = stat_tests::chi_square_sf(x2, 63);
    std::printf("  theta = (%.4f, %.4f, %.4f), chi-square %.2f on 63 df, p = %.4f (need > 0.001)\n",
                t(0), t(1), t(2), x2, pval);
    return {pval > 0.001, 60};
}

Outcome incomplete_exact() {
    std::mt19937_64 rng(606);
    double worst = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 3 + rep % 3;
        const int dyads = n * (n - 1) / 2;
        ThetaVector t;
        const ModelSpec spec = random_model(n, rng, t);
        const Graph y = oracle::random_graph(n, 0.5, rng);
        ObservationMask mask = ObservationMask::full(n);
        std::vector<Dyad> all;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) all.push_back({i, j});
        std::shuffle(all.begin(), all.end(), rng);
        const int hidden = std::uniform_int_distribution<int>(1, std::min(8, dyads - 1))(rng);
        for (int k = 0; k < hidden; ++k) mask.set_observed(all[static_cast<std::size_t>(k)], false);

        // Brute force: completions compatible with the observed dyads over all graphs.
        double lo_all = -INFINITY, lo_obs = -INFINITY;
        auto lse = [](double a, double b) {
            const double m = std::max(a, b);
            return m == -INFINITY ? m : m + std::log(std::exp(a - m) + std::exp(b - m));
        };
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << dyads); ++m) {
            const Graph g = graph_of(n, m);
            const double w = log_weight(spec, t, g);
            lo_all = lse(lo_all, w);
            bool compatible = true;
            for (int i = 0; i < n && compatible; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (mask.observed(i, j) && g.has_edge(i, j) != y.has_edge(i, j)) {
                        compatible = false;
                        break;
                    }
            if (compatible) lo_obs = lse(lo_obs, w);
        }
        IncompleteData d;
        d.data.networks.push_back({y, spec});
        d.masks.push_back(mask);
        worst = std::max(worst, std::abs(incomplete_loglik(d, t) - (lo_obs - lo_all)));
    }

    // Edge 1-2 present, 2-3 unobserved, 1-3 absent, edges-only model.
    IncompleteData d;
    ModelBuilder b(3);
    b.linear(term::Edges{}, 0);
    std::vector<Dyad> e{{0, 1}};
    d.data.networks.push_back({Graph::from_edges(3, e), b.build()});
    ObservationMask m = ObservationMask::full(3);
    m.set_observed({1, 2}, false);
    d.masks.push_back(m);
    const double t3 = incomplete_fit(d, theta({0.7}), McmcConfig{}).theta_hat(0);
    std::printf("  50 instances, max |objective - brute force| = %.3g (tolerance 1e-10)\n", worst);
    std::printf("  three-node example: theta_hat = %.3g (target 0, tolerance 1e-6)\n", t3);
    return {worst <= 1e-10 && std::abs(t3) <= 1e-6, 60};
}

Outcome sparse_bernoulli() {
    const int n = 200, reps = 1000;
    const double truth = 1;
    ModelBuilder b(n);
    b.linear(term::Edges{}, 0).offset(term::Offset::sparse(n));
    const ModelSpec spec = b.build();
    const std::vector<Graph> draws = independent_sample(spec, theta({truth}), reps, 707);
    std::vector<double> z;
    z.reserve(reps);
    for (const Graph& g : draws) {
        NetworkData data{{{g, spec}}};
        z.push_back(std::sqrt(n) * (mple(data).theta_hat(0) - truth));
    }
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / reps;
    double var = 0;
    for (double v : z) var += (v - mean) * (v - mean);
    var /= reps - 1;
    const double target = std::exp(-1.0);
    const double rel = std::abs(var / target - 1);
    const double ad = stat_tests::anderson_darling_normal(z);
    // Fisher information of the edge parameter for an undirected graph.
    const double p = 1 / (1 + n * std::exp(-truth));
    const double predicted = n / (0.5 * n * (n - 1) * p * (1 - p));
    std::printf("  var of sqrt(n)(theta_hat - theta) = %.4f, target exp(-1) = %.5f, relative "
                "error %.3f (tolerance 0.15)\n",
                var, target, rel);
    std::printf("  Anderson-Darling A*^2 = %.3f (reject above %.3f)\n", ad,
                stat_tests::kAndersonDarlingCritical01);
    std::printf("  note: with n(n-1)/2 dyads the inverse information gives n var = %.4f, about "
                "2 exp(-1); exp(-1) is the value for n(n-1) ordered pairs\n",
                predicted);
    return {rel <= 0.15 && ad <= stat_tests::kAndersonDarlingCritical01, 120};
}

Outcome brain_recovery() {
    const int K = 108, n = 56;
    const ModelSpec spec = preset_brain13().instantiate(n);
    ThetaVector truth = ThetaVector::Zero(13);
    truth << -4.972, 0, 0, 0, 0, 0, 0, 0, -0.091, 0.198, 0.305, 1.061, 1.565;
    const std::vector<int> reported{0, 8, 9, 10, 11, 12};
    const std::vector<double> reported_se{0.560, 0.033, 0.024, 0.022, 0.018, 0.028};

    int recovered = 0, high_degree = 0, nonexistent = 0;
    double edges = 0;
    for (int seed = 0; seed < 20; ++seed) {
        McmcConfig sim;
        sim.draws = K;
        sim.seed = 800 + static_cast<std::uint64_t>(seed);
        NetworkData data;
        for (const Draw& d : mh_sample(spec, truth, sim).draws) {
            data.networks.push_back({d.graph, spec});
            edges += static_cast<double>(d.graph.edge_count()) / (20.0 * K);
            for (int i = 0; i < n; ++i)
                if (d.graph.degree(i) >= 7) {
                    ++high_degree;
                    break;
                }
        }
        McmcConfig cfg;
        cfg.draws = 1000;
        cfg.seed = 900 + static_cast<std::uint64_t>(seed);
        FitOptions opt;
        opt.mcmle.max_iterations = 20;
        try {
            const FitResult f = fit_pooled(data, cfg, opt);
            bool ok = f.diagnostics.converged;
            for (std::size_t r = 0; r < reported.size(); ++r)
                ok = ok && std::abs(f.theta_hat(reported[r]) - truth(reported[r])) <=
                               3 * reported_se[r];
            recovered += ok;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::mle_nonexistent)
                ++nonexistent;
            else
                std::printf("  seed %d: %s: %s\n", seed, std::string(e.token()).c_str(), e.what());
        }
    }
    std::printf("  mean edges per simulated network %.2f; networks with a node of degree >= 7: "
                "%d of %d\n",
                edges, high_degree, 20 * K);
    if (high_degree == 0)
        std::printf("  degree counts 0..6 then sum to n in every network, so the observed "
                    "statistics sit on the boundary of their convex hull and the MLE does not "
                    "exist\n");
    std::printf("  fits reporting mle-nonexistent: %d/20; recovered within 3 reported SEs: %d/20 "
                "(need 17)\n",
                nonexistent, recovered);
    std::printf("  sampled-network and node-subsampling monotonicity: not evaluable without "
                "an MLE\n");
    return {recovered >= 17, 1800};
}

Outcome block_consistency() {
    const ModelSpec spec = gwesp_model(10);
    const ThetaVector truth = theta({-2, 0.4, 0.7});
    std::vector<double> medians;
    for (int K : {4, 16, 64}) {
        std::vector<double> errors;
        int failed = 0;
        for (int seed = 0; seed < 20; ++seed) {
            // Dependence confined to blocks: K independent ten-node networks.
            McmcConfig sim;
            sim.draws = K;
            sim.interval = 500;
            sim.seed = 9000 + 100 * static_cast<std::uint64_t>(K) + static_cast<std::uint64_t>(seed);
            NetworkData data;
            for (const Draw& d : mh_sample(spec, truth, sim).draws) data.networks.push_back({d.graph, spec});
            McmcConfig cfg;
            cfg.draws = 2000;
            cfg.seed = 31 + static_cast<std::uint64_t>(seed);
            try {
                errors.push_back((fit_pooled(data, cfg).theta_hat - truth).norm());
            } catch (const Error&) {
                errors.push_back(INFINITY);
                ++failed;
            }
        }
        medians.push_back(median(errors));
        std::printf("  K = %2d blocks: median l2 error %.4f (%d fits failed, counted as infinite)\n",
                    K, medians.back(), failed);
    }
    return {medians[0] > medians[1] && medians[1] > medians[2], 900};
}

Outcome degeneracy_map() {
    const ModelSpec spec = triangle_model(30);
    std::vector<ThetaVector> grid;
    for (int k = 0; k <= 15; ++k) grid.push_back(theta({-2, 0.1 * k}));
    McmcConfig cfg;
    cfg.draws = 2000;
    cfg.seed = 1010;
    const ScanReport scan = degeneracy_scan(spec, grid, cfg);
    const ScanPoint& first = scan.points.front();
    const double bernoulli = oracle::logistic(-2);
    const bool calibrated = std::abs(first.mean_density - bernoulli) <= 3 * first.mc_se;
    double top = 0, gap = 0, jump = 0;
    for (std::size_t k = 0; k < scan.points.size(); ++k) {
        const ScanPoint& p = scan.points[k];
        std::printf("  theta2 = %.1f: density %.4f (sd %.4f, MC se %.4f), bimodality %.2f\n",
                    p.theta(1), p.mean_density, p.sd_density, p.mc_se, p.bimodality);
        top = std::max(top, p.mean_density);
        gap = std::max(gap, p.bimodality);
        if (k) jump = std::max(jump, std::abs(p.mean_density - scan.points[k - 1].mean_density));
    }
    std::printf("  at theta2 = 0: |%.5f - %.5f| vs 3 MC se = %.5f; max density %.4f; max "
                "bimodality %.2f; max adjacent jump %.4f\n",
                first.mean_density, bernoulli, 3 * first.mc_se, top, gap, jump);
    return {calibrated && top > 0.9 && (gap > 0.5 || jump > 0.5), 600};
}

Outcome mple_caveat() {
    const ModelSpec spec = triangle_model(6);
    std::vector<Dyad> e{{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {2, 3}, {1, 3}};
    const NetworkData transitive{{{Graph::from_edges(6, e), spec}}};
    const double gap = std::abs(mple(transitive).theta_hat(1) - exact_fit(transitive).theta_hat(1));
    const double tolerance = NewtonOptions{}.gradient_tolerance;

    std::mt19937_64 rng(1111);
    NodeAttributes attrs;
    attrs.categorical["group"] = {"a", "a", "b", "b", "a", "b"};
    ModelBuilder b(6, attrs);
    b.linear(term::Edges{}, 0).linear(term::NodeMatch{"group"}, 1);
    const ModelSpec indep = b.build();
    double worst = 0;
    int fitted = 0;
    for (int tries = 0; fitted < 10 && tries < 200; ++tries) {
        const NetworkData data{{{oracle::random_graph(6, 0.4, rng), indep}}};
        try {
            const ThetaVector ex = exact_fit(data).theta_hat;
            worst = std::max(worst, (mple(data).theta_hat - ex).cwiseAbs().maxCoeff());
            ++fitted;
        } catch (const Error&) {
        }
    }
    std::printf("  transitive n=6: |mple - mle| on the triangle coefficient = %.4f (must exceed "
                "%.1e)\n",
                gap, 10 * tolerance);
    std::printf("  dyad-independent: %d fits, max |mple - mle| = %.3g (tolerance 1e-6)\n", fitted,
                worst);
    return {gap > 10 * tolerance && fitted == 10 && worst <= 1e-6, 60};
}

struct Check {
    const char* name;
    std::function<Outcome()> run;
};

const std::vector<Check>& checks() {
    static const std::vector<Check> all{
        {"normalization", normalization},
        {"mean_value", mean_value},
        {"gwesp_algebra", gwesp_algebra},
        {"mcmle_vs_exact", mcmle_vs_exact},
        {"sampler_stationarity", sampler_stationarity},
        {"incomplete_exact", incomplete_exact},
        {"sparse_bernoulli", sparse_bernoulli},
        {"brain_recovery", brain_recovery},
        {"block_consistency", block_consistency},
        {"degeneracy_map", degeneracy_map},
        {"mple_caveat", mple_caveat},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string only = argc > 1 ? argv[1] : "";
    int failures = 0, ran = 0;
    for (const Check& c : checks()) {
        if (!only.empty() && only != c.name) continue;
        ++ran;
        std::printf("%s\n", c.name);
        std::fflush(stdout);
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            std::printf("  error: %s\n", e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= o.budget;
        std::printf("  runtime %.1f s (budget %.0f s)\n", secs, o.budget);
        const bool pass = o.pass && in_time;
        std::printf("%s: %s\n", c.name, pass ? "PASS" : "FAIL");
        std::fflush(stdout);
        failures += !pass;
    }
    if (ran == 0) {
        std::fprintf(stderr, "unknown check '%s'\n", only.c_str());
        return 2;
    }
    return failures ? 1 : 0;
}
