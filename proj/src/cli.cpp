#include "ergm/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ergm/config.hpp"
#include "ergm/error.hpp"
#include "ergm/exact.hpp"
#include "ergm/gof.hpp"
#include "ergm/io.hpp"
#include "ergm/missing.hpp"

namespace ergm::cli {

namespace {

struct Common {
    std::uint64_t seed = McmcConfig{}.seed;
    int threads = 0;
    std::int64_t draws = -1;
    std::int64_t burnin = -1;
    std::int64_t interval = -1;
    std::string out;

    McmcConfig mcmc(std::int64_t default_draws) const {
        McmcConfig c;
        c.seed = seed;
        c.threads = threads;
        c.draws = draws > 0 ? draws : default_draws;
        c.burnin = burnin;
        c.interval = interval;
        c.validate();
        return c;
    }
};

void add_common(CLI::App* app, Common& c, bool with_chain = true) {
    app->add_option("--seed", c.seed, "random seed");
    app->add_option("--threads", c.threads, "worker threads (0 = all cores)");
    app->add_option("--out", c.out, "output file (default: standard output)");
    if (!with_chain) return;
    app->add_option("--draws", c.draws, "retained draws");
    app->add_option("--burnin", c.burnin, "burn-in steps (default 10 x dyads)");
    app->add_option("--interval", c.interval, "steps between draws (default dyads)");
}

ThetaVector to_theta(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::istringstream open(const std::string& path) { return std::istringstream(read_file(path)); }

NodeAttributes load_attributes(const std::string& path) {
    if (path.empty()) return {};
    auto in = open(path);
    return read_attributes(in);
}

NetworkData load_networks(const std::string& graphs, const std::string& model,
                          const std::string& attributes) {
    const ModelConfig cfg = parse_model_config(read_file(model));
    const NodeAttributes attrs = load_attributes(attributes);
    auto in = open(graphs);
    NetworkData data;
    for (Graph& g : read_graphs(in)) {
        const int n = g.node_count();
        data.networks.push_back({std::move(g), cfg.instantiate(n, attrs)});
    }
    data.validate();
    return data;
}

/// Writes to --out when given, otherwise to the command's stream.
void emit(const Common& c, std::ostream& out, const std::string& text) {
    if (c.out.empty())
        out << text;
    else
        write_file(c.out, text);
}

Method parse_method(const std::string& s) {
    if (s == "mple") return Method::mple;
    if (s == "mcmle") return Method::mcmle;
    if (s == "sa") return Method::stochastic_approx;
    if (s == "exact") return Method::exact;
    fail(ErrorCode::invalid_argument, "unknown method '" + s + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exponential-family random graph models: fit, simulate, check."};
    app.require_subcommand(1);
    Common common;

    std::string graphs, model, attributes, mask_path, method = "mcmle", report_path, grid_path,
                                                      design;
    std::vector<double> theta, theta0, inclusion{1.0};
    int n = 0, waves = 0, blocks = 0, block_size = 0;
    double q = 0;
    bool stats_only = false, moments = false, mle = false, normalizer = false;

    auto* fit = app.add_subcommand("fit", "estimate parameters from observed networks");
    fit->add_option("--graphs", graphs, "graph file")->required();
    fit->add_option("--model", model, "model config")->required();
    fit->add_option("--attributes", attributes, "node attribute file");
    fit->add_option("--mask", mask_path, "mask of unobserved dyads");
    fit->add_option("--method", method, "mple | mcmle | sa | exact")
        ->check(CLI::IsMember({"mple", "mcmle", "sa", "exact"}));
    fit->add_option("--theta0", theta0, "starting values")->delimiter(',');
    fit->add_option("--report", report_path, "write the key/value fit report here");
    add_common(fit, common);

    auto* sim = app.add_subcommand("simulate", "draw networks from a model");
    sim->add_option("--model", model, "model config")->required();
    sim->add_option("--n", n, "node count")->required();
    sim->add_option("--theta", theta, "parameter values")->delimiter(',')->required();
    sim->add_option("--attributes", attributes, "node attribute file");
    sim->add_flag("--stats-only", stats_only, "write statistic rows instead of graphs");
    add_common(sim, common);

    auto* gof = app.add_subcommand("gof", "goodness-of-fit envelopes at a fitted theta");
    gof->add_option("--graphs", graphs, "graph file")->required();
    gof->add_option("--model", model, "model config")->required();
    gof->add_option("--fit-report", report_path, "report written by fit --report")->required();
    gof->add_option("--attributes", attributes, "node attribute file");
    add_common(gof, common);

    auto* en = app.add_subcommand("enumerate", "exact computations by enumeration");
    en->add_option("--model", model, "model config")->required();
    en->add_option("--n", n, "node count");
    en->add_option("--theta", theta, "parameter values")->delimiter(',');
    en->add_option("--graphs", graphs, "graph file (for --mle)");
    en->add_option("--attributes", attributes, "node attribute file");
    auto* f_mom = en->add_flag("--moments", moments, "means and variances of the statistics");
    auto* f_mle = en->add_flag("--mle", mle, "exact maximum likelihood");
    auto* f_norm = en->add_flag("--normalizer", normalizer, "log normalizing constant");
    f_mom->excludes(f_mle)->excludes(f_norm);
    f_mle->excludes(f_norm);
    add_common(en, common, false);

    auto* scan = app.add_subcommand("scan", "long-run density summaries over a theta grid");
    scan->add_option("--model", model, "model config")->required();
    scan->add_option("--n", n, "node count")->required();
    scan->add_option("--grid", grid_path, "one theta vector per line")->required();
    add_common(scan, common);

    auto* mk = app.add_subcommand("mask", "generate observation masks");
    mk->add_option("--design", design, "ego | trace | subgraph | mar")
        ->required()
        ->check(CLI::IsMember({"ego", "trace", "subgraph", "mar"}));
    mk->add_option("--graphs", graphs, "graph file (ego, trace)");
    mk->add_option("--n", n, "node count (mar)");
    mk->add_option("--blocks", blocks, "number of equal blocks (subgraph)");
    mk->add_option("--block-size", block_size, "nodes per block (subgraph)");
    mk->add_option("--inclusion", inclusion, "inclusion probabilities")->delimiter(',');
    mk->add_option("--waves", waves, "link-tracing waves");
    mk->add_option("--q", q, "probability a dyad is unobserved (mar)");
    add_common(mk, common, false);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << to_token(ErrorCode::parse_error) << ": " << e.what() << "\n";
        return 2;
    }

    try {
        std::ostringstream text;
        if (fit->parsed()) {
            const NetworkData data = load_networks(graphs, model, attributes);
            const McmcConfig cfg = common.mcmc(1000);
            FitResult f;
            if (!mask_path.empty()) {
                std::vector<int> sizes;
                for (const auto& net : data.networks) sizes.push_back(net.graph.node_count());
                auto in = open(mask_path);
                MaskFile mf = read_masks(in, sizes);
                IncompleteData d{data, std::move(mf.masks), mf.ignorable};
                const ThetaVector t0 =
                    theta0.empty() ? ThetaVector::Zero(data.param_dim()) : to_theta(theta0);
                f = incomplete_fit(d, t0, cfg);
            } else {
                FitOptions opt;
                opt.method = parse_method(method);
                if (!theta0.empty()) opt.theta0 = to_theta(theta0);
                f = fit_pooled(data, cfg, opt);
            }
            write_parameter_table(text, f);
            emit(common, out, text.str());
            if (!report_path.empty()) {
                std::ostringstream r;
                write_report(r, fit_report(f));
                write_file(report_path, r.str());
            }
        } else if (sim->parsed()) {
            const ModelSpec spec =
                parse_model_config(read_file(model)).instantiate(n, load_attributes(attributes));
            const McmcConfig cfg = common.mcmc(1000);
            const SampleRun run = mh_sample(spec, to_theta(theta), cfg);
            if (stats_only) {
                for (const auto& d : run.draws) {
                    for (Eigen::Index c = 0; c < d.stats.size(); ++c)
                        text << (c ? "\t" : "") << format_display(d.stats(c));
                    text << "\n";
                }
            } else {
                std::vector<Graph> gs;
                for (const auto& d : run.draws) gs.push_back(d.graph);
                write_graphs(text, gs);
            }
            emit(common, out, text.str());
        } else if (gof->parsed()) {
            const NetworkData data = load_networks(graphs, model, attributes);
            auto in = open(report_path);
            const FitResult f = fit_from_report(read_report(in));
            // Reuse the fit's chain settings unless overridden.
            McmcConfig cfg = f.config;
            if (!gof->get_option("--seed")->empty()) cfg.seed = common.seed;
            cfg.threads = common.threads;
            if (common.burnin >= 0) cfg.burnin = common.burnin;
            if (common.interval > 0) cfg.interval = common.interval;
            const GofReport r = gof_compare(data, f.theta_hat, common.draws > 0 ? common.draws : 100, cfg);
            text << "family\tbin\tobserved\tlower\tmedian\tupper\toutside\n";
            for (const auto& b : r.bins)
                text << to_string(b.family) << "\t" << b.label << "\t" << format_display(b.observed)
                     << "\t" << format_display(b.lower) << "\t" << format_display(b.median) << "\t"
                     << format_display(b.upper) << "\t" << (b.outside ? "yes" : "no") << "\n";
            emit(common, out, text.str());
        } else if (en->parsed()) {
            const ModelConfig mc = parse_model_config(read_file(model));
            const NodeAttributes attrs = load_attributes(attributes);
            Report r;
            if (mle) {
                require(!graphs.empty(), "--mle needs --graphs");
                const NetworkData data = load_networks(graphs, model, attributes);
                const FitResult f = exact_fit(data);
                for (Eigen::Index k = 0; k < f.theta_hat.size(); ++k) {
                    const auto& name = f.param_names[static_cast<std::size_t>(k)];
                    r.emplace_back("theta_" + name, format_display(f.theta_hat(k)));
                    r.emplace_back("se_" + name, format_display(f.std_errors(k)));
                }
            } else {
                require(n >= 1, "--n is required");
                require(!theta.empty(), "--theta is required");
                const ModelSpec spec = mc.instantiate(n, attrs);
                const ThetaVector t = to_theta(theta);
                if (normalizer || !moments) r.emplace_back("log_normalizer", format_display(log_normalizer(spec, t)));
                if (moments) {
                    const ExactMoments m = exact_moments(spec, t);
                    const auto& terms = spec.terms().terms();
                    for (std::size_t c = 0; c < terms.size(); ++c)
                        r.emplace_back("mean_" + term_label(terms[c]),
                                       format_display(m.mean(static_cast<Eigen::Index>(c))));
                    for (std::size_t c = 0; c < terms.size(); ++c)
                        r.emplace_back("var_" + term_label(terms[c]),
                                       format_display(m.covariance(static_cast<Eigen::Index>(c),
                                                                  static_cast<Eigen::Index>(c))));
                }
            }
            write_report(text, r);
            emit(common, out, text.str());
        } else if (scan->parsed()) {
            const ModelSpec spec = parse_model_config(read_file(model)).instantiate(n);
            auto in = open(grid_path);
            const std::vector<ThetaVector> grid = read_grid(in);
            const ScanReport r = degeneracy_scan(spec, grid, common.mcmc(1000));
            for (int k = 0; k < spec.param_dim(); ++k) text << "theta" << k + 1 << "\t";
            text << "mean_density\tsd_density\tmc_se\tbimodality\n";
            for (const auto& p : r.points) {
                for (Eigen::Index k = 0; k < p.theta.size(); ++k) text << format_display(p.theta(k)) << "\t";
                text << format_display(p.mean_density) << "\t" << format_display(p.sd_density) << "\t"
                     << format_display(p.mc_se) << "\t" << format_display(p.bimodality) << "\n";
            }
            emit(common, out, text.str());
        } else if (mk->parsed()) {
            DesignParams p;
            p.inclusion = inclusion;
            p.waves = waves;
            p.q = q;
            MaskFile mf;
            mf.design = design;
            if (design == "mar") {
                require(n >= 1, "--n is required for mar");
                p.kind = Design::mar;
                mf.masks.push_back(mar_mask(n, q, common.seed));
            } else if (design == "subgraph") {
                require(blocks >= 1 && block_size >= 1, "--blocks and --block-size are required");
                p.kind = Design::subgraph;
                mf.masks.push_back(subgraph_sample(BlockStructure::equal_blocks(blocks, block_size), p, common.seed));
            } else {
                require(!graphs.empty(), "--graphs is required for " + design);
                p.kind = design == "ego" ? Design::ego : Design::link_trace;
                auto in = open(graphs);
                const std::vector<Graph> gs = read_graphs(in);
                for (std::size_t k = 0; k < gs.size(); ++k)
                    mf.masks.push_back(p.kind == Design::ego ? ego_sample(gs[k], p, common.seed + k)
                                                             : link_trace(gs[k], p, common.seed + k));
            }
            write_masks(text, mf);
            emit(common, out, text.str());
        }
        return 0;
    } catch (const Error& e) {
        err << e.token() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << to_token(ErrorCode::invalid_argument) << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ergm::cli
