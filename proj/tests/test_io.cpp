#include <doctest.h>

#include <random>
#include <sstream>

#include "ergm/config.hpp"
#include "ergm/error.hpp"
#include "ergm/io.hpp"
#include "ergm/missing.hpp"
#include "oracle.hpp"

using namespace ergm;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("doubles round-trip through text") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(0, 1e3);
    for (int k = 0; k < 1000; ++k) {
        const double x = z(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(parse_double(format_double(x)) == x);
    }
    CHECK(std::isnan(parse_double(format_double(std::nan("")))));
    CHECK(format_display(1.4999999999999996) == "1.5");
    CHECK(code_of([] { parse_double("1.5x"); }) == ErrorCode::parse_error);
}

TEST_CASE("graph files") {
    std::mt19937_64 rng(2);
    std::vector<Graph> gs;
    for (int k = 0; k < 5; ++k) gs.push_back(oracle::random_graph(3 + k * 4, 0.3, rng));
    gs.push_back(Graph(1));
    std::ostringstream out;
    write_graphs(out, gs);
    std::istringstream in(out.str());
    CHECK(read_graphs(in) == gs);

    SUBCASE("comments, duplicates, reversed pairs") {
        std::istringstream text("# a triangle\nn 3\n1 2\n2 1 # again\n3 2\n\n1 3\n");
        const auto g = read_graphs(text);
        REQUIRE(g.size() == 1);
        CHECK(g.front() == Graph::complete(3));
    }
    SUBCASE("errors") {
        for (const char* bad : {"1 2\n", "n 3\n1 4\n", "n 3\n2 2\n", "n 3\n1 2 3\n", "n x\n", "",
                                "n 3\n---\n1 2\n"}) {
            std::istringstream text(bad);
            CHECK(code_of([&] { read_graphs(text); }) == ErrorCode::parse_error);
        }
    }
}

TEST_CASE("mask files") {
    std::mt19937_64 rng(3);
    MaskFile f;
    f.design = "mar";
    f.ignorable = true;
    const std::vector<int> sizes{6, 9, 4};
    for (int n : sizes) f.masks.push_back(mar_mask(n, 0.3, rng()));
    f.masks[2] = ObservationMask::full(4);
    std::ostringstream out;
    write_masks(out, f);
    std::istringstream in(out.str());
    const MaskFile back = read_masks(in, sizes);
    CHECK(back.masks == f.masks);
    CHECK(back.design == "mar");
    CHECK(back.ignorable);

    std::istringstream tagged("# design rds ignorable=no\n1 2\n");
    const std::vector<int> one{3};
    const MaskFile nonig = read_masks(tagged, one);
    CHECK_FALSE(nonig.ignorable);
    CHECK(nonig.masks.front().unobserved_count() == 1);

    std::istringstream shared("2 3\n");
    const std::vector<int> same{4, 4};
    CHECK(read_masks(shared, same).masks.size() == 2);
    std::istringstream too_many("1 2\n---\n1 2\n---\n");
    CHECK(code_of([&] { read_masks(too_many, same); }) == ErrorCode::parse_error);
}

TEST_CASE("attribute files") {
    NodeAttributes a;
    a.categorical["region"] = {"left", "right", "left", "mid"};
    Eigen::MatrixXd pos(4, 3);
    pos << 0.1, 2, -3, 1e-9, 5, 6, 7.25, 8, 9, -1, 0, 1;
    a.real["pos"] = pos;
    a.real["age"] = Eigen::MatrixXd::Constant(4, 1, 30.5);
    std::ostringstream out;
    write_attributes(out, a);
    std::istringstream in(out.str());
    const NodeAttributes b = read_attributes(in);
    CHECK(b.categorical == a.categorical);
    REQUIRE(b.real.size() == 2);
    CHECK(b.real.at("pos") == pos);
    CHECK(b.real.at("age") == a.real.at("age"));

    std::istringstream ragged("x y\n1 2\n3\n");
    CHECK(code_of([&] { read_attributes(ragged); }) == ErrorCode::parse_error);
}

TEST_CASE("model config") {
    SUBCASE("single term") {
        const ModelConfig c = parse_model_config("term edges theta=1\n");
        const ModelSpec s = c.instantiate(5);
        CHECK(s.natural_dim() == 1);
        CHECK(s.param_dim() == 1);
    }
    SUBCASE("brain preset") {
        const ModelSpec s = parse_model_config("preset brain13  # the full model\n").instantiate(56);
        CHECK(s.natural_dim() == 9 + 54);
        CHECK(s.param_dim() == 13);
        CHECK(s.is_curved());
        CHECK(s.param_names().front() == "edges");
        CHECK(s.param_names().back() == "gwesp.decay");
    }
    SUBCASE("round trip") {
        const char* text =
            "term edges theta=1\n"
            "term degree k=2 theta=2\n"
            "term nodematch attr=region theta=3\n"
            "term distance attr=pos transform=log theta=4\n"
            "gwesp base=5 decay=6 shift1=7\n"
            "offset kind=sparse\n"
            "name theta=3 label=homophily\n";
        const ModelConfig c = parse_model_config(text);
        CHECK(c.param_dim() == 7);
        CHECK(parse_model_config(c.to_text()) == c);
        const ModelConfig b = parse_model_config("preset brain13\n");
        CHECK(parse_model_config(b.to_text()) == b);

        NodeAttributes attrs;
        attrs.categorical["region"] = {"a", "b", "a", "b", "a", "a"};
        attrs.real["pos"] = Eigen::MatrixXd::Random(6, 2);
        const ModelSpec s = c.instantiate(6, attrs);
        CHECK(s.param_names()[2] == "homophily");
        CHECK(s.natural_dim() == 4 + 4 + 1);
    }
    SUBCASE("errors") {
        for (const char* bad : {
                 "term edgez theta=1\n",                         // unknown term
                 "term edges theta=2\n",                         // theta 1 unmapped
                 "term edges theta=1\nterm edges theta=2\n",     // two entries, one coordinate
                 "term degree theta=1\n",                        // missing k
                 "term edges\n",                                 // missing theta
                 "term edges theta=0\n",                         // 1-based
                 "term edges theta=1 colour=red\n",              // stray key
                 "gwesp base=1 decay=1\n",                       // shared role
                 "term edges theta=1\noffset kind=dense\n",      // unknown offset
                 "preset brain14\n",                             // unknown preset
                 "preset brain13\npreset brain13\n",             // duplicate
                 "",                                             // nothing
             }) {
            INFO(bad);
            CHECK(code_of([&] { parse_model_config(bad); }) == ErrorCode::parse_error);
        }
    }
}

TEST_CASE("reports") {
    FitResult f;
    f.method = Method::mcmle;
    f.theta_hat = Eigen::Vector3d(-2.125, 0.1 + 0.2, 1e-17);
    f.std_errors = Eigen::Vector3d(0.5, std::nan(""), 3);
    f.param_names = {"edges", "gwesp.base", "gwesp.decay"};
    f.diagnostics.converged = true;
    f.diagnostics.iterations = 7;
    f.diagnostics.gradient_norm = 0.0123;
    f.config.seed = 99;
    f.config.draws = 1234;
    f.notes = {"first note", "second\tnote"};
    std::ostringstream out;
    write_report(out, fit_report(f));
    std::istringstream in(out.str());
    const FitResult g = fit_from_report(read_report(in));
    CHECK(g.theta_hat == f.theta_hat);
    CHECK(g.std_errors(0) == 0.5);
    CHECK(std::isnan(g.std_errors(1)));
    CHECK(g.param_names == f.param_names);
    CHECK(g.method == f.method);
    CHECK(g.diagnostics.converged);
    CHECK(g.diagnostics.iterations == 7);
    CHECK(g.diagnostics.gradient_norm == 0.0123);
    CHECK(g.config.seed == 99);
    CHECK(g.config.draws == 1234);
    CHECK(g.notes == f.notes);

    std::istringstream grid("# theta grid\n-2 0\n-2 0.5\n");
    const auto pts = read_grid(grid);
    REQUIRE(pts.size() == 2);
    CHECK(pts[1](1) == 0.5);
    std::istringstream ragged("1 2\n3\n");
    CHECK(code_of([&] { read_grid(ragged); }) == ErrorCode::parse_error);
}
