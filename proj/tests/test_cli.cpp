#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ergm/cli.hpp"
#include "ergm/io.hpp"

namespace fs = std::filesystem;
using namespace ergm;

namespace {

struct Result {
    int status;
    std::string out, err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int status = cli::run(args, out, err);
    return {status, out.str(), err.str()};
}

/// Fresh scratch directory per test case.
struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("ergm_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string file(const std::string& name, const std::string& content) const {
        const fs::path p = dir / name;
        write_file(p.string(), content);
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("cli simulate is reproducible") {
    Scratch s;
    const std::string model = s.file("edges.cfg", "term edges theta=1\n");
    const std::vector<std::string> args{"simulate", "--model", model, "--n",    "5",
                                        "--theta",  "0",     "--draws", "10", "--seed", "17"};
    const Result a = invoke(args), b = invoke(args);
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    std::istringstream in(a.out);
    CHECK(read_graphs(in).size() == 10);

    std::vector<std::string> other = args;
    other.back() = "18";
    CHECK(invoke(other).out != a.out);

    std::vector<std::string> stats = args;
    stats.push_back("--stats-only");
    const Result r = invoke(stats);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 10);

    const std::string file = s.path("draws.txt");
    std::vector<std::string> to_file = args;
    to_file.insert(to_file.end(), {"--out", file});
    REQUIRE(invoke(to_file).status == 0);
    CHECK(read_file(file) == a.out);
}

TEST_CASE("cli enumerate") {
    Scratch s;
    const std::string model = s.file("edges.cfg", "term edges theta=1\n");
    const Result m = invoke({"enumerate", "--model", model, "--n", "3", "--theta", "0", "--moments"});
    REQUIRE(m.status == 0);
    CHECK(m.out.find("mean_edges\t1.5\n") != std::string::npos);
    const Result z = invoke({"enumerate", "--model", model, "--n", "3", "--theta", "0", "--normalizer"});
    CHECK(z.out == "log_normalizer\t" + format_display(3 * std::log(2.0)) + "\n");
    const std::string g = s.file("g.txt", "n 4\n1 2\n2 3\n3 4\n");
    const Result e = invoke({"enumerate", "--model", model, "--graphs", g, "--mle"});
    REQUIRE(e.status == 0);
    CHECK(e.out.find("theta_edges\t0\n") != std::string::npos);
    CHECK(invoke({"enumerate", "--model", model, "--n", "3", "--theta", "0", "--mle",
                  "--moments"}).status != 0);
}

TEST_CASE("cli fit") {
    Scratch s;
    const std::string model = s.file("edges.cfg", "term edges theta=1\n");
    SUBCASE("boundary data") {
        const std::string g = s.file("empty.txt", "n 6\n");
        const Result r = invoke({"fit", "--graphs", g, "--model", model});
        CHECK(r.status != 0);
        CHECK(r.err.rfind("mle-nonexistent:", 0) == 0);
    }
    SUBCASE("parameter table, report, gof") {
        const std::string tri = s.file("tri.cfg", "term edges theta=1\nterm triangles theta=2\n");
        const std::string g =
            s.file("g.txt", "n 8\n1 2\n2 3\n1 3\n3 4\n4 5\n5 6\n6 7\n7 8\n5 7\n---\nn 8\n1 2\n2 3\n3 1\n4 5\n6 8\n");
        const std::string report = s.path("fit.report");
        const Result r = invoke({"fit", "--graphs", g, "--model", tri, "--draws", "2000", "--seed",
                                 "5", "--report", report});
        REQUIRE(r.status == 0);
        CHECK(r.out.rfind("parameter\testimate\tse\n", 0) == 0);
        CHECK(r.out.find("\ntriangles\t") != std::string::npos);
        std::istringstream in(read_file(report));
        const FitResult f = fit_from_report(read_report(in));
        CHECK(f.theta_hat.size() == 2);
        CHECK(f.config.seed == 5);

        const Result gof = invoke({"gof", "--graphs", g, "--model", tri, "--fit-report", report,
                                   "--draws", "50"});
        REQUIRE(gof.status == 0);
        CHECK(gof.out.rfind("family\tbin\tobserved\tlower\tmedian\tupper\toutside\n", 0) == 0);
        CHECK(gof.out.find("triangles\ttotal\t3\t") != std::string::npos);
        CHECK(gof.out == invoke({"gof", "--graphs", g, "--model", tri, "--fit-report", report,
                                 "--draws", "50"}).out);

        const Result mp = invoke({"fit", "--graphs", g, "--model", tri, "--method", "mple"});
        REQUIRE(mp.status == 0);
        CHECK(invoke({"fit", "--graphs", g, "--model", tri, "--method", "newton"}).status == 2);
    }
    SUBCASE("incomplete data through a mask file") {
        const std::string g = s.file("g.txt", "n 3\n1 2\n");
        const std::string mask = s.file("m.txt", "# design mar ignorable=yes\n2 3\n");
        const Result r = invoke({"fit", "--graphs", g, "--model", model, "--mask", mask});
        REQUIRE(r.status == 0);
        std::istringstream rows(r.out);
        std::string header, name, est;
        std::getline(rows, header);
        rows >> name >> est;
        CHECK(name == "edges");
        CHECK(std::abs(parse_double(est)) < 1e-6);

        const std::string bad = s.file("rds.txt", "# design rds ignorable=no\n2 3\n");
        const Result nr = invoke({"fit", "--graphs", g, "--model", model, "--mask", bad});
        CHECK(nr.err.rfind("non-ignorable-design:", 0) == 0);
    }
}

TEST_CASE("cli mask and scan") {
    Scratch s;
    const std::string g = s.file("g.txt", "n 5\n1 2\n2 3\n3 4\n4 5\n");
    const Result ego = invoke({"mask", "--design", "ego", "--graphs", g, "--inclusion", "1,0,0,0,0"});
    REQUIRE(ego.status == 0);
    std::istringstream in(ego.out);
    const std::vector<int> sizes{5};
    const MaskFile mf = read_masks(in, sizes);
    CHECK(mf.design == "ego");
    CHECK(mf.masks.front().observed_count() == 4);
    const Result trace = invoke({"mask", "--design", "trace", "--graphs", g, "--inclusion",
                                 "1,0,0,0,0", "--waves", "1"});
    std::istringstream tin(trace.out);
    CHECK(read_masks(tin, sizes).masks.front().observed_count() == 7);
    const Result mar = invoke({"mask", "--design", "mar", "--n", "10", "--q", "0.5", "--seed", "3"});
    CHECK(mar.status == 0);
    CHECK(mar.out == invoke({"mask", "--design", "mar", "--n", "10", "--q", "0.5", "--seed", "3"}).out);
    const Result sub = invoke({"mask", "--design", "subgraph", "--blocks", "2", "--block-size", "3"});
    std::istringstream sin(sub.out);
    const std::vector<int> six{6};
    CHECK(read_masks(sin, six).masks.front().observed_count() == 6);
    CHECK(invoke({"mask", "--design", "mar"}).status == 1);

    const std::string model = s.file("tri.cfg", "term edges theta=1\nterm triangles theta=2\n");
    const std::string grid = s.file("grid.txt", "-2 0\n-2 1.5\n");
    const Result sc = invoke({"scan", "--model", model, "--n", "12", "--grid", grid, "--draws", "200"});
    REQUIRE(sc.status == 0);
    CHECK(sc.out.rfind("theta1\ttheta2\tmean_density\tsd_density\tmc_se\tbimodality\n", 0) == 0);
    CHECK(std::count(sc.out.begin(), sc.out.end(), '\n') == 3);
}

TEST_CASE("cli errors") {
    CHECK(invoke({}).status == 2);
    CHECK(invoke({"frobnicate"}).status == 2);
    const Result missing = invoke({"fit", "--graphs", "/nonexistent/g.txt", "--model", "/nonexistent/m"});
    CHECK(missing.status == 1);
    CHECK(missing.err.rfind("io-error:", 0) == 0);
    const Result help = invoke({"--help"});
    CHECK(help.status == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
}
