#include "ergm/io.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "ergm/error.hpp"

namespace ergm {

namespace {

[[noreturn]] void parse_fail(const std::string& what, int line) {
    fail(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + what);
}

std::string strip_comment(std::string s) {
    if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
    return s;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

bool is_separator(const std::string& s) {
    std::istringstream w(s);
    std::string tok, rest;
    return (w >> tok) && tok == "---" && !(w >> rest);
}

int parse_int(const std::string& s, int line) {
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) parse_fail("expected an integer, got '" + s + "'", line);
    return v;
}

/// Reads `i j` on a line into a canonical 0-based dyad of an n-node graph.
Dyad parse_pair(const std::string& s, int n, int line) {
    std::istringstream w(s);
    std::string a, b, extra;
    if (!(w >> a >> b) || (w >> extra)) parse_fail("expected '<i> <j>'", line);
    const int i = parse_int(a, line), j = parse_int(b, line);
    if (i < 1 || i > n || j < 1 || j > n) parse_fail("node outside 1.." + std::to_string(n), line);
    if (i == j) parse_fail("self-loop " + a + " " + b, line);
    return Dyad::of(i - 1, j - 1);
}

bool numeric(const std::string& s) {
    double v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

std::string format_display(double x) {
    if (!std::isfinite(x)) return format_double(x);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x == 0 ? 0.0 : x);
    return buf;
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc{} && p == s.data() + s.size(), "expected a number, got '" + s + "'",
            ErrorCode::parse_error);
    return v;
}

std::vector<Graph> read_graphs(std::istream& in) {
    std::vector<Graph> out;
    std::vector<Dyad> edges;
    int n = -1;
    int line = 0;
    std::string raw;
    auto finish = [&] {
        if (n < 0) parse_fail("network without an 'n <N>' line", line);
        out.push_back(Graph::from_edges(n, edges));
        edges.clear();
        n = -1;
    };
    bool pending = false;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = strip_comment(raw);
        if (blank(s)) continue;
        if (is_separator(s)) {
            finish();
            pending = false;
            continue;
        }
        pending = true;
        if (n < 0) {
            std::istringstream w(s);
            std::string key, val, extra;
            if (!(w >> key >> val) || key != "n" || (w >> extra)) parse_fail("expected 'n <N>'", line);
            n = parse_int(val, line);
            if (n < 1) parse_fail("node count must be positive", line);
            continue;
        }
        edges.push_back(parse_pair(s, n, line));
    }
    if (pending) finish();
    if (out.empty()) fail(ErrorCode::parse_error, "no network in graph input");
    return out;
}

void write_graphs(std::ostream& out, std::span<const Graph> graphs) {
    for (std::size_t k = 0; k < graphs.size(); ++k) {
        if (k > 0) out << "---\n";
        out << "n " << graphs[k].node_count() << "\n";
        for (const Dyad& e : graphs[k].edges()) out << e.i + 1 << " " << e.j + 1 << "\n";
    }
}

MaskFile read_masks(std::istream& in, std::span<const int> sizes) {
    require(!sizes.empty(), "masks need at least one network");
    MaskFile file;
    std::vector<std::vector<Dyad>> blocks(1);
    int line = 0;
    std::string raw;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            std::istringstream w(raw.substr(hash + 1));
            std::string tok;
            w >> tok;
            if (tok == "design") {
                w >> file.design;
                while (w >> tok) {
                    if (tok == "ignorable=yes") file.ignorable = true;
                    else if (tok == "ignorable=no") file.ignorable = false;
                }
            }
        }
        const std::string s = strip_comment(raw);
        if (blank(s)) continue;
        if (is_separator(s)) {
            blocks.emplace_back();
            continue;
        }
        const std::size_t k = blocks.size() - 1;
        const int n = sizes[std::min(k, sizes.size() - 1)];
        blocks.back().push_back(parse_pair(s, n, line));
    }
    if (blocks.size() == 1 && sizes.size() > 1) {
        for (int n : sizes)
            require(n == sizes.front(), "a single mask needs networks of equal size",
                    ErrorCode::parse_error);
        blocks.resize(sizes.size(), blocks.front());
    }
    if (blocks.size() != sizes.size())
        fail(ErrorCode::parse_error, "mask file has " + std::to_string(blocks.size()) +
                                         " masks for " + std::to_string(sizes.size()) + " networks");
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        ObservationMask m = ObservationMask::full(sizes[k]);
        for (const Dyad& d : blocks[k]) m.set_observed(d, false);
        file.masks.push_back(std::move(m));
    }
    return file;
}

void write_masks(std::ostream& out, const MaskFile& file) {
    out << "# design " << (file.design.empty() ? "unspecified" : file.design)
        << " ignorable=" << (file.ignorable ? "yes" : "no") << "\n";
    for (std::size_t k = 0; k < file.masks.size(); ++k) {
        if (k > 0) out << "---\n";
        for (const Dyad& d : file.masks[k].unobserved_dyads()) out << d.i + 1 << " " << d.j + 1 << "\n";
    }
}

NodeAttributes read_attributes(std::istream& in) {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    int line = 0;
    std::string raw;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = strip_comment(raw);
        if (blank(s)) continue;
        std::istringstream w(s);
        std::vector<std::string> cells;
        for (std::string c; w >> c;) cells.push_back(c);
        if (header.empty()) {
            header = std::move(cells);
            continue;
        }
        if (cells.size() != header.size())
            parse_fail("expected " + std::to_string(header.size()) + " columns", line);
        rows.push_back(std::move(cells));
    }
    require(!header.empty(), "attribute file has no header", ErrorCode::parse_error);
    require(!rows.empty(), "attribute file has no rows", ErrorCode::parse_error);

    NodeAttributes attrs;
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (!cols.contains(header[c])) order.push_back(header[c]);
        cols[header[c]].push_back(c);
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    for (const auto& name : order) {
        const auto& idx = cols[name];
        bool all_numeric = true;
        for (const auto& r : rows)
            for (std::size_t c : idx) all_numeric = all_numeric && numeric(r[c]);
        if (all_numeric) {
            Eigen::MatrixXd v(n, static_cast<Eigen::Index>(idx.size()));
            for (Eigen::Index i = 0; i < n; ++i)
                for (std::size_t k = 0; k < idx.size(); ++k)
                    v(i, static_cast<Eigen::Index>(k)) = parse_double(rows[static_cast<std::size_t>(i)][idx[k]]);
            attrs.real[name] = std::move(v);
        } else {
            require(idx.size() == 1, "categorical attribute '" + name + "' repeated",
                    ErrorCode::parse_error);
            auto& labels = attrs.categorical[name];
            for (const auto& r : rows) labels.push_back(r[idx.front()]);
        }
    }
    attrs.validate(static_cast<int>(n));
    return attrs;
}

void write_attributes(std::ostream& out, const NodeAttributes& attrs) {
    std::vector<std::string> header;
    int n = -1;
    for (const auto& [name, labels] : attrs.categorical) {
        header.push_back(name);
        n = static_cast<int>(labels.size());
    }
    for (const auto& [name, v] : attrs.real) {
        for (Eigen::Index c = 0; c < v.cols(); ++c) header.push_back(name);
        n = static_cast<int>(v.rows());
    }
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "\t" : "") << header[c];
    out << "\n";
    for (int i = 0; i < n; ++i) {
        bool first = true;
        auto cell = [&](const std::string& s) {
            out << (first ? "" : "\t") << s;
            first = false;
        };
        for (const auto& [name, labels] : attrs.categorical) cell(labels[static_cast<std::size_t>(i)]);
        for (const auto& [name, v] : attrs.real)
            for (Eigen::Index c = 0; c < v.cols(); ++c) cell(format_double(v(i, c)));
        out << "\n";
    }
}

std::vector<ThetaVector> read_grid(std::istream& in) {
    std::vector<ThetaVector> grid;
    int line = 0;
    std::string raw;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = strip_comment(raw);
        if (blank(s)) continue;
        std::istringstream w(s);
        std::vector<double> v;
        for (std::string c; w >> c;) {
            if (!numeric(c)) parse_fail("expected a number, got '" + c + "'", line);
            v.push_back(parse_double(c));
        }
        if (!grid.empty() && static_cast<Eigen::Index>(v.size()) != grid.front().size())
            parse_fail("grid rows must have equal length", line);
        grid.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    require(!grid.empty(), "grid file is empty", ErrorCode::parse_error);
    return grid;
}

void write_report(std::ostream& out, const Report& r) {
    for (const auto& [k, v] : r) out << k << "\t" << v << "\n";
}

Report read_report(std::istream& in) {
    Report r;
    int line = 0;
    std::string raw;
    while (std::getline(in, raw)) {
        ++line;
        if (blank(raw) || raw.front() == '#') continue;
        const auto tab = raw.find('\t');
        if (tab == std::string::npos) parse_fail("expected 'key<TAB>value'", line);
        std::string value = raw.substr(tab + 1);
        if (!value.empty() && value.back() == '\r') value.pop_back();
        r.emplace_back(raw.substr(0, tab), std::move(value));
    }
    return r;
}

const std::string& report_value(const Report& r, const std::string& key) {
    for (const auto& [k, v] : r)
        if (k == key) return v;
    fail(ErrorCode::parse_error, "report has no '" + key + "' entry");
}

Report fit_report(const FitResult& f) {
    Report r;
    const auto& d = f.diagnostics;
    r.emplace_back("method", to_string(f.method));
    r.emplace_back("converged", d.converged ? "yes" : "no");
    r.emplace_back("iterations", std::to_string(d.iterations));
    r.emplace_back("gradient_norm", format_double(d.gradient_norm));
    r.emplace_back("score_se", format_double(d.score_se));
    r.emplace_back("ess", format_double(d.ess));
    r.emplace_back("acceptance_rate", format_double(d.acceptance_rate));
    r.emplace_back("seed", std::to_string(f.config.seed));
    r.emplace_back("draws", std::to_string(f.config.draws));
    r.emplace_back("burnin", std::to_string(f.config.burnin));
    r.emplace_back("interval", std::to_string(f.config.interval));
    r.emplace_back("params", std::to_string(f.theta_hat.size()));
    for (Eigen::Index k = 0; k < f.theta_hat.size(); ++k) {
        const std::string idx = std::to_string(k + 1);
        r.emplace_back("name." + idx, k < static_cast<Eigen::Index>(f.param_names.size())
                                          ? f.param_names[static_cast<std::size_t>(k)]
                                          : "theta" + idx);
        r.emplace_back("theta." + idx, format_double(f.theta_hat(k)));
        r.emplace_back("se." + idx, k < f.std_errors.size() ? format_double(f.std_errors(k)) : "nan");
    }
    for (const auto& note : f.notes) r.emplace_back("note", note);
    return r;
}

FitResult fit_from_report(const Report& r) {
    FitResult f;
    const std::string& m = report_value(r, "method");
    bool known = false;
    for (Method x : {Method::mple, Method::mcmle, Method::stochastic_approx, Method::exact})
        if (to_string(x) == m) {
            f.method = x;
            known = true;
        }
    require(known, "unknown method '" + m + "' in report", ErrorCode::parse_error);
    f.diagnostics.converged = report_value(r, "converged") == "yes";
    f.diagnostics.iterations = parse_int(report_value(r, "iterations"), 0);
    f.diagnostics.gradient_norm = parse_double(report_value(r, "gradient_norm"));
    f.diagnostics.score_se = parse_double(report_value(r, "score_se"));
    f.diagnostics.ess = parse_double(report_value(r, "ess"));
    f.diagnostics.acceptance_rate = parse_double(report_value(r, "acceptance_rate"));
    f.config.seed = std::stoull(report_value(r, "seed"));
    f.config.draws = std::stoll(report_value(r, "draws"));
    f.config.burnin = std::stoll(report_value(r, "burnin"));
    f.config.interval = std::stoll(report_value(r, "interval"));
    const int p = parse_int(report_value(r, "params"), 0);
    f.theta_hat.resize(p);
    f.std_errors.resize(p);
    for (int k = 0; k < p; ++k) {
        const std::string idx = std::to_string(k + 1);
        f.param_names.push_back(report_value(r, "name." + idx));
        f.theta_hat(k) = parse_double(report_value(r, "theta." + idx));
        f.std_errors(k) = parse_double(report_value(r, "se." + idx));
    }
    for (const auto& [k, v] : r)
        if (k == "note") f.notes.push_back(v);
    return f;
}

void write_parameter_table(std::ostream& out, const FitResult& f) {
    out << "parameter\testimate\tse\n";
    for (Eigen::Index k = 0; k < f.theta_hat.size(); ++k)
        out << f.param_names[static_cast<std::size_t>(k)] << "\t" << format_double(f.theta_hat(k))
            << "\t" << (k < f.std_errors.size() ? format_double(f.std_errors(k)) : "nan") << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io_error, "cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::io_error, "cannot write '" + path + "'");
    out << content;
    if (!out) fail(ErrorCode::io_error, "write to '" + path + "' failed");
}

}  // namespace ergm
