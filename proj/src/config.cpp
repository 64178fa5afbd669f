#include "ergm/config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "ergm/error.hpp"

namespace ergm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void parse_fail(int line, const std::string& what) {
    fail(ErrorCode::parse_error, "model config line " + std::to_string(line) + ": " + what);
}

int to_int(const std::string& s, int line, const std::string& key) {
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        parse_fail(line, "'" + key + "' expects an integer, got '" + s + "'");
    return v;
}

/// 1-based theta index in the text, 0-based in memory.
int to_theta(const std::string& s, int line, const std::string& key) {
    const int v = to_int(s, line, key);
    if (v < 1) parse_fail(line, "theta indices start at 1");
    return v - 1;
}

const std::set<std::string>& allowed_keys(const std::string& kind) {
    static const std::map<std::string, std::set<std::string>> keys{
        {"edges", {}},           {"twopaths", {}},          {"triangles", {}},
        {"degree", {"k"}},       {"esp", {"m"}},            {"nodedegree", {"node"}},
        {"nodematch", {"attr"}}, {"distance", {"attr", "transform"}},
    };
    static const std::set<std::string> none;
    const auto it = keys.find(kind);
    return it == keys.end() ? none : it->second;
}

bool known_kind(const std::string& kind) {
    return kind == "edges" || kind == "twopaths" || kind == "triangles" || kind == "degree" ||
           kind == "esp" || kind == "nodedegree" || kind == "nodematch" || kind == "distance";
}

std::string signature(const TermDecl& t) {
    std::string s = t.kind;
    for (const auto& [k, v] : t.args) s += " " + k + "=" + v;
    return s;
}

TermKind make_term(const TermDecl& t, int n, const NodeAttributes& attrs) {
    auto arg = [&](const char* key) -> const std::string& {
        const auto it = t.args.find(key);
        require(it != t.args.end(), "term '" + t.kind + "' needs " + key + "=", ErrorCode::parse_error);
        return it->second;
    };
    if (t.kind == "edges") return term::Edges{};
    if (t.kind == "twopaths") return term::TwoPaths{};
    if (t.kind == "triangles") return term::Triangles{};
    if (t.kind == "degree") return term::DegreeCount{to_int(arg("k"), 0, "k")};
    if (t.kind == "esp") return term::Esp{to_int(arg("m"), 0, "m")};
    if (t.kind == "nodedegree") {
        const int node = to_int(arg("node"), 0, "node");
        require(node >= 1 && node <= n, "nodedegree node outside 1.." + std::to_string(n));
        return term::NodeDegree{node - 1};
    }
    if (t.kind == "nodematch") return term::NodeMatch{arg("attr")};
    const auto tr = t.args.find("transform");
    const bool log = tr != t.args.end() && tr->second == "log";
    return term::DyadCovariate::distance(
        attrs, arg("attr"),
        log ? term::DyadCovariate::Transform::log : term::DyadCovariate::Transform::identity);
}

}  // namespace

int ModelConfig::param_dim() const {
    int p = 0;
    for (const auto& d : decls)
        std::visit(overloaded{
                       [&](const TermDecl& t) { p = std::max(p, t.theta + 1); },
                       [&](const GwespDecl& g) {
                           p = std::max({p, g.base + 1, g.decay + 1, g.shift1 + 1, g.shift2 + 1});
                       },
                       [](const OffsetDecl&) {},
                   },
                   d);
    return p;
}

ModelSpec ModelConfig::instantiate(int n, const NodeAttributes& attrs) const {
    ModelBuilder b(n, attrs);
    for (const auto& d : decls)
        std::visit(overloaded{
                       [&](const TermDecl& t) { b.linear(make_term(t, n, attrs), t.theta); },
                       [&](const GwespDecl& g) { b.gwesp(g.base, g.decay, g.shift1, g.shift2); },
                       [&](const OffsetDecl&) { b.offset(term::Offset::sparse(n)); },
                   },
                   d);
    for (const auto& [k, label] : names) b.name_param(k, label);
    return b.build();
}

std::string ModelConfig::to_text() const {
    std::ostringstream out;
    for (const auto& d : decls)
        std::visit(overloaded{
                       [&](const TermDecl& t) {
                           out << "term " << signature(t) << " theta=" << t.theta + 1 << "\n";
                       },
                       [&](const GwespDecl& g) {
                           out << "gwesp base=" << g.base + 1 << " decay=" << g.decay + 1;
                           if (g.shift1 >= 0) out << " shift1=" << g.shift1 + 1;
                           if (g.shift2 >= 0) out << " shift2=" << g.shift2 + 1;
                           out << "\n";
                       },
                       [&](const OffsetDecl& o) { out << "offset kind=" << o.kind << "\n"; },
                   },
                   d);
    for (const auto& [k, label] : names) out << "name theta=" << k + 1 << " label=" << label << "\n";
    return out.str();
}

ModelConfig preset_brain13() {
    ModelConfig c;
    c.decls.push_back(TermDecl{"edges", {}, 0});
    for (int k = 0; k <= 6; ++k) c.decls.push_back(TermDecl{"degree", {{"k", std::to_string(k)}}, 1 + k});
    c.decls.push_back(TermDecl{"twopaths", {}, 8});
    c.decls.push_back(GwespDecl{11, 12, 9, 10});
    return c;
}

ModelConfig parse_model_config(std::string_view text) {
    ModelConfig cfg;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    std::set<std::string> seen_terms;
    bool gwesp_seen = false, offset_seen = false;
    std::map<int, int> first_use;  // theta -> line
    auto use = [&](int theta, int at) { first_use.emplace(theta, at); };

    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream words(raw);
        std::string head;
        if (!(words >> head)) continue;
        std::string kind;
        if (head == "term" && !(words >> kind)) parse_fail(line, "term needs a kind");
        if (head == "preset") {
            std::string name;
            words >> name;
            if (name != "brain13") parse_fail(line, "unknown preset '" + name + "'");
            for (auto& d : preset_brain13().decls) {
                if (const auto* t = std::get_if<TermDecl>(&d)) {
                    if (!seen_terms.insert(signature(*t)).second)
                        parse_fail(line, "term '" + signature(*t) + "' declared twice");
                    use(t->theta, line);
                } else if (const auto* g = std::get_if<GwespDecl>(&d)) {
                    if (gwesp_seen) parse_fail(line, "gwesp declared twice");
                    gwesp_seen = true;
                    for (int k : {g->base, g->decay, g->shift1, g->shift2}) use(k, line);
                }
                cfg.decls.push_back(d);
            }
            continue;
        }
        std::map<std::string, std::string> kv;
        std::string tok;
        while (words >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size())
                parse_fail(line, "expected key=value, got '" + tok + "'");
            if (!kv.emplace(tok.substr(0, eq), tok.substr(eq + 1)).second)
                parse_fail(line, "key '" + tok.substr(0, eq) + "' repeated");
        }
        auto take = [&](const std::string& key) -> std::string {
            const auto it = kv.find(key);
            if (it == kv.end()) parse_fail(line, "missing " + key + "=");
            std::string v = it->second;
            kv.erase(it);
            return v;
        };
        auto no_leftovers = [&] {
            if (!kv.empty()) parse_fail(line, "unexpected key '" + kv.begin()->first + "'");
        };

        if (head == "term") {
            if (!known_kind(kind)) parse_fail(line, "unknown term '" + kind + "'");
            TermDecl t;
            t.kind = kind;
            t.theta = to_theta(take("theta"), line, "theta");
            for (const auto& key : allowed_keys(kind))
                if (kv.contains(key)) t.args[key] = take(key);
            no_leftovers();
            for (const char* key : {"k", "m", "node"})
                if (t.args.contains(key)) to_int(t.args[key], line, key);
            if (kind == "degree" && !t.args.contains("k")) parse_fail(line, "degree needs k=");
            if (kind == "esp" && !t.args.contains("m")) parse_fail(line, "esp needs m=");
            if (kind == "nodedegree" && !t.args.contains("node")) parse_fail(line, "nodedegree needs node=");
            if ((kind == "nodematch" || kind == "distance") && !t.args.contains("attr"))
                parse_fail(line, kind + " needs attr=");
            if (kind == "distance" && t.args.contains("transform") &&
                t.args["transform"] != "log" && t.args["transform"] != "identity")
                parse_fail(line, "transform must be identity or log");
            if (!seen_terms.insert(signature(t)).second)
                parse_fail(line, "term '" + signature(t) + "' declared twice");
            use(t.theta, line);
            cfg.decls.push_back(std::move(t));
        } else if (head == "gwesp") {
            if (gwesp_seen) parse_fail(line, "gwesp declared twice");
            gwesp_seen = true;
            GwespDecl g;
            g.base = to_theta(take("base"), line, "base");
            g.decay = to_theta(take("decay"), line, "decay");
            if (kv.contains("shift1")) g.shift1 = to_theta(take("shift1"), line, "shift1");
            if (kv.contains("shift2")) g.shift2 = to_theta(take("shift2"), line, "shift2");
            no_leftovers();
            for (int k : {g.base, g.decay, g.shift1, g.shift2}) use(k, line);
            cfg.decls.push_back(g);
        } else if (head == "offset") {
            const std::string k = take("kind");
            no_leftovers();
            if (k != "sparse") parse_fail(line, "unknown offset kind '" + k + "'");
            if (offset_seen) parse_fail(line, "offset declared twice");
            offset_seen = true;
            cfg.decls.push_back(OffsetDecl{k});
        } else if (head == "name") {
            const int k = to_theta(take("theta"), line, "theta");
            cfg.names[k] = take("label");
            no_leftovers();
        } else {
            parse_fail(line, "unknown declaration '" + head + "'");
        }
    }

    // Each theta index may feed several linear terms, but not two roles in
    // the GWESP map and never a gap.
    for (const auto& d : cfg.decls)
        if (const auto* g = std::get_if<GwespDecl>(&d)) {
            const std::set<int> distinct{g->base, g->decay};
            if (distinct.size() < 2 || (g->shift1 >= 0 && (g->shift1 == g->base || g->shift1 == g->decay)) ||
                (g->shift2 >= 0 && (g->shift2 == g->base || g->shift2 == g->decay || g->shift2 == g->shift1)))
                fail(ErrorCode::parse_error, "gwesp roles must use distinct theta indices");
        }
    first_use.erase(-1);
    const int p = cfg.param_dim();
    if (p == 0) fail(ErrorCode::parse_error, "model config declares no parameters");
    for (int k = 0; k < p; ++k)
        if (!first_use.contains(k))
            fail(ErrorCode::parse_error, "theta index " + std::to_string(k + 1) + " is not mapped");
    for (const auto& [k, label] : cfg.names)
        if (k >= p) fail(ErrorCode::parse_error, "name given for unused theta index " + std::to_string(k + 1));
    return cfg;
}

}  // namespace ergm
