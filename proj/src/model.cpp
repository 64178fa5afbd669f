#include "ergm/model.hpp"

#include <algorithm>
#include <numbers>
#include <set>

namespace ergm {

bool ModelSpec::is_curved() const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [](const MapEntry& e) { return std::holds_alternative<map::Gwesp>(e); });
}

void ModelSpec::check_theta(const ThetaVector& theta) const {
    require(theta.size() == param_dim(), "theta has length " + std::to_string(theta.size()) +
                                             ", model expects " + std::to_string(param_dim()));
    require(theta.allFinite(), "theta must be finite");
}

Eigen::MatrixXd ModelSpec::jacobian(const ThetaVector& theta) const {
    check_theta(theta);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(natural_dim(), param_dim());
    for (const MapEntry& e : entries_) {
        if (const auto* lin = std::get_if<map::Linear>(&e)) {
            J(lin->coord, lin->theta) = 1.0;
        } else if (const auto* gw = std::get_if<map::Gwesp>(&e)) {
            for (int m = 1; m <= gw->count; ++m) {
                const int row = gw->first_coord + m - 1;
                const auto g = gwesp_eta_gradient(theta(gw->base), theta(gw->decay), m);
                J(row, gw->base) += g(0);
                J(row, gw->decay) += g(1);
                if (m == 1 && gw->shift1 >= 0) J(row, gw->shift1) += 1.0;
                if (m == 2 && gw->shift2 >= 0) J(row, gw->shift2) += 1.0;
            }
        }
    }
    return J;
}

std::vector<std::string> ModelSpec::warnings(const ThetaVector& theta) const {
    std::vector<std::string> out;
    for (const MapEntry& e : entries_) {
        const auto* gw = std::get_if<map::Gwesp>(&e);
        if (gw == nullptr) continue;
        const double base = theta(gw->base);
        const double decay = theta(gw->decay);
        if (base == 0.0)
            out.push_back("gwesp base parameter '" + param_names_[gw->base] +
                          "' is zero: decay parameter is not identifiable");
        if (decay < -std::numbers::ln2)
            out.push_back("gwesp decay parameter " + std::to_string(decay) +
                          " < -log 2: near-degenerate regime for large graphs");
        else if (decay < 0.0)
            out.push_back("gwesp decay parameter " + std::to_string(decay) +
                          " < 0: added value of shared partners alternates in sign");
    }
    return out;
}

namespace {

bool same_entry(const MapEntry& a, const MapEntry& b) {
    if (a.index() != b.index()) return false;
    if (const auto* x = std::get_if<map::Linear>(&a)) {
        const auto& y = std::get<map::Linear>(b);
        return x->theta == y.theta && x->coord == y.coord;
    }
    if (const auto* x = std::get_if<map::FixedOffset>(&a))
        return x->coord == std::get<map::FixedOffset>(b).coord;
    const auto& x = std::get<map::Gwesp>(a);
    const auto& y = std::get<map::Gwesp>(b);
    return x.base == y.base && x.decay == y.decay && x.shift1 == y.shift1 &&
           x.shift2 == y.shift2 && x.first_coord == y.first_coord && x.count == y.count;
}

}  // namespace

bool operator==(const ModelSpec& a, const ModelSpec& b) {
    if (a.node_count() != b.node_count() || a.natural_dim() != b.natural_dim() ||
        a.param_dim() != b.param_dim() || a.entries_.size() != b.entries_.size())
        return false;
    for (int c = 0; c < a.natural_dim(); ++c)
        if (!same_term(a.terms_.terms()[c], b.terms_.terms()[c])) return false;
    for (std::size_t k = 0; k < a.entries_.size(); ++k)
        if (!same_entry(a.entries_[k], b.entries_[k])) return false;
    return a.attrs_ == b.attrs_;
}

ModelBuilder::ModelBuilder(int n, NodeAttributes attrs) : n_(n), attrs_(std::move(attrs)) {
    require(n >= 1, "node count must be positive");
    attrs_.validate(n);
}

ModelBuilder& ModelBuilder::name_param(int theta, std::string name) {
    require(theta >= 0, "theta index must be non-negative");
    if (static_cast<int>(names_.size()) <= theta) names_.resize(theta + 1);
    names_[theta] = std::move(name);
    return *this;
}

ModelBuilder& ModelBuilder::linear(TermKind t, int theta, std::string name) {
    require(!is_offset(t), "offset terms are fixed; use offset()");
    require(theta >= 0, "theta index must be non-negative");
    if (name.empty()) name = term_label(t);
    if (static_cast<int>(names_.size()) <= theta || names_[theta].empty())
        name_param(theta, std::move(name));
    entries_.push_back(map::Linear{theta, static_cast<int>(terms_.size())});
    terms_.push_back(std::move(t));
    return *this;
}

ModelBuilder& ModelBuilder::gwesp(int base, int decay, int shift1, int shift2) {
    require(base >= 0 && decay >= 0 && base != decay, "gwesp needs distinct base and decay");
    require(shift1 != base && shift1 != decay && shift2 != base && shift2 != decay &&
                (shift1 < 0 || shift1 != shift2),
            "gwesp shift parameters must be distinct from base and decay");
    map::Gwesp gw{base, decay, shift1, shift2, static_cast<int>(terms_.size()), std::max(n_ - 2, 0)};
    for (int m = 1; m <= gw.count; ++m) terms_.push_back(term::Esp{m});
    entries_.push_back(gw);
    auto name_if_empty = [&](int idx, const char* nm) {
        if (idx < 0) return;
        if (static_cast<int>(names_.size()) <= idx || names_[idx].empty()) name_param(idx, nm);
    };
    name_if_empty(base, "gwesp.base");
    name_if_empty(decay, "gwesp.decay");
    name_if_empty(shift1, "gwesp.shift1");
    name_if_empty(shift2, "gwesp.shift2");
    return *this;
}

ModelBuilder& ModelBuilder::offset(TermKind t) {
    require(is_offset(t), "offset() takes an Offset term");
    entries_.push_back(map::FixedOffset{static_cast<int>(terms_.size())});
    terms_.push_back(std::move(t));
    return *this;
}

ModelSpec ModelBuilder::build() const {
    std::set<int> used;
    for (const MapEntry& e : entries_) {
        if (const auto* lin = std::get_if<map::Linear>(&e)) {
            used.insert(lin->theta);
        } else if (const auto* gw = std::get_if<map::Gwesp>(&e)) {
            used.insert(gw->base);
            used.insert(gw->decay);
            if (gw->shift1 >= 0) used.insert(gw->shift1);
            if (gw->shift2 >= 0) used.insert(gw->shift2);
        }
    }
    const int p = used.empty() ? 0 : *used.rbegin() + 1;
    for (int k = 0; k < p; ++k)
        require(used.contains(k), "theta index " + std::to_string(k + 1) + " is not mapped",
                ErrorCode::parse_error);
    ModelSpec spec;
    spec.terms_ = TermSet(terms_, n_, attrs_);
    spec.attrs_ = attrs_;
    spec.entries_ = entries_;
    spec.param_names_ = names_;
    spec.param_names_.resize(p);
    for (int k = 0; k < p; ++k)
        if (spec.param_names_[k].empty()) spec.param_names_[k] = "theta" + std::to_string(k + 1);
    return spec;
}

double log_weight(const ModelSpec& spec, const ThetaVector& theta, const Graph& g) {
    return spec.eta<double>(theta).dot(spec.stats(g));
}

}  // namespace ergm
