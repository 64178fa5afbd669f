#ifndef ERGM_MODEL_HPP
#define ERGM_MODEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "ergm/error.hpp"
#include "ergm/graph.hpp"
#include "ergm/terms.hpp"

namespace ergm {

using ThetaVector = Eigen::VectorXd;
using EtaVector = Eigen::VectorXd;

// GWESP weights. With r = 1 - exp(-decay) the natural parameter on the m-th
// shared-partner bin is base * exp(decay) * (1 - r^m), and the marginal value
// of the m-th shared partner is base * r^(m-1).

template <typename Scalar>
Scalar gwesp_eta(Scalar base, Scalar decay, int m) {
    using std::exp;
    using std::pow;
    const Scalar r = Scalar(1) - exp(-decay);
    return base * exp(decay) * (Scalar(1) - pow(r, m));
}

template <typename Scalar>
Scalar gwesp_added_value(Scalar base, Scalar decay, int m) {
    using std::exp;
    using std::pow;
    require(m >= 1, "added value is defined for m >= 1");
    return base * pow(Scalar(1) - exp(-decay), m - 1);
}

/// (d/d base, d/d decay) of gwesp_eta.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> gwesp_eta_gradient(Scalar base, Scalar decay, int m) {
    using std::exp;
    using std::pow;
    const Scalar r = Scalar(1) - exp(-decay);
    const Scalar rm = pow(r, m);
    const Scalar rm1 = m >= 1 ? pow(r, m - 1) : Scalar(0);
    Eigen::Matrix<Scalar, 2, 1> g;
    g(0) = exp(decay) * (Scalar(1) - rm);
    g(1) = base * (exp(decay) * (Scalar(1) - rm) - Scalar(m) * rm1);
    return g;
}

namespace map {

/// eta[coord] = theta[theta].
struct Linear {
    int theta = 0;
    int coord = 0;
};
/// eta[first_coord + m - 1] for m = 1..count is the GWESP weight, plus
/// theta[shift1] on m = 1 and theta[shift2] on m = 2 when those are >= 0.
struct Gwesp {
    int base = 0;
    int decay = 0;
    int shift1 = -1;
    int shift2 = -1;
    int first_coord = 0;
    int count = 0;
};
/// eta[coord] = 1, never estimated.
struct FixedOffset {
    int coord = 0;
};

}  // namespace map

using MapEntry = std::variant<map::Linear, map::Gwesp, map::FixedOffset>;

/// An ERGM instantiated for one node set: terms with their natural
/// coordinates, node attributes, and the map from theta (dimension p) to
/// eta (dimension q >= p). Immutable once built.
class ModelSpec {
   public:
    ModelSpec() = default;

    int node_count() const { return terms_.node_count(); }
    int natural_dim() const { return terms_.size(); }
    int param_dim() const { return static_cast<int>(param_names_.size()); }
    const TermSet& terms() const { return terms_; }
    const std::vector<MapEntry>& entries() const { return entries_; }
    const std::vector<std::string>& param_names() const { return param_names_; }
    const NodeAttributes& attributes() const { return attrs_; }
    bool is_curved() const;
    bool dyad_independent() const { return terms_.dyad_independent(); }

    template <typename Scalar>
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eta(
        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& theta) const;

    /// q x p matrix of d eta_a / d theta_b.
    Eigen::MatrixXd jacobian(const ThetaVector& theta) const;

    /// Stats of g under this spec's terms.
    StatVector stats(const Graph& g) const { return terms_.stats(g); }

    /// Soft diagnostics on theta (negative decay, zero GWESP base).
    std::vector<std::string> warnings(const ThetaVector& theta) const;

    void check_theta(const ThetaVector& theta) const;

    /// True when both specs define the same distribution family over the same
    /// node set (terms, attributes, and map).
    friend bool operator==(const ModelSpec& a, const ModelSpec& b);

   private:
    friend class ModelBuilder;

    TermSet terms_;
    NodeAttributes attrs_;
    std::vector<MapEntry> entries_;
    std::vector<std::string> param_names_;
};

/// Assembles a ModelSpec term by term. Theta indices are 0-based here.
class ModelBuilder {
   public:
    explicit ModelBuilder(int n, NodeAttributes attrs = {});

    ModelBuilder& linear(TermKind t, int theta, std::string name = {});
    /// Appends Esp(1..n-2) mapped through the GWESP weights.
    ModelBuilder& gwesp(int base, int decay, int shift1 = -1, int shift2 = -1);
    ModelBuilder& offset(TermKind t);
    ModelBuilder& name_param(int theta, std::string name);

    ModelSpec build() const;

   private:
    int n_;
    NodeAttributes attrs_;
    std::vector<TermKind> terms_;
    std::vector<MapEntry> entries_;
    std::vector<std::string> names_;
};

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ModelSpec::eta(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& theta) const {
    require(theta.size() == param_dim(), "theta has length " + std::to_string(theta.size()) +
                                             ", model expects " + std::to_string(param_dim()));
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(natural_dim());
    for (const MapEntry& e : entries_) {
        if (const auto* lin = std::get_if<map::Linear>(&e)) {
            out(lin->coord) = theta(lin->theta);
        } else if (const auto* off = std::get_if<map::FixedOffset>(&e)) {
            out(off->coord) = Scalar(1);
        } else {
            const auto& gw = std::get<map::Gwesp>(e);
            for (int m = 1; m <= gw.count; ++m) {
                Scalar v = gwesp_eta<Scalar>(theta(gw.base), theta(gw.decay), m);
                if (m == 1 && gw.shift1 >= 0) v += theta(gw.shift1);
                if (m == 2 && gw.shift2 >= 0) v += theta(gw.shift2);
                out(gw.first_coord + m - 1) = v;
            }
        }
    }
    return out;
}

/// Natural parameters for theta.
inline EtaVector eta(const ModelSpec& spec, const ThetaVector& theta) {
    return spec.eta<double>(theta);
}

inline Eigen::MatrixXd eta_jacobian(const ModelSpec& spec, const ThetaVector& theta) {
    return spec.jacobian(theta);
}

/// <eta(theta), s(g)>: the log-density up to the log-normalizer, including
/// the reference-measure offsets.
double log_weight(const ModelSpec& spec, const ThetaVector& theta, const Graph& g);

}  // namespace ergm

#endif  // ERGM_MODEL_HPP
