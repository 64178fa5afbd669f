#ifndef ERGM_GOF_HPP
#define ERGM_GOF_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ergm/estimate.hpp"
#include "ergm/sampler.hpp"

namespace ergm {

/// Statistic families for goodness-of-fit, summed over networks.
struct GofStats {
    std::vector<std::int64_t> degree;    // degree[k]: nodes of degree k
    std::vector<std::int64_t> esp;       // esp[m]: edges with m shared partners
    std::vector<std::int64_t> geodesic;  // geodesic[d]: dyads at distance d; index 0 unused
    std::int64_t unreachable = 0;
    std::int64_t edges = 0;
    std::int64_t triangles = 0;

    GofStats& operator+=(const GofStats& other);
    friend bool operator==(const GofStats&, const GofStats&) = default;
};

GofStats gof_summary(const Graph& g);
GofStats gof_summary(std::span<const Graph> networks);

enum class Family { edges, degree, esp, geodesic, triangles };
std::string to_string(Family f);

struct GofBin {
    Family family = Family::degree;
    std::string label;  // bin value, or "inf" for unreachable pairs
    double observed = 0;
    double lower = 0, median = 0, upper = 0;  // 2.5%, 50%, 97.5% of the simulated values
    bool outside = false;
};

struct GofReport {
    std::vector<GofBin> bins;
    std::int64_t draws = 0;
    std::uint64_t seed = 0;

    const GofBin& bin(Family f, const std::string& label) const;
    int outside_count() const;
};

/// Simulates `draws` replicate network sets at theta (one graph per observed
/// network, same spec) and places the observed families inside the
/// pointwise envelopes.
GofReport gof_compare(const NetworkData& observed, const ThetaVector& theta, std::int64_t draws,
                      const McmcConfig& cfg);

struct ScanPoint {
    ThetaVector theta;
    double mean_density = 0;
    double sd_density = 0;
    double mc_se = 0;       // batch-means standard error of mean_density
    double bimodality = 0;  // distance between the two tallest histogram modes; 0 if unimodal
    std::uint64_t stream = 0;
};

struct ScanReport {
    std::vector<ScanPoint> points;
    std::uint64_t seed = 0;
};

/// Long runs from the empty graph at each grid point. Densities are summarized
/// over cfg.draws retained states.
ScanReport degeneracy_scan(const ModelSpec& spec, std::span<const ThetaVector> grid,
                           const McmcConfig& cfg);

/// Gap between the two tallest local maxima of a 20-bin histogram on [0, 1].
double bimodality_gap(std::span<const double> densities);

}  // namespace ergm

#endif  // ERGM_GOF_HPP
