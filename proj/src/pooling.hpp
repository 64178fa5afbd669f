// Networks grouped by identical spec. Identical specs share one chain, and
// the group enters every likelihood through its summed statistics.
#ifndef ERGM_SRC_POOLING_HPP
#define ERGM_SRC_POOLING_HPP

#include <vector>

#include "ergm/estimate.hpp"

namespace ergm::detail {

struct Group {
    const ModelSpec* spec = nullptr;
    std::vector<int> members;
    StatVector total;
    double count() const { return static_cast<double>(members.size()); }
};

inline std::vector<Group> group_networks(const NetworkData& data) {
    std::vector<Group> groups;
    for (int k = 0; k < static_cast<int>(data.networks.size()); ++k) {
        const Network& net = data.networks[static_cast<std::size_t>(k)];
        Group* hit = nullptr;
        for (auto& g : groups)
            if (*g.spec == net.spec) {
                hit = &g;
                break;
            }
        if (!hit) {
            groups.push_back({&net.spec, {}, StatVector::Zero(net.spec.natural_dim())});
            hit = &groups.back();
        }
        hit->members.push_back(k);
        hit->total += net.spec.stats(net.graph);
    }
    return groups;
}

/// Weighted mean and covariance of the rows of Z under normalized weights w.
inline void weighted_moments(const Eigen::MatrixXd& Z, const Eigen::VectorXd& w,
                             Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
    mean = Z.transpose() * w;
    const Eigen::MatrixXd c = Z.rowwise() - mean.transpose();
    cov = c.transpose() * w.asDiagonal() * c;
}

}  // namespace ergm::detail

#endif  // ERGM_SRC_POOLING_HPP
