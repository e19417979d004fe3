#pragma once

#include <Eigen/Core>

#include <set>
#include <utility>

namespace tvnet {

/// Edge set over d nodes.  Undirected sets store each pair once as (min, max).
class EdgeSet {
public:
    EdgeSet() = default;
    EdgeSet(Eigen::Index d, bool directed) : d_(d), directed_(directed) {}

    void add(Eigen::Index i, Eigen::Index j);
    bool contains(Eigen::Index i, Eigen::Index j) const;
    std::size_t size() const { return pairs_.size(); }
    Eigen::Index d() const { return d_; }
    bool directed() const { return directed_; }
    const std::set<std::pair<Eigen::Index, Eigen::Index>>& pairs() const { return pairs_; }

    bool operator==(const EdgeSet& other) const = default;

private:
    Eigen::Index d_ = 0;
    bool directed_ = true;
    std::set<std::pair<Eigen::Index, Eigen::Index>> pairs_;
};

}  // namespace tvnet
