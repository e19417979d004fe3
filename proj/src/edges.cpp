#include "tvnet/edges.hpp"

#include "tvnet/error.hpp"

#include <algorithm>
#include <string>

namespace tvnet {

void EdgeSet::add(Eigen::Index i, Eigen::Index j) {
    if (i < 0 || j < 0 || i >= d_ || j >= d_)
        throw DomainError("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") outside a " + std::to_string(d_) + "-node graph");
    if (directed_)
        pairs_.emplace(i, j);
    else
        pairs_.emplace(std::min(i, j), std::max(i, j));
}

bool EdgeSet::contains(Eigen::Index i, Eigen::Index j) const {
    if (!directed_ && i > j) std::swap(i, j);
    return pairs_.count({i, j}) > 0;
}

}  // namespace tvnet
