#pragma once

#include "tvnet/panel.hpp"

#include <string>
#include <vector>

namespace tvnet {

enum class Stage { Preliminary, WeightedGroup, Oracle, Full };

std::string to_string(Stage stage);
Stage stage_from_string(const std::string& s);

/// Time-varying coefficients of one response equation over the whole grid.
/// Row t holds alpha_{i.}(tau_t) (estimates) and alpha'_{i.}(tau_t)
/// (derivatives); column (k-1)*d + j is lag k of variable j.
struct CoefficientPath {
    Matrix estimates;    // n x pd
    Matrix derivatives;  // n x pd
    Eigen::Index response = 0;
    Eigen::Index lag_order = 1;
    Eigen::Index d = 0;
    Stage stage = Stage::Preliminary;
    /// Tuning value per grid row (stage 1) or a single value repeated.
    Vector lambdas;

    Eigen::Index n() const { return estimates.rows(); }
    /// a_{k,ij}(tau_t) for this path's response i.
    double coefficient(Eigen::Index t, Eigen::Index lag, Eigen::Index j) const {
        return estimates(t, (lag - 1) * d + j);
    }
    /// Indices j with a nonzero estimate column.
    std::vector<Eigen::Index> active_levels() const;
    std::vector<Eigen::Index> active_derivatives() const;
};

/// A_k(tau_t) assembled from the per-response paths.
Matrix transition_matrix(const std::vector<CoefficientPath>& paths, Eigen::Index t,
                         Eigen::Index lag);

}  // namespace tvnet
