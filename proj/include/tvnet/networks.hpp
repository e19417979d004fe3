#pragma once

// Uniform Granger and partial-correlation networks from estimated paths, and
// the lag-order ratio criterion.

#include "tvnet/edges.hpp"
#include "tvnet/path.hpp"
#include "tvnet/tvclime.hpp"

#include <string>
#include <vector>

namespace tvnet {

struct NetworkEstimate {
    Eigen::Index d = 0;
    EdgeSet granger;
    EdgeSet partial;
    Matrix granger_evidence;         // max_{k,t} |a_{k,ij}(tau_t)|
    std::vector<Matrix> lag_energy;  // per lag: sum_t a_{k,ij}(tau_t)^2
    Matrix partial_evidence;         // max_t |omega_ij(tau_t)|
    std::string granger_stage;
    Vector lambda3;                  // per grid point
};

/// Directed edge (i, j) iff sum_t a_{k,ij}(tau_t)^2 > 0 for some lag k.  Paths
/// from the unpenalised full fit have no exact zeros and are rejected.
EdgeSet granger_edges(const std::vector<CoefficientPath>& paths);

/// Edge iff some |a_{k,ij}(tau_t)| exceeds the threshold (strictly).
EdgeSet granger_edges_thresholded(const std::vector<CoefficientPath>& paths, double threshold);

/// Undirected edge {i, j}, i != j, iff |omega_ij(tau_t)| >= lambda3(tau_t) for some t.
EdgeSet partial_corr_edges(const PrecisionPath& prec);

NetworkEstimate build_network(const std::vector<CoefficientPath>& paths, const PrecisionPath* prec);

/// sum_t max(||A_{t,l}||_F, xi) for l = 1..p.
Vector lag_norm_totals(const std::vector<CoefficientPath>& paths, double xi);

/// R(k) for k = 1..kmax from floored per-lag totals over lags 1..2 kmax.
Vector ratio_criterion(const Vector& lag_totals, int kmax);

/// argmax of R(k); ties go to the smaller k.  Returns a 1-based order.
int argmax_order(const Vector& ratios);

/// Sorted `src,dst,type,evidence` rows (1-based variable names when given).
/// Granger rows run from the lagged variable j to the response i.
std::string edge_list_csv(const NetworkEstimate& net, const std::vector<std::string>& names);

struct EdgeLists {
    EdgeSet granger;
    EdgeSet partial;
};

/// Reads edge_list_csv output back.  Nodes are matched against names, with
/// x<k> accepted for variable k when names are not given.
EdgeLists parse_edge_list_csv(const std::string& text, Eigen::Index d,
                              const std::vector<std::string>& names = {});

/// Long-format time profiles of every edge: type,src,dst,lag,t,tau,value.
std::string edge_profile_csv(const NetworkEstimate& net, const std::vector<CoefficientPath>& paths,
                             const PrecisionPath* prec, const std::vector<std::string>& names);

}  // namespace tvnet
