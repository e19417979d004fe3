#pragma once

// End-to-end estimation: stage 1 and 2 per response, stage 3 on residuals,
// then network extraction.

#include "tvnet/kernels.hpp"
#include "tvnet/networks.hpp"
#include "tvnet/tvclime.hpp"
#include "tvnet/tvlasso.hpp"
#include "tvnet/wglasso.hpp"

#include <vector>

namespace tvnet {

struct EstimateOptions {
    Eigen::Index lag_order = 1;
    double h = 0.0;  // 0: default bandwidth
    double b = 0.0;  // 0: default bandwidth
    double gamma = 1.0;
    Lambda1Rule lambda1 = Lambda1Rule::bic();
    std::vector<double> lambda2_grid;  // empty: log grid below the group lambda_max
    Lambda2GridOptions lambda2_grid_options;
    Lambda3Rule lambda3 = Lambda3Rule::ebic();
    LassoOptions lasso;
    GroupLassoOptions group;
    KernelSpec kernel;
    unsigned threads = 1;
};

/// Fills unset bandwidths from the panel dimensions.
Bandwidths resolve_bandwidths(const TimeSeriesPanel& panel, const EstimateOptions& options);

struct VarFit {
    std::vector<CoefficientPath> preliminary;
    std::vector<CoefficientPath> paths;  // weighted group LASSO
    std::vector<double> lambda2;
    std::vector<std::vector<double>> lambda2_grid;
    std::vector<std::vector<double>> gic;
    double h = 0.0;
};

/// Stages 1 and 2 for every response; responses run in parallel.
VarFit fit_var(const LocalSystems& systems, Eigen::Index d, const EstimateOptions& options);
VarFit fit_var(const TimeSeriesPanel& panel, const EstimateOptions& options);

struct PipelineResult {
    Bandwidths bandwidths;
    VarFit var;
    ResidualPanel residuals;
    PrecisionPath precision;
    NetworkEstimate network;
};

PipelineResult estimate_network(const TimeSeriesPanel& panel, const EstimateOptions& options);

struct OrderSelection {
    int order = 1;
    Vector totals;  // per lag, 1..2 kmax
    Vector ratios;  // R(1..kmax)
};

/// Fits a tv-VAR(2 kmax) through stages 1 and 2 and maximises R(k).
OrderSelection select_var_order(const TimeSeriesPanel& panel, int kmax, double xi,
                                const EstimateOptions& options);

}  // namespace tvnet
