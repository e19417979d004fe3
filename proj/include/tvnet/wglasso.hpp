#pragma once

// Stage 2: global weighted group LASSO over all grid points,
//
//   Q_i(A, B) = c sum_t L_i(alpha_t, beta_t | tau_t)
//             + sum_j p'(||alpha~_j||) ||alpha_j|| + sum_j p'(D~_j) ||h beta_j||,
//
// with loss weight c = 1/n (grid-averaged loss, the default) or c = 1.
// where p' is the SCAD derivative and alpha~ the stage-1 path.  Each of the
// 2pd groups is the whole time path of one level (or scaled derivative)
// coefficient; the loss is separable in t, so a group's Hessian is diagonal.

#include "tvnet/local_system.hpp"
#include "tvnet/path.hpp"

#include <vector>

namespace tvnet {

inline constexpr double kScadShape = 3.7;

/// p'_lambda(z) = lambda [ I(z <= lambda) + (a0 lambda - z)_+ / ((a0 - 1) lambda) I(z > lambda) ].
double scad_derivative(double z, double lambda, double a0 = kScadShape);

/// sqrt of the sum of squared deviations of a path from its time average.
double deviation_stat(const Vector& column);

enum class LossScale { Mean, Sum };

struct GroupWeights {
    Vector alpha;  // pd, penalty on ||alpha_j||
    Vector beta;   // pd, penalty on ||h beta_j||
    double lambda2 = 0.0;
    double loss_weight = 1.0;  // c
};

double loss_weight(LossScale scale, Eigen::Index n);

GroupWeights build_weights(const CoefficientPath& prelim, double lambda2,
                           LossScale scale = LossScale::Mean);

struct GroupLassoOptions {
    double tolerance = 1e-9;  // max coefficient change in a full sweep
    int max_sweeps = 500;     // outer (full) sweeps
    int max_inner = 10000;    // active-set passes per outer sweep
    LossScale loss_scale = LossScale::Mean;  // used when weights are built internally
};

struct GroupLassoFit {
    CoefficientPath path;
    Matrix theta;  // 2pd x n, column t = (alpha(tau_t), h beta(tau_t))
    double objective = 0.0;
    double kkt_residual = 0.0;
    int sweeps = 0;
};

GroupLassoFit fit_weighted_group_lasso(const LocalSystems& systems, Eigen::Index response,
                                       Eigen::Index lag_order, Eigen::Index d,
                                       const GroupWeights& weights,
                                       const GroupLassoOptions& options = {},
                                       const Matrix* warm = nullptr);

CoefficientPath fit_weighted_group_lasso(const LaggedDesign& design, double h,
                                         const GroupWeights& weights,
                                         const GroupLassoOptions& options = {},
                                         const KernelSpec& spec = {});

/// Q_i at theta (2pd x n), excluding the response's constant term.
double group_objective(const LocalSystems& systems, Eigen::Index response, const Matrix& theta,
                       const GroupWeights& weights);

/// Largest group-KKT violation at theta.
double group_kkt_residual(const LocalSystems& systems, Eigen::Index response,
                          const Matrix& theta, const GroupWeights& weights);

/// Smallest lambda2 for which the all-zero path is optimal.
double group_lambda_max(const LocalSystems& systems, Eigen::Index response,
                        const CoefficientPath& prelim, LossScale scale = LossScale::Mean);

/// GIC_i(lambda2) for a fitted path.
double gic_value(const LocalSystems& systems, Eigen::Index response, const CoefficientPath& path,
                 double gamma);

struct Lambda2Selection {
    double lambda2 = 0.0;
    GroupLassoFit fit;
    std::vector<double> lambdas;  // decreasing
    std::vector<double> gic;      // NaN where the fit failed
    std::vector<long> active;     // nonzero level groups per candidate
};

struct Lambda2GridOptions {
    int count = 30;
    double min_ratio = 1e-2;
};

/// Minimises the GIC over a lambda2 grid (empty grid: default log grid below
/// group_lambda_max).  Weights are rebuilt from the same stage-1 path for each
/// candidate.  Ties resolve to the larger lambda2.
Lambda2Selection gic_select_lambda2(const LocalSystems& systems, Eigen::Index response,
                                    const CoefficientPath& prelim, std::vector<double> grid,
                                    double gamma = 1.0, const GroupLassoOptions& options = {},
                                    const Lambda2GridOptions& grid_options = {});

Lambda2Selection gic_select_lambda2(const LaggedDesign& design, const CoefficientPath& prelim,
                                    double h, std::vector<double> grid, double gamma = 1.0,
                                    const GroupLassoOptions& options = {},
                                    const KernelSpec& spec = {});

/// Unpenalised local-linear fit restricted to the given level / derivative
/// columns; excluded columns are exactly zero.  Rank-deficient local systems
/// raise SingularDesignError.
CoefficientPath fit_oracle(const LocalSystems& systems, Eigen::Index response,
                           Eigen::Index lag_order, Eigen::Index d,
                           const std::vector<bool>& level_support,
                           const std::vector<bool>& derivative_support);
CoefficientPath fit_oracle(const LaggedDesign& design, double h,
                           const std::vector<bool>& level_support,
                           const std::vector<bool>& derivative_support,
                           const KernelSpec& spec = {});

/// Unpenalised fit on all 2pd coefficients.
CoefficientPath fit_full(const LocalSystems& systems, Eigen::Index response,
                         Eigen::Index lag_order, Eigen::Index d);
CoefficientPath fit_full(const LaggedDesign& design, double h, const KernelSpec& spec = {});

}  // namespace tvnet
