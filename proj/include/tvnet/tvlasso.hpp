#pragma once

// Stage 1: local-linear LASSO at each grid point,
//
//     min_{alpha, beta}  L_i(alpha, beta | tau) + lambda1 (|alpha|_1 + h |beta|_1),
//
// solved by cyclic coordinate descent on theta = (alpha, h beta), where the
// penalty is a plain l1 norm.

#include "tvnet/local_system.hpp"
#include "tvnet/path.hpp"

#include <optional>
#include <vector>

namespace tvnet {

struct LassoOptions {
    double tolerance = 1e-7;  // max coordinate change
    int max_sweeps = 10000;
    bool record_trace = false;  // objective after every sweep
};

struct LocalLassoFit {
    Vector alpha;
    Vector beta;
    double tau = 0.0;
    double lambda1 = 0.0;
    double objective = 0.0;
    int sweeps = 0;
    std::vector<double> trace;

    /// theta = (alpha, h beta).
    Vector theta(double h) const;
    long nonzeros() const;
};

/// Coordinate-descent solve on a prebuilt local system.  `warm` (theta scale)
/// seeds the iteration.
LocalLassoFit solve_local_lasso(const LocalSystem& sys, Eigen::Index response, double h,
                                double lambda1, const Vector* warm = nullptr,
                                const LassoOptions& options = {});

LocalLassoFit local_lasso(const LaggedDesign& design, double tau, double h, double lambda1,
                          const LassoOptions& options = {}, const KernelSpec& spec = {});

/// Objective of the penalised local problem at theta = (alpha, h beta).
double local_lasso_objective(const LocalSystem& sys, Eigen::Index response, const Vector& theta,
                             double lambda1);

/// Largest violation of the l1 optimality conditions at theta.
double lasso_kkt_residual(const LocalSystem& sys, Eigen::Index response, const Vector& theta,
                          double lambda1);

/// Smallest lambda1 at which theta = 0 is optimal.
double lasso_lambda_max(const LocalSystem& sys, Eigen::Index response);

/// `count` log-spaced values from lambda_max down to min_ratio * lambda_max.
std::vector<double> log_spaced_grid(double lambda_max, int count, double min_ratio);

double bic_value(const LocalSystem& sys, Eigen::Index response, const LocalLassoFit& fit,
                 double h);

struct Lambda1Selection {
    double lambda1 = 0.0;
    LocalLassoFit fit;
    std::vector<double> lambdas;  // candidates in decreasing order
    std::vector<double> bic;
};

/// Fits whose nonzero count exceeds this fraction of the effective local
/// sample size end the BIC path: the criterion is unreliable once a window
/// can nearly interpolate its data.
inline constexpr double kDefaultDfFraction = 0.5;

/// BIC over a candidate grid; ties resolve to the larger lambda1.  The path
/// stops at the first fit with more than df_fraction * n_e nonzeros (that fit
/// is still scored when it is the first candidate).  df_fraction <= 0 disables
/// the cap.
Lambda1Selection bic_select_lambda1(const LocalSystem& sys, Eigen::Index response, double h,
                                    std::vector<double> grid, const LassoOptions& options = {},
                                    double df_fraction = kDefaultDfFraction);
Lambda1Selection bic_select_lambda1(const LaggedDesign& design, double tau, double h,
                                    std::vector<double> grid, const LassoOptions& options = {},
                                    const KernelSpec& spec = {},
                                    double df_fraction = kDefaultDfFraction);

struct Lambda1Rule {
    enum class Kind { Fixed, Bic } kind = Kind::Bic;
    double value = 0.0;     // fixed mode
    int grid_size = 50;     // BIC mode
    double min_ratio = 1e-3;
    double df_fraction = kDefaultDfFraction;

    static Lambda1Rule fixed(double v) { return {Kind::Fixed, v, 50, 1e-3, kDefaultDfFraction}; }
    static Lambda1Rule bic() { return {}; }
};

CoefficientPath preliminary_path(const LocalSystems& systems, Eigen::Index response,
                                 Eigen::Index lag_order, Eigen::Index d, const Lambda1Rule& rule,
                                 const LassoOptions& options = {});
CoefficientPath preliminary_path(const LaggedDesign& design, double h, const Lambda1Rule& rule,
                                 const LassoOptions& options = {}, const KernelSpec& spec = {});

}  // namespace tvnet
