#pragma once

// Stage 3: VAR residuals, kernel-smoothed covariance and column-wise CLIME
//
//     min |omega|_1  subject to  || Sigma omega - e_j ||_inf <= lambda3,
//
// solved exactly as a linear program.  The LP right-hand side is affine in
// lambda3, so a parametric dual simplex walks the whole solution path from
// lambda3 = 1 (where omega = 0) downwards; every grid value is read off the
// optimal basis of its path segment.

#include "tvnet/kernels.hpp"
#include "tvnet/panel.hpp"
#include "tvnet/path.hpp"

#include <vector>

namespace tvnet {

struct ResidualPanel {
    Matrix values;                  // n x d; rows before first_available are zero
    Eigen::Index first_available = 0;
    std::string source = "weighted-group";

    Eigen::Index n() const { return values.rows(); }
    Eigen::Index d() const { return values.cols(); }
};

/// e_t = X_t - sum_k A_k(tau_t) X_{t-k} for t = p+1..n.
ResidualPanel residuals(const TimeSeriesPanel& panel, const std::vector<CoefficientPath>& paths,
                        Eigen::Index lag_order);

/// Kernel-smoothed covariance with local-linear weights over the available rows.
Matrix local_covariance(const ResidualPanel& res, double tau, double b,
                        const KernelSpec& spec = {});

/// Local-linear weights are negative near the ends of the sample, so the
/// smoothed covariance can be indefinite there.  Such a matrix has every
/// eigenvalue below floor * (largest eigenvalue) raised to that level;
/// positive-definite input is returned unchanged.
Matrix repair_covariance(const Matrix& sigma, double floor = 1e-4);

/// Effective size of the covariance window (sum K_b / max K_b on available rows).
double covariance_effective_size(const ResidualPanel& res, double tau, double b,
                                 const KernelSpec& spec = {});

struct LpOptions {
    int refactor_every = 256;
    int max_pivots = 0;  // 0: 50 * (2d)
};

/// Parametric LP solver for one CLIME column.
class ClimeColumnPath {
public:
    ClimeColumnPath(const Matrix& sigma, Eigen::Index column, const LpOptions& options = {});

    /// Solutions at each requested lambda (any order; returned in input order).
    std::vector<Vector> solve(const std::vector<double>& lambdas);
    int pivots() const { return pivots_; }

private:
    void refactor();
    void recompute_rhs();
    double advance_to(double target);
    Vector extract(double lambda) const;
    Vector column_of(Eigen::Index k) const;

    Matrix sigma_;
    Eigen::Index j_;
    Eigen::Index d_;
    Eigen::Index m_;
    LpOptions options_;
    std::vector<Eigen::Index> basis_;   // variable in each row
    std::vector<Eigen::Index> where_;   // row of each basic variable, -1 if nonbasic
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> binv_;
    Vector cost_;  // 1 on basic omega variables, 0 on slacks
    Vector y_, sy_;  // duals B^-T cost and Sigma (y_1 - y_2)
    Vector beta0_, beta1_;
    double lambda_cur_;
    int pivots_ = 0;
    int since_refactor_ = 0;
};

Vector clime_column(const Matrix& sigma, Eigen::Index column, double lambda3);

/// Column-wise CLIME on all columns at a single lambda3 (raw, unsymmetrised).
Matrix clime_matrix(const Matrix& sigma, double lambda3);

/// Minimum-magnitude symmetrisation; ties keep the (i, j) entry.
Matrix symmetrize(const Matrix& raw);

double ebic_value(const Matrix& omega, const Matrix& sigma, double effective_size);

struct Lambda3Selection {
    double lambda3 = 0.0;
    Matrix omega;  // symmetrised
    Matrix raw;
    std::vector<double> lambdas;  // decreasing
    std::vector<double> ebic;     // NaN where the candidate is not positive definite
};

/// EBIC over a lambda3 grid; non-positive-definite candidates are skipped.
/// Ties resolve to the larger lambda3.
Lambda3Selection ebic_select_lambda3(const Matrix& sigma, double effective_size,
                                     std::vector<double> grid);

struct Lambda3Rule {
    enum class Kind { Fixed, Ebic } kind = Kind::Ebic;
    double value = 0.1;
    std::vector<double> grid;  // EBIC candidates; empty: default_lambda3_grid()

    static Lambda3Rule fixed(double v) { return {Kind::Fixed, v, {}}; }
    static Lambda3Rule ebic() { return {}; }
};

std::vector<double> default_lambda3_grid();

struct PrecisionPath {
    std::vector<Matrix> matrices;  // symmetrised Omega(tau_t)
    std::vector<Matrix> raw;       // before symmetrisation
    Vector lambdas;                // lambda3 used at each tau_t
    double bandwidth = 0.0;

    Eigen::Index n() const { return static_cast<Eigen::Index>(matrices.size()); }
};

PrecisionPath precision_path(const ResidualPanel& res, double b, const Lambda3Rule& rule,
                             const KernelSpec& spec = {}, unsigned threads = 1);

}  // namespace tvnet
