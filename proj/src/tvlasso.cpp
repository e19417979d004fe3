#include "tvnet/tvlasso.hpp"

#include "tvnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tvnet {

namespace {

double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

// One coordinate pass over `coords`; returns the largest change.
double cd_pass(const Matrix& gram, Vector& resid, Vector& theta, double half_lambda,
               const std::vector<Eigen::Index>& coords) {
    double max_delta = 0.0;
    for (Eigen::Index j : coords) {
        const double gjj = gram(j, j);
        if (gjj <= 0.0) continue;
        const double z = resid[j] + gjj * theta[j];
        const double updated = soft_threshold(z, half_lambda) / gjj;
        const double delta = updated - theta[j];
        if (delta != 0.0) {
            resid.noalias() -= gram.col(j) * delta;
            theta[j] = updated;
            max_delta = std::max(max_delta, std::abs(delta));
        }
    }
    return max_delta;
}

}  // namespace

Vector LocalLassoFit::theta(double h) const {
    Vector th(alpha.size() + beta.size());
    th << alpha, h * beta;
    return th;
}

long LocalLassoFit::nonzeros() const {
    return static_cast<long>((alpha.array() != 0.0).count() + (beta.array() != 0.0).count());
}

double local_lasso_objective(const LocalSystem& sys, Eigen::Index response, const Vector& theta,
                             double lambda1) {
    return sys.loss(theta, response) + lambda1 * theta.lpNorm<1>();
}

double lasso_kkt_residual(const LocalSystem& sys, Eigen::Index response, const Vector& theta,
                          double lambda1) {
    // gradient of the smooth part is -2 (c - G theta)
    const Vector grad = -2.0 * (sys.cross.col(response) - sys.gram * theta);
    double worst = 0.0;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        double v;
        if (theta[j] != 0.0)
            v = std::abs(grad[j] + lambda1 * (theta[j] > 0.0 ? 1.0 : -1.0));
        else
            v = std::max(0.0, std::abs(grad[j]) - lambda1);
        worst = std::max(worst, v);
    }
    return worst;
}

LocalLassoFit solve_local_lasso(const LocalSystem& sys, Eigen::Index response, double h,
                                double lambda1, const Vector* warm, const LassoOptions& options) {
    if (!(lambda1 >= 0.0)) throw DomainError("lambda1 must be nonnegative");
    const Eigen::Index dim = sys.gram.rows();
    if (!sys.gram.allFinite() || !sys.cross.col(response).allFinite())
        throw NumericError("non-finite values in the local design");

    Vector theta = warm ? *warm : Vector::Zero(dim);
    Vector resid = sys.cross.col(response) - sys.gram * theta;
    const double half_lambda = 0.5 * lambda1;

    std::vector<Eigen::Index> all(static_cast<std::size_t>(dim));
    for (Eigen::Index j = 0; j < dim; ++j) all[static_cast<std::size_t>(j)] = j;

    LocalLassoFit fit;
    fit.tau = sys.tau;
    fit.lambda1 = lambda1;
    int sweeps = 0;
    bool converged = false;
    while (sweeps < options.max_sweeps) {
        const double full = cd_pass(sys.gram, resid, theta, half_lambda, all);
        ++sweeps;
        if (options.record_trace)
            fit.trace.push_back(local_lasso_objective(sys, response, theta, lambda1));
        if (full < options.tolerance) {
            converged = true;
            break;
        }
        std::vector<Eigen::Index> active;
        for (Eigen::Index j = 0; j < dim; ++j)
            if (theta[j] != 0.0) active.push_back(j);
        while (sweeps < options.max_sweeps) {
            const double delta = cd_pass(sys.gram, resid, theta, half_lambda, active);
            ++sweeps;
            if (options.record_trace)
                fit.trace.push_back(local_lasso_objective(sys, response, theta, lambda1));
            if (delta < options.tolerance) break;
        }
    }
    if (!converged)
        throw ConvergenceError("local LASSO did not converge in " +
                                   std::to_string(options.max_sweeps) + " sweeps",
                               lasso_kkt_residual(sys, response, theta, lambda1));

    const Eigen::Index q = dim / 2;
    fit.alpha = theta.head(q);
    fit.beta = theta.tail(q) / h;
    fit.objective = local_lasso_objective(sys, response, theta, lambda1);
    fit.sweeps = sweeps;
    return fit;
}

LocalLassoFit local_lasso(const LaggedDesign& design, double tau, double h, double lambda1,
                          const LassoOptions& options, const KernelSpec& spec) {
    const Matrix y = design.response_values;
    const LocalSystem sys =
        build_local_system(*design.regressors, y, design.times, tau, h, design.n, spec);
    return solve_local_lasso(sys, 0, h, lambda1, nullptr, options);
}

double lasso_lambda_max(const LocalSystem& sys, Eigen::Index response) {
    return 2.0 * sys.cross.col(response).cwiseAbs().maxCoeff();
}

std::vector<double> log_spaced_grid(double lambda_max, int count, double min_ratio) {
    if (count < 1) throw DomainError("grid needs at least one value");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count));
    if (count == 1 || lambda_max <= 0.0) {
        grid.push_back(std::max(lambda_max, 0.0));
        return grid;
    }
    const double step = std::log(min_ratio) / (count - 1);
    for (int k = 0; k < count; ++k) grid.push_back(lambda_max * std::exp(step * k));
    return grid;
}

double bic_value(const LocalSystem& sys, Eigen::Index response, const LocalLassoFit& fit,
                 double h) {
    const double loss = sys.loss(fit.theta(h), response);
    const double floor = std::numeric_limits<double>::min();
    const double ne = sys.effective_size();
    return std::log(std::max(loss, floor) / sys.kernel_mass) +
           std::log(ne) / ne * static_cast<double>(fit.nonzeros());
}

Lambda1Selection bic_select_lambda1(const LocalSystem& sys, Eigen::Index response, double h,
                                    std::vector<double> grid, const LassoOptions& options,
                                    double df_fraction) {
    if (grid.empty()) throw SelectionError("empty lambda1 candidate grid");
    for (double v : grid)
        if (!(v >= 0.0)) throw DomainError("lambda1 candidates must be nonnegative");
    std::sort(grid.begin(), grid.end(), std::greater<>());

    Lambda1Selection sel;
    sel.lambdas = grid;
    sel.bic.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    Vector warm = Vector::Zero(sys.gram.rows());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        LocalLassoFit fit;
        try {
            fit = solve_local_lasso(sys, response, h, grid[k], &warm, options);
        } catch (const ConvergenceError&) {
            continue;
        }
        warm = fit.theta(h);
        const bool saturated =
            df_fraction > 0.0 &&
            static_cast<double>(fit.nonzeros()) > df_fraction * sys.effective_size();
        if (saturated && found) break;
        const double value = bic_value(sys, response, fit, h);
        sel.bic[k] = value;
        if (value < best) {
            best = value;
            sel.lambda1 = grid[k];
            sel.fit = std::move(fit);
            found = true;
        }
        if (saturated) break;
    }
    if (!found) throw SelectionError("no lambda1 candidate produced a usable fit");
    return sel;
}

Lambda1Selection bic_select_lambda1(const LaggedDesign& design, double tau, double h,
                                    std::vector<double> grid, const LassoOptions& options,
                                    const KernelSpec& spec, double df_fraction) {
    const Matrix y = design.response_values;
    const LocalSystem sys =
        build_local_system(*design.regressors, y, design.times, tau, h, design.n, spec);
    return bic_select_lambda1(sys, 0, h, std::move(grid), options, df_fraction);
}

CoefficientPath preliminary_path(const LocalSystems& systems, Eigen::Index response,
                                 Eigen::Index lag_order, Eigen::Index d, const Lambda1Rule& rule,
                                 const LassoOptions& options) {
    const auto n = static_cast<Eigen::Index>(systems.size());
    const Eigen::Index q = systems.num_coefficients();
    const double h = systems.bandwidth();
    CoefficientPath path;
    path.estimates.resize(n, q);
    path.derivatives.resize(n, q);
    path.lambdas.resize(n);
    path.response = response;
    path.lag_order = lag_order;
    path.d = d;
    path.stage = Stage::Preliminary;
    for (Eigen::Index t = 0; t < n; ++t) {
        const LocalSystem& sys = systems[static_cast<std::size_t>(t)];
        LocalLassoFit fit;
        if (rule.kind == Lambda1Rule::Kind::Fixed) {
            fit = solve_local_lasso(sys, response, h, rule.value, nullptr, options);
        } else {
            const double lmax = lasso_lambda_max(sys, response);
            auto sel = bic_select_lambda1(sys, response, h,
                                          log_spaced_grid(lmax, rule.grid_size, rule.min_ratio),
                                          options, rule.df_fraction);
            fit = std::move(sel.fit);
        }
        path.estimates.row(t) = fit.alpha.transpose();
        path.derivatives.row(t) = fit.beta.transpose();
        path.lambdas[t] = fit.lambda1;
    }
    return path;
}

CoefficientPath preliminary_path(const LaggedDesign& design, double h, const Lambda1Rule& rule,
                                 const LassoOptions& options, const KernelSpec& spec) {
    const LocalSystems systems = LocalSystems::for_design(design, h, spec);
    CoefficientPath path = preliminary_path(systems, 0, design.lag_order, design.d, rule, options);
    path.response = design.response;
    return path;
}

}  // namespace tvnet
