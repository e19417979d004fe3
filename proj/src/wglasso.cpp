#include "tvnet/wglasso.hpp"

#include "tvnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tvnet {

double scad_derivative(double z, double lambda, double a0) {
    if (z < 0.0) throw DomainError("SCAD derivative is defined for z >= 0");
    if (lambda < 0.0) throw DomainError("SCAD level must be nonnegative");
    if (lambda == 0.0) return 0.0;
    if (z <= lambda) return lambda;
    return std::max(a0 * lambda - z, 0.0) / (a0 - 1.0);
}

double deviation_stat(const Vector& column) {
    if (column.size() == 0) return 0.0;
    return std::sqrt((column.array() - column.mean()).square().sum());
}

double loss_weight(LossScale scale, Eigen::Index n) {
    if (n < 1) throw DomainError("loss weight needs at least one grid point");
    return scale == LossScale::Mean ? 1.0 / static_cast<double>(n) : 1.0;
}

GroupWeights build_weights(const CoefficientPath& prelim, double lambda2, LossScale scale) {
    if (prelim.stage != Stage::Preliminary)
        throw ValidationError("group weights must come from a preliminary (stage 1) path");
    const Eigen::Index q = prelim.estimates.cols();
    GroupWeights w;
    w.lambda2 = lambda2;
    w.loss_weight = loss_weight(scale, prelim.n());
    w.alpha.resize(q);
    w.beta.resize(q);
    for (Eigen::Index j = 0; j < q; ++j) {
        w.alpha[j] = scad_derivative(prelim.estimates.col(j).norm(), lambda2);
        w.beta[j] = scad_derivative(deviation_stat(prelim.estimates.col(j)), lambda2);
    }
    return w;
}

namespace {

double group_weight(const GroupWeights& w, Eigen::Index g) {
    const Eigen::Index q = w.alpha.size();
    return g < q ? w.alpha[g] : w.beta[g - q];
}

// argmin_u  sum_t a_t u_t^2 - 2 b_t u_t + w ||u||.
// Nonzero solutions satisfy u_t = b_t r / (a_t r + w/2) with r = ||u|| the
// root of sum_t b_t^2 / (a_t r + w/2)^2 = 1.
void group_minimizer(const Vector& a, const Vector& b, double w, Vector& u) {
    const double kappa = 0.5 * w;
    const double bnorm = b.norm();
    if (bnorm <= kappa) {
        u.setZero();
        return;
    }
    if (kappa == 0.0) {
        for (Eigen::Index t = 0; t < a.size(); ++t) u[t] = a[t] > 0.0 ? b[t] / a[t] : 0.0;
        return;
    }
    if (!(a.maxCoeff() > 0.0))
        throw NumericError("group subproblem is unbounded (zero curvature)");
    // f(r) = sum b^2/(a r + kappa)^2 - 1 is convex and decreasing; Newton from
    // r = 0 approaches the root monotonically from the left.
    double r = 0.0;
    for (int it = 0; it < 200; ++it) {
        double f = -1.0, fp = 0.0;
        for (Eigen::Index t = 0; t < a.size(); ++t) {
            const double den = a[t] * r + kappa;
            const double q = b[t] * b[t] / (den * den);
            f += q;
            fp -= 2.0 * q * a[t] / den;
        }
        if (f <= 0.0 || fp == 0.0) break;
        const double step = -f / fp;
        r += step;
        if (step <= 1e-15 * r) break;
    }
    for (Eigen::Index t = 0; t < a.size(); ++t) u[t] = b[t] * r / (a[t] * r + kappa);
}

// Residual gradient R(:, t) = c_t - G_t theta_t for every grid point.
Matrix residual_gradient(const LocalSystems& systems, Eigen::Index response, const Matrix& theta) {
    Matrix resid(theta.rows(), theta.cols());
    for (Eigen::Index t = 0; t < theta.cols(); ++t) {
        const LocalSystem& sys = systems[static_cast<std::size_t>(t)];
        resid.col(t) = sys.cross.col(response) - sys.gram * theta.col(t);
    }
    return resid;
}

CoefficientPath path_from_theta(const Matrix& theta, double h, Eigen::Index response,
                                Eigen::Index lag_order, Eigen::Index d, Stage stage) {
    const Eigen::Index q = theta.rows() / 2;
    CoefficientPath path;
    path.estimates = theta.topRows(q).transpose();
    path.derivatives = theta.bottomRows(q).transpose() / h;
    path.response = response;
    path.lag_order = lag_order;
    path.d = d;
    path.stage = stage;
    return path;
}

}  // namespace

double group_objective(const LocalSystems& systems, Eigen::Index response, const Matrix& theta,
                       const GroupWeights& weights) {
    double obj = 0.0;
    for (Eigen::Index t = 0; t < theta.cols(); ++t) {
        const LocalSystem& sys = systems[static_cast<std::size_t>(t)];
        obj += weights.loss_weight * sys.loss(theta.col(t), response);
    }
    for (Eigen::Index g = 0; g < theta.rows(); ++g) obj += group_weight(weights, g) * theta.row(g).norm();
    return obj;
}

double group_kkt_residual(const LocalSystems& systems, Eigen::Index response, const Matrix& theta,
                          const GroupWeights& weights) {
    const Matrix resid = residual_gradient(systems, response, theta);
    double worst = 0.0;
    for (Eigen::Index g = 0; g < theta.rows(); ++g) {
        const Vector grad = -2.0 * weights.loss_weight * resid.row(g).transpose();
        const double w = group_weight(weights, g);
        const double unorm = theta.row(g).norm();
        double v;
        if (unorm > 0.0)
            v = (grad + w * theta.row(g).transpose() / unorm).norm();
        else
            v = std::max(0.0, grad.norm() - w);
        worst = std::max(worst, v);
    }
    return worst;
}

GroupLassoFit fit_weighted_group_lasso(const LocalSystems& systems, Eigen::Index response,
                                       Eigen::Index lag_order, Eigen::Index d,
                                       const GroupWeights& weights,
                                       const GroupLassoOptions& options, const Matrix* warm) {
    const Eigen::Index n = static_cast<Eigen::Index>(systems.size());
    const Eigen::Index dim = 2 * systems.num_coefficients();
    if (weights.alpha.size() * 2 != dim || weights.beta.size() * 2 != dim)
        throw ShapeError("group weights do not match the design");
    if ((weights.alpha.array() < 0.0).any() || (weights.beta.array() < 0.0).any())
        throw DomainError("group weights must be nonnegative");
    if (!(weights.loss_weight > 0.0)) throw DomainError("loss weight must be positive");
    const double inv_c = 1.0 / weights.loss_weight;

    Matrix theta = warm ? *warm : Matrix::Zero(dim, n);
    Matrix resid = residual_gradient(systems, response, theta);

    // Diagonal curvature of every group, a(g, t) = G_t(g, g).
    Matrix curvature(dim, n);
    for (Eigen::Index t = 0; t < n; ++t)
        curvature.col(t) = systems[static_cast<std::size_t>(t)].gram.diagonal();

    Vector a(n), b(n), u(n);
    auto update_group = [&](Eigen::Index g) {
        a = curvature.row(g).transpose();
        b = resid.row(g).transpose() + a.cwiseProduct(theta.row(g).transpose());
        group_minimizer(a, b, inv_c * group_weight(weights, g), u);
        double change = 0.0;
        for (Eigen::Index t = 0; t < n; ++t) {
            const double delta = u[t] - theta(g, t);
            if (delta == 0.0) continue;
            resid.col(t).noalias() -= delta * systems[static_cast<std::size_t>(t)].gram.col(g);
            theta(g, t) = u[t];
            change = std::max(change, std::abs(delta));
        }
        return change;
    };

    int sweeps = 0;
    bool converged = false;
    while (sweeps < options.max_sweeps) {
        double full = 0.0;
        for (Eigen::Index g = 0; g < dim; ++g) full = std::max(full, update_group(g));
        ++sweeps;
        if (full < options.tolerance) {
            converged = true;
            break;
        }
        std::vector<Eigen::Index> active;
        for (Eigen::Index g = 0; g < dim; ++g)
            if (theta.row(g).squaredNorm() > 0.0) active.push_back(g);
        for (int inner = 0; inner < options.max_inner; ++inner) {
            double change = 0.0;
            for (Eigen::Index g : active) change = std::max(change, update_group(g));
            if (change < options.tolerance) break;
        }
    }

    GroupLassoFit fit;
    fit.kkt_residual = group_kkt_residual(systems, response, theta, weights);
    if (!converged)
        throw ConvergenceError("weighted group LASSO did not converge in " +
                                   std::to_string(options.max_sweeps) + " sweeps",
                               fit.kkt_residual);
    fit.path = path_from_theta(theta, systems.bandwidth(), response, lag_order, d,
                               Stage::WeightedGroup);
    fit.path.lambdas = Vector::Constant(n, weights.lambda2);
    fit.objective = group_objective(systems, response, theta, weights);
    fit.sweeps = sweeps;
    fit.theta = std::move(theta);
    return fit;
}

CoefficientPath fit_weighted_group_lasso(const LaggedDesign& design, double h,
                                         const GroupWeights& weights,
                                         const GroupLassoOptions& options,
                                         const KernelSpec& spec) {
    const LocalSystems systems = LocalSystems::for_design(design, h, spec);
    auto fit = fit_weighted_group_lasso(systems, 0, design.lag_order, design.d, weights, options);
    fit.path.response = design.response;
    return fit.path;
}

double group_lambda_max(const LocalSystems& systems, Eigen::Index response,
                        const CoefficientPath& prelim, LossScale scale) {
    const Eigen::Index q = systems.num_coefficients();
    const Eigen::Index n = static_cast<Eigen::Index>(systems.size());
    const double c = loss_weight(scale, n);
    Matrix score(2 * q, n);
    for (Eigen::Index t = 0; t < n; ++t)
        score.col(t) = 2.0 * c * systems[static_cast<std::size_t>(t)].cross.col(response);
    double lmax = 0.0;
    for (Eigen::Index j = 0; j < q; ++j) {
        lmax = std::max({lmax, score.row(j).norm(), score.row(q + j).norm(),
                         prelim.estimates.col(j).norm(), deviation_stat(prelim.estimates.col(j))});
    }
    return lmax;
}

double gic_value(const LocalSystems& systems, Eigen::Index response, const CoefficientPath& path,
                 double gamma) {
    const Matrix& x = systems.regressors();
    const auto y = systems.responses().col(response);
    const Eigen::Index n = path.n();
    const Eigen::Index rows = x.rows();
    const Eigen::Index offset = n - rows;  // lag order
    double sse = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double fit = x.row(r).dot(path.estimates.row(offset + r));
        sse += (y[r] - fit) * (y[r] - fit);
    }
    const double h = systems.bandwidth();
    const double nn = static_cast<double>(n);
    const double pd = static_cast<double>(path.estimates.cols());
    const double s = static_cast<double>(path.active_levels().size());
    const double gamma_nd = gamma * std::log(std::log(nn)) * std::log(36.0 * pd / (35.0 * h));
    const double floor = std::numeric_limits<double>::min();
    return std::log(std::max(sse / static_cast<double>(rows), floor)) +
           gamma_nd / nn * (36.0 * s / (35.0 * h));
}

Lambda2Selection gic_select_lambda2(const LocalSystems& systems, Eigen::Index response,
                                    const CoefficientPath& prelim, std::vector<double> grid,
                                    double gamma, const GroupLassoOptions& options,
                                    const Lambda2GridOptions& grid_options) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in (0, 1]");
    if (grid.empty()) {
        const double lmax = group_lambda_max(systems, response, prelim, options.loss_scale);
        if (lmax <= 0.0) {
            grid.push_back(0.0);
        } else {
            const double step = std::log(grid_options.min_ratio) / std::max(grid_options.count - 1, 1);
            for (int k = 0; k < grid_options.count; ++k) grid.push_back(lmax * std::exp(step * k));
        }
    }
    std::sort(grid.begin(), grid.end(), std::greater<>());

    Lambda2Selection sel;
    sel.lambdas = grid;
    sel.gic.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    sel.active.assign(grid.size(), -1);
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    Matrix warm;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const GroupWeights weights = build_weights(prelim, grid[k], options.loss_scale);
        GroupLassoFit fit;
        try {
            fit = fit_weighted_group_lasso(systems, response, prelim.lag_order, prelim.d, weights,
                                           options, warm.size() ? &warm : nullptr);
        } catch (const ConvergenceError&) {
            continue;
        }
        warm = fit.theta;
        const double value = gic_value(systems, response, fit.path, gamma);
        sel.gic[k] = value;
        sel.active[k] = static_cast<long>(fit.path.active_levels().size());
        if (value < best) {
            best = value;
            sel.lambda2 = grid[k];
            sel.fit = std::move(fit);
            found = true;
        }
    }
    if (!found) throw SelectionError("no lambda2 candidate converged");
    return sel;
}

Lambda2Selection gic_select_lambda2(const LaggedDesign& design, const CoefficientPath& prelim,
                                    double h, std::vector<double> grid, double gamma,
                                    const GroupLassoOptions& options, const KernelSpec& spec) {
    const LocalSystems systems = LocalSystems::for_design(design, h, spec);
    auto sel = gic_select_lambda2(systems, 0, prelim, std::move(grid), gamma, options);
    sel.fit.path.response = design.response;
    return sel;
}

CoefficientPath fit_oracle(const LocalSystems& systems, Eigen::Index response,
                           Eigen::Index lag_order, Eigen::Index d,
                           const std::vector<bool>& level_support,
                           const std::vector<bool>& derivative_support) {
    const Eigen::Index q = systems.num_coefficients();
    if (static_cast<Eigen::Index>(level_support.size()) != q ||
        static_cast<Eigen::Index>(derivative_support.size()) != q)
        throw ShapeError("support masks must have pd entries");
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < q; ++j)
        if (level_support[static_cast<std::size_t>(j)]) idx.push_back(j);
    for (Eigen::Index j = 0; j < q; ++j)
        if (derivative_support[static_cast<std::size_t>(j)]) idx.push_back(q + j);
    const auto m = static_cast<Eigen::Index>(idx.size());

    const Eigen::Index n = static_cast<Eigen::Index>(systems.size());
    Matrix theta = Matrix::Zero(2 * q, n);
    for (Eigen::Index t = 0; t < n && m > 0; ++t) {
        const LocalSystem& sys = systems[static_cast<std::size_t>(t)];
        if (sys.support < m)
            throw SingularDesignError("local design at tau = " + std::to_string(sys.tau) + " has " +
                                      std::to_string(sys.support) + " observations for " +
                                      std::to_string(m) + " coefficients");
        Matrix g(m, m);
        Vector c(m);
        for (Eigen::Index a = 0; a < m; ++a) {
            c[a] = sys.cross(idx[static_cast<std::size_t>(a)], response);
            for (Eigen::Index b = 0; b < m; ++b)
                g(a, b) = sys.gram(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
        }
        Eigen::LDLT<Matrix> ldlt(g);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-13)
            throw SingularDesignError("rank-deficient local design at tau = " +
                                      std::to_string(sys.tau));
        const Vector sol = ldlt.solve(c);
        for (Eigen::Index a = 0; a < m; ++a) theta(idx[static_cast<std::size_t>(a)], t) = sol[a];
    }
    CoefficientPath path =
        path_from_theta(theta, systems.bandwidth(), response, lag_order, d, Stage::Oracle);
    path.lambdas = Vector::Zero(n);
    return path;
}

CoefficientPath fit_oracle(const LaggedDesign& design, double h,
                           const std::vector<bool>& level_support,
                           const std::vector<bool>& derivative_support, const KernelSpec& spec) {
    const LocalSystems systems = LocalSystems::for_design(design, h, spec);
    CoefficientPath path =
        fit_oracle(systems, 0, design.lag_order, design.d, level_support, derivative_support);
    path.response = design.response;
    return path;
}

CoefficientPath fit_full(const LocalSystems& systems, Eigen::Index response,
                         Eigen::Index lag_order, Eigen::Index d) {
    const std::vector<bool> all(static_cast<std::size_t>(systems.num_coefficients()), true);
    CoefficientPath path = fit_oracle(systems, response, lag_order, d, all, all);
    path.stage = Stage::Full;
    return path;
}

CoefficientPath fit_full(const LaggedDesign& design, double h, const KernelSpec& spec) {
    const LocalSystems systems = LocalSystems::for_design(design, h, spec);
    CoefficientPath path = fit_full(systems, 0, design.lag_order, design.d);
    path.response = design.response;
    return path;
}

}  // namespace tvnet
