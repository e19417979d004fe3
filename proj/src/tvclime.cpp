#include "tvnet/tvclime.hpp"

#include "tvnet/error.hpp"
#include "tvnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tvnet {

ResidualPanel residuals(const TimeSeriesPanel& panel, const std::vector<CoefficientPath>& paths,
                        Eigen::Index lag_order) {
    const Eigen::Index n = panel.n(), d = panel.d();
    if (static_cast<Eigen::Index>(paths.size()) != d)
        throw ShapeError("need one coefficient path per variable (" + std::to_string(d) +
                         "), got " + std::to_string(paths.size()));
    if (lag_order < 1 || lag_order >= n) throw DomainError("invalid lag order");
    ResidualPanel res;
    res.values = Matrix::Zero(n, d);
    res.first_available = lag_order;
    res.source = paths.front().stage == Stage::Preliminary ? "preliminary" : to_string(paths.front().stage);
    for (const auto& path : paths) {
        if (path.d != d || path.n() != n || path.lag_order != lag_order ||
            path.estimates.cols() != lag_order * d)
            throw ShapeError("coefficient path for response " + std::to_string(path.response + 1) +
                             " does not match the panel");
        const Eigen::Index i = path.response;
        for (Eigen::Index t = lag_order; t < n; ++t) {
            double fit = 0.0;
            for (Eigen::Index k = 1; k <= lag_order; ++k)
                fit += path.estimates.row(t).segment((k - 1) * d, d).dot(panel.values().row(t - k));
            res.values(t, i) = panel.values()(t, i) - fit;
        }
    }
    return res;
}

namespace {

Vector available_times(const ResidualPanel& res) {
    const Eigen::Index n = res.n();
    const Eigen::Index m = n - res.first_available;
    Vector times(m);
    for (Eigen::Index r = 0; r < m; ++r)
        times[r] = static_cast<double>(res.first_available + r + 1) / static_cast<double>(n);
    return times;
}

}  // namespace

Matrix local_covariance(const ResidualPanel& res, double tau, double b, const KernelSpec& spec) {
    const Vector times = available_times(res);
    const Vector w = local_linear_weights(times, tau, b, spec);
    const double norm = w.sum();
    if (!(norm > 0.0))
        throw DegenerateWindowError("local-linear weights sum to zero at tau = " +
                                    std::to_string(tau));
    const Eigen::Index d = res.d();
    Matrix sigma = Matrix::Zero(d, d);
    for (Eigen::Index r = 0; r < times.size(); ++r) {
        if (w[r] == 0.0) continue;
        const auto e = res.values.row(res.first_available + r);
        sigma.noalias() += w[r] * e.transpose() * e;
    }
    sigma /= norm;
    return 0.5 * (sigma + sigma.transpose());
}

Matrix repair_covariance(const Matrix& sigma, double floor) {
    if (sigma.rows() != sigma.cols()) throw ShapeError("covariance must be square");
    if (!(floor > 0.0)) throw DomainError("eigenvalue floor must be positive");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
    const Vector& mu = eig.eigenvalues();
    if (mu.size() == 0 || mu[0] > 0.0) return sigma;
    if (!(mu[mu.size() - 1] > 0.0))
        throw NumericError("smoothed covariance has no positive eigenvalue");
    const Vector clipped = mu.cwiseMax(floor * mu[mu.size() - 1]);
    const Matrix out = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

double covariance_effective_size(const ResidualPanel& res, double tau, double b,
                                 const KernelSpec& spec) {
    return effective_sample_size(available_times(res), tau, b, spec);
}

// LP layout: variables omega+ (0..d-1), omega- (d..2d-1), slacks s1 (2d..3d-1)
// and s2 (3d..4d-1); rows
//    Sigma (omega+ - omega-) + s1 =  e_j + lambda 1
//   -Sigma (omega+ - omega-) + s2 = -e_j + lambda 1.
ClimeColumnPath::ClimeColumnPath(const Matrix& sigma, Eigen::Index column,
                                 const LpOptions& options)
    : sigma_(sigma), j_(column), d_(sigma.rows()), m_(2 * sigma.rows()), options_(options) {
    if (sigma.rows() != sigma.cols()) throw ShapeError("covariance must be square");
    if (column < 0 || column >= d_) throw DomainError("CLIME column out of range");
    if (!sigma.allFinite()) throw NumericError("non-finite covariance entries");
    if (options_.max_pivots <= 0) options_.max_pivots = static_cast<int>(50 * m_);
    basis_.resize(static_cast<std::size_t>(m_));
    where_.assign(static_cast<std::size_t>(2 * m_), -1);
    for (Eigen::Index r = 0; r < m_; ++r) {
        basis_[static_cast<std::size_t>(r)] = m_ + r;
        where_[static_cast<std::size_t>(m_ + r)] = r;
    }
    binv_.setIdentity(m_, m_);
    cost_ = Vector::Zero(m_);
    recompute_rhs();
    lambda_cur_ = std::numeric_limits<double>::infinity();
}

Vector ClimeColumnPath::column_of(Eigen::Index k) const {
    Vector a = Vector::Zero(m_);
    if (k < d_) {
        a.head(d_) = sigma_.col(k);
        a.tail(d_) = -sigma_.col(k);
    } else if (k < 2 * d_) {
        a.head(d_) = -sigma_.col(k - d_);
        a.tail(d_) = sigma_.col(k - d_);
    } else {
        a[k - 2 * d_] = 1.0;
    }
    return a;
}

void ClimeColumnPath::recompute_rhs() {
    beta0_ = binv_.col(j_) - binv_.col(d_ + j_);
    beta1_ = binv_.rowwise().sum();
    y_ = binv_.transpose() * cost_;
    sy_ = sigma_ * (y_.head(d_) - y_.tail(d_));
}

void ClimeColumnPath::refactor() {
    Matrix b(m_, m_);
    for (Eigen::Index r = 0; r < m_; ++r) b.col(r) = column_of(basis_[static_cast<std::size_t>(r)]);
    Eigen::PartialPivLU<Matrix> lu(b);
    binv_ = lu.inverse();
    recompute_rhs();
    since_refactor_ = 0;
}

double ClimeColumnPath::advance_to(double target) {
    constexpr double kRateTol = 1e-12;
    for (;;) {
        // Next breakpoint: the largest lambda at which a basic variable that
        // shrinks with lambda reaches zero.
        Eigen::Index leave = -1;
        double next = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (beta1_[i] <= kRateTol) continue;
            const double li = -beta0_[i] / beta1_[i];
            if (li > next) {
                next = li;
                leave = i;
            }
        }
        if (leave < 0 || next <= target) return next;
        next = std::min(next, lambda_cur_);
        if (pivots_ >= options_.max_pivots)
            throw ConvergenceError("CLIME path exceeded the pivot limit", next);

        // Dual ratio test on the pivot row.
        const Vector rho = binv_.row(leave).transpose();
        const Vector v = sigma_ * (rho.head(d_) - rho.tail(d_));
        const Vector& y = y_;
        const Vector& sy = sy_;

        double piv_scale = std::max({v.cwiseAbs().maxCoeff(), rho.cwiseAbs().maxCoeff(), 1e-300});
        const double piv_tol = 1e-11 * piv_scale;
        Eigen::Index enter = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        double best_alpha = 0.0, enter_reduced = 0.0;
        for (Eigen::Index k = 0; k < 2 * m_; ++k) {
            if (where_[static_cast<std::size_t>(k)] >= 0) continue;
            double alpha, reduced;
            if (k < d_) {
                alpha = v[k];
                reduced = 1.0 - sy[k];
            } else if (k < 2 * d_) {
                alpha = -v[k - d_];
                reduced = 1.0 + sy[k - d_];
            } else {
                alpha = rho[k - 2 * d_];
                reduced = -y[k - 2 * d_];
            }
            if (alpha >= -piv_tol) continue;
            const double ratio = std::max(reduced, 0.0) / -alpha;
            if (ratio < best_ratio * (1.0 - 1e-12) ||
                (ratio <= best_ratio * (1.0 + 1e-12) && -alpha > best_alpha)) {
                best_ratio = ratio;
                best_alpha = -alpha;
                enter_reduced = reduced;
                enter = k;
            }
        }
        if (enter < 0)
            throw InfeasibleError("CLIME constraint set is empty for lambda3 below " +
                                  std::to_string(next));

        Vector col;
        if (enter < 2 * d_) {
            const Eigen::Index c = enter < d_ ? enter : enter - d_;
            const double sgn = enter < d_ ? 1.0 : -1.0;
            col = sgn * (binv_.leftCols(d_) * sigma_.col(c) - binv_.rightCols(d_) * sigma_.col(c));
        } else {
            col = binv_.col(enter - 2 * d_);
        }
        const double piv = col[leave];
        const Eigen::RowVectorXd row = binv_.row(leave) / piv;
        binv_.noalias() -= col * row;
        binv_.row(leave) = row;
        const double b0 = beta0_[leave] / piv, b1 = beta1_[leave] / piv;
        beta0_ -= col * b0;
        beta1_ -= col * b1;
        beta0_[leave] = b0;
        beta1_[leave] = b1;

        // Dual update y <- y + (d_q / alpha_q) rho.
        const double step = -enter_reduced / best_alpha;
        y_ += step * rho;
        sy_ += step * v;

        where_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave)])] = -1;
        basis_[static_cast<std::size_t>(leave)] = enter;
        where_[static_cast<std::size_t>(enter)] = leave;
        cost_[leave] = enter < 2 * d_ ? 1.0 : 0.0;
        lambda_cur_ = next;
        ++pivots_;
        if (++since_refactor_ >= options_.refactor_every) refactor();
    }
}

Vector ClimeColumnPath::extract(double lambda) const {
    Vector xb = beta0_ + lambda * beta1_;
    // One step of iterative refinement against the exact basis columns.
    Vector rhs = Vector::Constant(m_, lambda);
    rhs[j_] += 1.0;
    rhs[d_ + j_] -= 1.0;
    Vector bx = Vector::Zero(m_);
    for (Eigen::Index r = 0; r < m_; ++r) {
        const Eigen::Index k = basis_[static_cast<std::size_t>(r)];
        if (k >= 2 * d_) {
            bx[k - 2 * d_] += xb[r];
        } else {
            const double s = k < d_ ? 1.0 : -1.0;
            const Eigen::Index c = k < d_ ? k : k - d_;
            bx.head(d_) += s * xb[r] * sigma_.col(c);
            bx.tail(d_) -= s * xb[r] * sigma_.col(c);
        }
    }
    xb += binv_ * (rhs - bx);

    Vector omega = Vector::Zero(d_);
    for (Eigen::Index r = 0; r < m_; ++r) {
        const Eigen::Index k = basis_[static_cast<std::size_t>(r)];
        const double x = std::max(xb[r], 0.0);
        if (k < d_)
            omega[k] += x;
        else if (k < 2 * d_)
            omega[k - d_] -= x;
    }
    return omega;
}

std::vector<Vector> ClimeColumnPath::solve(const std::vector<double>& lambdas) {
    std::vector<std::size_t> order(lambdas.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return lambdas[a] > lambdas[b]; });
    std::vector<Vector> out(lambdas.size());
    for (std::size_t idx : order) {
        const double lambda = lambdas[idx];
        if (!(lambda >= 0.0)) throw DomainError("lambda3 must be nonnegative");
        if (lambda > lambda_cur_) throw DomainError("CLIME path can only move to smaller lambda3");
        advance_to(lambda);
        out[idx] = extract(lambda);
    }
    return out;
}

Vector clime_column(const Matrix& sigma, Eigen::Index column, double lambda3) {
    ClimeColumnPath path(sigma, column);
    return path.solve({lambda3}).front();
}

Matrix clime_matrix(const Matrix& sigma, double lambda3) {
    Matrix raw(sigma.rows(), sigma.cols());
    for (Eigen::Index j = 0; j < sigma.cols(); ++j) raw.col(j) = clime_column(sigma, j, lambda3);
    return raw;
}

Matrix symmetrize(const Matrix& raw) {
    if (raw.rows() != raw.cols()) throw ShapeError("symmetrize needs a square matrix");
    Matrix out = raw;
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
        for (Eigen::Index j = i + 1; j < raw.cols(); ++j) {
            const double a = raw(i, j), b = raw(j, i);
            const double v = std::abs(a) <= std::abs(b) ? a : b;
            out(i, j) = v;
            out(j, i) = v;
        }
    return out;
}

double ebic_value(const Matrix& omega, const Matrix& sigma, double effective_size) {
    Eigen::LLT<Matrix> llt(omega);
    if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
    const auto diag = llt.matrixLLT().diagonal();
    if ((diag.array() <= 0.0).any()) return std::numeric_limits<double>::quiet_NaN();
    const double logdet = 2.0 * diag.array().log().sum();
    const double trace = omega.cwiseProduct(sigma.transpose()).sum();
    long edges = 0;
    for (Eigen::Index i = 0; i < omega.rows(); ++i)
        for (Eigen::Index j = i + 1; j < omega.cols(); ++j)
            if (omega(i, j) != 0.0) ++edges;
    return -logdet + trace + std::log(effective_size) / effective_size * static_cast<double>(edges);
}

std::vector<double> default_lambda3_grid() {
    std::vector<double> grid;
    const int count = 25;
    const double hi = 0.8, lo = 0.02;
    const double step = std::log(lo / hi) / (count - 1);
    for (int k = 0; k < count; ++k) grid.push_back(hi * std::exp(step * k));
    return grid;
}

Lambda3Selection ebic_select_lambda3(const Matrix& sigma, double effective_size,
                                     std::vector<double> grid) {
    if (grid.empty()) throw SelectionError("empty lambda3 candidate grid");
    std::sort(grid.begin(), grid.end(), std::greater<>());
    const Eigen::Index d = sigma.rows();
    std::vector<Matrix> raws(grid.size(), Matrix(d, d));
    for (Eigen::Index j = 0; j < d; ++j) {
        ClimeColumnPath path(sigma, j);
        std::vector<Vector> cols;
        try {
            cols = path.solve(grid);
        } catch (const InfeasibleError&) {
            // Candidates below the feasibility threshold are dropped below.
            for (std::size_t k = 0; k < grid.size(); ++k) raws[k].col(j).setConstant(
                std::numeric_limits<double>::quiet_NaN());
            ClimeColumnPath retry(sigma, j);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                try {
                    raws[k].col(j) = retry.solve({grid[k]}).front();
                } catch (const InfeasibleError&) {
                    break;
                }
            }
            continue;
        }
        for (std::size_t k = 0; k < grid.size(); ++k) raws[k].col(j) = cols[k];
    }

    Lambda3Selection sel;
    sel.lambdas = grid;
    sel.ebic.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!raws[k].allFinite()) continue;
        Matrix omega = symmetrize(raws[k]);
        const double value = ebic_value(omega, sigma, effective_size);
        sel.ebic[k] = value;
        if (std::isnan(value)) continue;
        if (value < best) {
            best = value;
            sel.lambda3 = grid[k];
            sel.omega = std::move(omega);
            sel.raw = raws[k];
        }
    }
    if (!std::isfinite(best))
        throw SelectionError("no lambda3 candidate gives a positive-definite precision estimate");
    return sel;
}

PrecisionPath precision_path(const ResidualPanel& res, double b, const Lambda3Rule& rule,
                             const KernelSpec& spec, unsigned threads) {
    const Eigen::Index n = res.n();
    PrecisionPath out;
    out.bandwidth = b;
    out.matrices.resize(static_cast<std::size_t>(n));
    out.raw.resize(static_cast<std::size_t>(n));
    out.lambdas.resize(n);
    const std::vector<double> grid = rule.grid.empty() ? default_lambda3_grid() : rule.grid;
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t t) {
        const double tau = static_cast<double>(t + 1) / static_cast<double>(n);
        const Matrix sigma = repair_covariance(local_covariance(res, tau, b, spec));
        if (rule.kind == Lambda3Rule::Kind::Fixed) {
            Matrix raw = clime_matrix(sigma, rule.value);
            out.matrices[t] = symmetrize(raw);
            out.raw[t] = std::move(raw);
            out.lambdas[static_cast<Eigen::Index>(t)] = rule.value;
        } else {
            const double ne = covariance_effective_size(res, tau, b, spec);
            auto sel = ebic_select_lambda3(sigma, ne, grid);
            out.matrices[t] = std::move(sel.omega);
            out.raw[t] = std::move(sel.raw);
            out.lambdas[static_cast<Eigen::Index>(t)] = sel.lambda3;
        }
    });
    return out;
}

}  // namespace tvnet
