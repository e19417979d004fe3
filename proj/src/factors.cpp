#include "tvnet/factors.hpp"

#include "tvnet/error.hpp"
#include "tvnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tvnet {

std::string to_string(FactorMode mode) {
    switch (mode) {
        case FactorMode::None: return "none";
        case FactorMode::Constant: return "constant";
        case FactorMode::TimeVarying: return "time-varying";
    }
    return "none";
}

FactorMode factor_mode_from_string(const std::string& s) {
    if (s == "none") return FactorMode::None;
    if (s == "constant") return FactorMode::Constant;
    if (s == "time-varying" || s == "tv") return FactorMode::TimeVarying;
    throw ValidationError("unknown factor mode '" + s + "' (none | constant | time-varying)");
}

namespace {

struct Eigenpairs {
    Matrix vectors;  // n x k, unit columns
    Vector values;   // descending
};

// Leading k eigenpairs of A A' for an n x d matrix A, via the smaller Gram
// matrix when that is safe.
Eigenpairs leading_eigenpairs(const Matrix& a, Eigen::Index k) {
    const Eigen::Index n = a.rows(), d = a.cols();
    Eigenpairs out;
    if (d < n) {
        const Matrix m = a.transpose() * a;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
        if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
        const Vector mu = eig.eigenvalues().reverse();
        const Matrix u = eig.eigenvectors().rowwise().reverse();
        const double top = std::max(mu[0], 0.0);
        if (top > 0.0 && mu[k - 1] > 1e-10 * top) {
            out.values = mu.head(k);
            out.vectors = a * u.leftCols(k);
            for (Eigen::Index i = 0; i < k; ++i) out.vectors.col(i) /= std::sqrt(mu[i]);
            return out;
        }
    }
    const Matrix m = a * a.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
    out.values = eig.eigenvalues().reverse().head(k);
    out.vectors = eig.eigenvectors().rowwise().reverse().leftCols(k);
    return out;
}

// Largest-magnitude entry of every factor column made positive.
void fix_signs(Matrix& factors, Matrix& loadings) {
    for (Eigen::Index c = 0; c < factors.cols(); ++c) {
        Eigen::Index idx = 0;
        factors.col(c).cwiseAbs().maxCoeff(&idx);
        if (factors(idx, c) < 0.0) {
            factors.col(c) *= -1.0;
            loadings.col(c) *= -1.0;
        }
    }
}

void check_k(const TimeSeriesPanel& z, Eigen::Index k) {
    if (k < 1 || k > std::min(z.n(), z.d()))
        throw DomainError("factor count " + std::to_string(k) + " outside 1..min(n, d) = " +
                          std::to_string(std::min(z.n(), z.d())));
}

Vector pca_weights(const Vector& grid, double tau, double h_star, const KernelSpec& spec) {
    Vector w(grid.size());
    for (Eigen::Index t = 0; t < grid.size(); ++t) w[t] = scaled_kernel(spec, grid[t] - tau, h_star);
    const double total = w.sum();
    if (!(total > 0.0))
        throw DegenerateWindowError("no observations inside the local PCA window at tau = " +
                                    std::to_string(tau));
    return w / total;
}

// Rows of the cumulative common components, one matrix per q = 1..k, at row t
// of a weighted data matrix.
void accumulate_rss(const Matrix& zw, const Eigenpairs& eig, Eigen::Index t, double scale,
                    const Eigen::RowVectorXd& z_row, Vector& rss) {
    Eigen::RowVectorXd common = Eigen::RowVectorXd::Zero(zw.cols());
    for (Eigen::Index q = 0; q < eig.vectors.cols(); ++q) {
        common += eig.vectors(t, q) * (eig.vectors.col(q).transpose() * zw) / scale;
        rss[q] += (z_row - common).squaredNorm();
    }
}

}  // namespace

FactorFit pca_factors(const TimeSeriesPanel& z, Eigen::Index k) {
    check_k(z, k);
    const Eigen::Index n = z.n();
    const Eigenpairs eig = leading_eigenpairs(z.values(), k);
    FactorFit fit;
    fit.mode = FactorMode::Constant;
    fit.k = k;
    fit.eigenvalues = eig.values;
    fit.factors = std::sqrt(static_cast<double>(n)) * eig.vectors;
    fit.loadings = z.values().transpose() * fit.factors / static_cast<double>(n);
    fix_signs(fit.factors, fit.loadings);
    fit.common = fit.factors * fit.loadings.transpose();
    return fit;
}

LocalFactors local_pca(const TimeSeriesPanel& z, double tau, double h_star, Eigen::Index k,
                       const KernelSpec& spec) {
    check_k(z, k);
    if (!(h_star > 0.0)) throw DomainError("h_star must be positive");
    const Eigen::Index n = z.n();
    LocalFactors out;
    out.tau = tau;
    out.weights = pca_weights(z.grid(), tau, h_star, spec);
    if ((out.weights.array() > 0.0).count() < k)
        throw DegenerateWindowError("fewer than k observations in the local PCA window");
    const Matrix zw = out.weights.cwiseSqrt().asDiagonal() * z.values();
    const Eigenpairs eig = leading_eigenpairs(zw, k);
    out.eigenvalues = eig.values;
    out.factors = std::sqrt(static_cast<double>(n)) * eig.vectors;
    out.loadings = zw.transpose() * out.factors / static_cast<double>(n);
    fix_signs(out.factors, out.loadings);
    return out;
}

FactorFit local_pca_path(const TimeSeriesPanel& z, double h_star, Eigen::Index k,
                         const KernelSpec& spec, unsigned threads) {
    const Eigen::Index n = z.n();
    FactorFit fit;
    fit.mode = FactorMode::TimeVarying;
    fit.k = k;
    fit.h_star = h_star;
    fit.local.resize(static_cast<std::size_t>(n));
    fit.common.resize(n, z.d());
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t s) {
        const auto t = static_cast<Eigen::Index>(s);
        LocalFactors lf = local_pca(z, z.grid()[t], h_star, k, spec);
        fit.common.row(t) = lf.factors.row(t) * lf.loadings.transpose() / std::sqrt(lf.weights[t]);
        fit.local[s] = std::move(lf);
    });
    return fit;
}

double factor_ic_penalty(FactorMode mode, Eigen::Index n, Eigen::Index d, double h_star) {
    double nn = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    if (mode == FactorMode::TimeVarying) nn *= h_star;
    return (nn + dd) / (nn * dd) * std::log(std::min(nn, dd));
}

FactorNumberSelection select_num_factors(const TimeSeriesPanel& z, FactorMode mode,
                                         Eigen::Index qmax, double h_star, const KernelSpec& spec,
                                         unsigned threads) {
    if (qmax < 1) throw DomainError("qmax must be at least 1");
    if (mode == FactorMode::None) throw DomainError("factor-number selection needs a factor mode");
    if (mode == FactorMode::TimeVarying && !(h_star > 0.0))
        throw DomainError("h_star must be positive in time-varying mode");
    qmax = std::min(qmax, std::min(z.n(), z.d()));
    const Eigen::Index n = z.n();
    const Matrix& zv = z.values();
    Vector rss = Vector::Zero(qmax);
    if (mode == FactorMode::Constant) {
        const Eigenpairs eig = leading_eigenpairs(zv, qmax);
        for (Eigen::Index t = 0; t < n; ++t) accumulate_rss(zv, eig, t, 1.0, zv.row(t), rss);
    } else {
        std::vector<Vector> parts(static_cast<std::size_t>(n), Vector::Zero(qmax));
        parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t s) {
            const auto t = static_cast<Eigen::Index>(s);
            const Vector w = pca_weights(z.grid(), z.grid()[t], h_star, spec);
            const Matrix zw = w.cwiseSqrt().asDiagonal() * zv;
            const Eigenpairs eig = leading_eigenpairs(zw, qmax);
            accumulate_rss(zw, eig, t, std::sqrt(w[t]), zv.row(t), parts[s]);
        });
        for (const Vector& part : parts) rss += part;
    }

    FactorNumberSelection sel;
    sel.rss = rss;
    sel.ic.resize(qmax);
    const double floor = 1e-12 * zv.squaredNorm();
    const double pen = factor_ic_penalty(mode, z.n(), z.d(), h_star);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index q = 0; q < qmax; ++q) {
        sel.ic[q] = std::log(std::max(rss[q], std::max(floor, std::numeric_limits<double>::min()))) +
                    static_cast<double>(q + 1) * pen;
        if (sel.ic[q] < best) {
            best = sel.ic[q];
            sel.k = q + 1;
        }
    }
    return sel;
}

FactorAdjustment factor_adjust(const TimeSeriesPanel& z, FactorMode mode, Eigen::Index k,
                               double h_star, Eigen::Index qmax, const KernelSpec& spec,
                               unsigned threads) {
    FactorAdjustment out{z, {}, {}, false};
    if (mode == FactorMode::None || k == 0) {
        out.fit.mode = FactorMode::None;
        out.fit.common = Matrix::Zero(z.n(), z.d());
        return out;
    }
    if (mode == FactorMode::TimeVarying && !(h_star > 0.0))
        throw DomainError("h_star must be positive in time-varying mode");
    if (k < 0) {
        out.selection = select_num_factors(z, mode, qmax, h_star, spec, threads);
        out.auto_k = true;
        k = out.selection.k;
    }
    out.fit = mode == FactorMode::Constant ? pca_factors(z, k)
                                           : local_pca_path(z, h_star, k, spec, threads);
    out.idiosyncratic = TimeSeriesPanel(z.values() - out.fit.common, z.names());
    return out;
}

}  // namespace tvnet
