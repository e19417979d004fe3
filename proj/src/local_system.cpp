#include "tvnet/local_system.hpp"

#include "tvnet/error.hpp"
#include "tvnet/parallel.hpp"

#include <algorithm>

namespace tvnet {

double LocalSystem::loss(const Vector& theta, Eigen::Index response) const {
    return yy[response] - 2.0 * cross.col(response).dot(theta) + theta.dot(gram * theta);
}

LocalSystem build_local_system(const Matrix& regressors, const Matrix& responses,
                               const Vector& times, double tau, double h, Eigen::Index n,
                               const KernelSpec& spec) {
    if (!(h > 0.0)) throw DomainError("bandwidth must be positive");
    const Eigen::Index q = regressors.cols();
    const Eigen::Index r = responses.cols();

    std::vector<Eigen::Index> rows;
    std::vector<double> kw;
    LocalSystem sys;
    sys.tau = tau;
    for (Eigen::Index s = 0; s < times.size(); ++s) {
        const double k = scaled_kernel(spec, times[s] - tau, h);
        if (k <= 0.0) continue;
        rows.push_back(s);
        kw.push_back(k);
        sys.kernel_mass += k;
        sys.kernel_max = std::max(sys.kernel_max, k);
    }
    sys.support = static_cast<long>(rows.size());
    if (sys.support < 2)
        throw DegenerateWindowError("fewer than two observations inside the kernel window at tau = " +
                                    std::to_string(tau));

    const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
    const double inv_n = 1.0 / static_cast<double>(n);
    Matrix z(m, 2 * q);
    Matrix zw(m, 2 * q);
    Matrix y(m, r);
    sys.yy = Vector::Zero(r);
    for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::Index s = rows[static_cast<std::size_t>(k)];
        const double w = kw[static_cast<std::size_t>(k)] * inv_n;
        const double u = (times[s] - tau) / h;
        z.block(k, 0, 1, q) = regressors.row(s);
        z.block(k, q, 1, q) = u * regressors.row(s);
        zw.row(k) = w * z.row(k);
        y.row(k) = responses.row(s);
        sys.yy += w * y.row(k).transpose().cwiseAbs2();
    }
    sys.gram = zw.transpose() * z;
    sys.gram = 0.5 * (sys.gram + sys.gram.transpose()).eval();
    sys.cross = zw.transpose() * y;
    return sys;
}

LocalSystems::LocalSystems(const Matrix& regressors, const Matrix& responses, const Vector& times,
                           const Vector& eval_points, double h, Eigen::Index n,
                           const KernelSpec& spec, unsigned threads)
    : regressors_(regressors),
      responses_(responses),
      q_(regressors.cols()),
      r_(responses.cols()),
      h_(h) {
    if (regressors.rows() != responses.rows() || regressors.rows() != times.size())
        throw ShapeError("regressor, response and time rows disagree");
    systems_.resize(static_cast<std::size_t>(eval_points.size()));
    parallel_for(systems_.size(), threads, [&](std::size_t t) {
        systems_[t] = build_local_system(regressors_, responses_, times,
                                         eval_points[static_cast<Eigen::Index>(t)], h, n, spec);
    });
}

LocalSystems LocalSystems::for_design(const LaggedDesign& design, double h, const KernelSpec& spec,
                                      unsigned threads) {
    return LocalSystems(*design.regressors, design.response_values, design.times, design.grid, h,
                        design.n, spec, threads);
}

LocalSystems LocalSystems::for_panel(const TimeSeriesPanel& panel, Eigen::Index p, double h,
                                     const KernelSpec& spec, unsigned threads) {
    auto reg = lagged_regressors(panel, p);
    const Matrix responses = panel.values().bottomRows(panel.n() - p);
    const Vector times = panel.grid().tail(panel.n() - p);
    return LocalSystems(*reg, responses, times, panel.grid(), h, panel.n(), spec, threads);
}

}  // namespace tvnet
