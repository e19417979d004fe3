#include "doctest.h"

#include "oracles.hpp"

#include "tvnet/error.hpp"
#include "tvnet/metrics.hpp"
#include "tvnet/pipeline.hpp"
#include "tvnet/simulate.hpp"
#include "tvnet/wglasso.hpp"

#include <random>

using namespace tvnet;

namespace {

// Full objective c sum_t L_t + sum_g w_g ||theta_g|| evaluated from raw data.
struct GroupOracle {
    std::vector<oracle::LocalProblem> probs;
    Vector weights;  // 2q
    double c = 1.0;
    Eigen::Index q = 0;

    GroupOracle(const LaggedDesign& design, double h, const GroupWeights& w) {
        q = design.num_coefficients();
        for (Eigen::Index t = 0; t < design.n; ++t)
            probs.push_back(oracle::local_problem(*design.regressors, design.response_values,
                                                  design.times, design.grid[t], h, design.n));
        weights.resize(2 * q);
        weights << w.alpha, w.beta;
        c = w.loss_weight;
    }
    Eigen::Index n() const { return static_cast<Eigen::Index>(probs.size()); }
    double objective(const Matrix& theta) const {
        double v = 0.0;
        for (Eigen::Index t = 0; t < n(); ++t) v += c * oracle::local_loss(probs[t], theta.col(t));
        for (Eigen::Index g = 0; g < 2 * q; ++g) v += weights[g] * theta.row(g).norm();
        return v;
    }
    Matrix gradient(const Matrix& theta) const {
        Matrix g(2 * q, n());
        for (Eigen::Index t = 0; t < n(); ++t) {
            const auto& p = probs[t];
            g.col(t) = -2.0 * c * p.z.transpose() * (p.w.asDiagonal() * (p.y - p.z * theta.col(t)));
        }
        return g;
    }
    // Proximal gradient with group soft-thresholding.
    Matrix solve(Matrix theta, int iters) const {
        double lip = 0.0;
        for (const auto& p : probs) {
            const Matrix g = p.z.transpose() * p.w.asDiagonal() * p.z;
            lip = std::max(lip, Eigen::SelfAdjointEigenSolver<Matrix>(g).eigenvalues().maxCoeff());
        }
        const double step = 1.0 / (2.0 * c * lip);
        for (int k = 0; k < iters; ++k) {
            Matrix v = theta - step * gradient(theta);
            for (Eigen::Index g = 0; g < 2 * q; ++g) {
                const double nrm = v.row(g).norm();
                const double shrink = nrm > step * weights[g] ? 1.0 - step * weights[g] / nrm : 0.0;
                v.row(g) *= shrink;
            }
            theta = v;
        }
        return theta;
    }
};

Matrix theta_of(const CoefficientPath& p, double h) {
    Matrix t(2 * p.estimates.cols(), p.n());
    t.topRows(p.estimates.cols()) = p.estimates.transpose();
    t.bottomRows(p.estimates.cols()) = h * p.derivatives.transpose();
    return t;
}

CoefficientPath prelim_with(const Matrix& est) {
    CoefficientPath p;
    p.estimates = est;
    p.derivatives = Matrix::Zero(est.rows(), est.cols());
    p.d = est.cols();
    p.stage = Stage::Preliminary;
    return p;
}

}  // namespace

TEST_CASE("SCAD derivative values") {
    CHECK(scad_derivative(0.5, 1.0) == 1.0);
    CHECK(scad_derivative(3.7, 1.0) == 0.0);
    CHECK(scad_derivative(2.0, 1.0) == doctest::Approx(1.7 / 2.7).epsilon(1e-14));
    CHECK(scad_derivative(2.0, 0.0) == 0.0);
    CHECK_THROWS_AS(scad_derivative(-0.1, 1.0), DomainError);
}

TEST_CASE("deviation statistic") {
    CHECK(deviation_stat(Vector::Constant(7, 2.5)) == 0.0);
    Vector v(3);
    v << 1, 2, 3;
    CHECK(deviation_stat(v) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(deviation_stat(-3.0 * v) == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-14));
    std::mt19937_64 rng(1);
    const Vector r = oracle::random_matrix(rng, 50, 1);
    CHECK(std::abs(deviation_stat((r.array() + 17.0).matrix()) - deviation_stat(r)) <= 1e-10);
}

TEST_CASE("weights from a preliminary path") {
    const double lambda2 = 0.5;
    Matrix est = Matrix::Zero(4, 3);
    est.col(1).setConstant(3.7 * lambda2 / 2.0);  // norm 3.7 lambda2, constant
    est.col(2).setConstant(2.0 * lambda2 / 2.0);  // norm 2 lambda2
    const auto w = build_weights(prelim_with(est), lambda2);
    CHECK(w.alpha[0] == lambda2);
    CHECK(w.alpha[1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(w.alpha[2] == doctest::Approx(lambda2 * 1.7 / 2.7).epsilon(1e-14));
    CHECK(w.beta[1] == lambda2);  // constant column: D = 0
    CHECK(w.loss_weight == 0.25);
    CHECK(build_weights(prelim_with(est), lambda2, LossScale::Sum).loss_weight == 1.0);
    auto bad = prelim_with(est);
    bad.stage = Stage::WeightedGroup;
    CHECK_THROWS_AS(build_weights(bad, lambda2), ValidationError);
}

TEST_CASE("zero weights give the unpenalised per-point fit") {
    const auto panel = oracle::random_var_panel(31, 2, 80);
    const auto design = build_lagged_design(panel, 0, 1);
    const double h = 0.4;
    GroupWeights w{Vector::Zero(2), Vector::Zero(2), 0.0, 1.0 / 80.0};
    GroupLassoOptions opts;
    opts.tolerance = 1e-13;
    const auto path = fit_weighted_group_lasso(design, h, w, opts);
    double dev = 0.0;
    for (Eigen::Index t = 0; t < 80; ++t) {
        const Vector ref = oracle::weighted_ls(oracle::local_problem(
            *design.regressors, design.response_values, design.times, panel.grid()[t], h, 80));
        dev = std::max(dev, (theta_of(path, h).col(t) - ref).cwiseAbs().maxCoeff());
    }
    CHECK(dev <= 1e-6);
    const auto full = fit_full(design, h);
    CHECK((full.estimates - path.estimates).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("huge weights give the zero path") {
    const auto panel = oracle::random_var_panel(32, 2, 50);
    const auto design = build_lagged_design(panel, 1, 1);
    GroupWeights w{Vector::Constant(2, 1e6), Vector::Constant(2, 1e6), 1e6, 1.0 / 50.0};
    const auto path = fit_weighted_group_lasso(design, 0.4, w);
    CHECK(path.estimates.isZero(0.0));
    CHECK(path.derivatives.isZero(0.0));
}

TEST_CASE("one active group matches a proximal-gradient oracle") {
    const auto panel = oracle::random_var_panel(33, 2, 60);
    const auto design = build_lagged_design(panel, 0, 1);
    const double h = 0.4;
    GroupWeights w{Vector::Zero(2), Vector::Zero(2), 0.0, 1.0 / 60.0};
    GroupOracle probe(design, h, w);
    const Matrix g0 = probe.gradient(Matrix::Zero(4, 60));
    w.alpha << 0.0, 1.5 * g0.row(1).norm();
    w.beta << 1.5 * g0.row(2).norm(), 1.5 * g0.row(3).norm();
    w.lambda2 = w.alpha.maxCoeff();
    GroupOracle ref(design, h, w);

    GroupLassoOptions opts;
    opts.tolerance = 1e-12;
    const auto path = fit_weighted_group_lasso(design, h, w, opts);
    const Matrix theta = theta_of(path, h);
    CHECK(path.active_levels() == std::vector<Eigen::Index>{0});
    CHECK(path.active_derivatives().empty());

    std::mt19937_64 rng(5);
    double best = 1e300;
    Matrix best_theta;
    for (int s = 0; s < 20; ++s) {
        const Matrix sol = ref.solve(oracle::random_matrix(rng, 4, 60), 3000);
        const double v = ref.objective(sol);
        if (v < best) {
            best = v;
            best_theta = sol;
        }
    }
    CHECK(std::abs(ref.objective(theta) - best) <= 1e-7);
    CHECK((theta - best_theta).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("group KKT residual and inactive groups") {
    for (std::uint64_t seed = 40; seed < 46; ++seed) {
        const auto panel = oracle::random_var_panel(seed, 3, 70);
        const auto systems = LocalSystems::for_panel(panel, 1, 0.4);
        const auto prelim = preliminary_path(systems, 1, 1, 3, Lambda1Rule::bic());
        const double lambda2 = 0.5 * group_lambda_max(systems, 1, prelim);
        const auto w = build_weights(prelim, lambda2);
        const auto fit = fit_weighted_group_lasso(systems, 1, 1, 3, w);
        CHECK(fit.kkt_residual <= 1e-5);
        CHECK(group_kkt_residual(systems, 1, fit.theta, w) == fit.kkt_residual);

        GroupOracle ref(build_lagged_design(panel, 1, 1), 0.4, w);
        const Matrix grad = ref.gradient(fit.theta);
        for (Eigen::Index g = 0; g < 6; ++g) {
            const double wg = g < 3 ? w.alpha[g] : w.beta[g - 3];
            if (wg == lambda2 && grad.row(g).norm() < lambda2 * (1.0 - 1e-6))
                CHECK(fit.theta.row(g).norm() == 0.0);
        }
    }
}

TEST_CASE("GIC with one candidate") {
    const auto panel = oracle::random_var_panel(50, 2, 60);
    const auto design = build_lagged_design(panel, 0, 1);
    const auto prelim = preliminary_path(design, 0.4, Lambda1Rule::bic());
    const auto sel = gic_select_lambda2(design, prelim, 0.4, {0.05});
    CHECK(sel.lambda2 == 0.05);
    CHECK(sel.lambdas.size() == 1);
}

TEST_CASE("GIC on pure noise selects the empty model") {
    RandomStream rs(77, 0, StreamPurpose::User);
    Matrix x(200, 4);
    for (Eigen::Index t = 0; t < 200; ++t)
        for (Eigen::Index j = 0; j < 4; ++j) x(t, j) = rs.normal();
    const TimeSeriesPanel panel(x);
    const double h = 0.4;
    const auto systems = LocalSystems::for_panel(panel, 1, h);
    const auto prelim = preliminary_path(systems, 0, 1, 4, Lambda1Rule::bic());
    const auto sel = gic_select_lambda2(systems, 0, prelim, {});
    CHECK(sel.fit.path.active_levels().empty());

    // Direct evaluation of the criterion on the sparsest and densest fits.
    const auto design = build_lagged_design(panel, 0, 1);
    auto gic = [&](const CoefficientPath& p) {
        double sse = 0.0;
        for (Eigen::Index r = 0; r < design.regressors->rows(); ++r) {
            const double e = design.response_values[r] - design.regressors->row(r).dot(p.estimates.row(r + 1));
            sse += e * e;
        }
        const double s = static_cast<double>(p.active_levels().size());
        const double gnd = std::log(std::log(200.0)) * std::log(36.0 * 4 / (35.0 * h));
        return std::log(sse / 199.0) + gnd / 200.0 * 36.0 * s / (35.0 * h);
    };
    const auto dense = fit_weighted_group_lasso(systems, 0, 1, 4, build_weights(prelim, sel.lambdas.back()));
    CHECK(dense.path.active_levels().size() > 0);
    CHECK(gic(sel.fit.path) < gic(dense.path));
    CHECK(gic_value(systems, 0, dense.path, 1.0) == doctest::Approx(gic(dense.path)).epsilon(1e-12));
}

TEST_CASE("Example 1 slice: GIC recovers the diagonal support") {
    int exact = 0;
    const int seeds = 50;
    for (int s = 0; s < seeds; ++s) {
        const auto data = generate({1, 10, 200, static_cast<std::uint64_t>(s + 1), 0, 200});
        const auto fit = fit_var(data.panel, EstimateOptions{});
        bool ok = true;
        for (Eigen::Index i = 0; i < 10; ++i)
            if (fit.paths[static_cast<std::size_t>(i)].active_levels() != std::vector<Eigen::Index>{i}) ok = false;
        if (ok) ++exact;
    }
    MESSAGE("exact diagonal support in " << exact << " of " << seeds << " runs");
    CHECK(exact >= 45);
}

TEST_CASE("oracle fits") {
    const auto panel = oracle::random_var_panel(60, 3, 90);
    const auto design = build_lagged_design(panel, 2, 1);
    const std::vector<bool> all(3, true), none(3, false);
    const auto o = fit_oracle(design, 0.4, all, all);
    const auto f = fit_full(design, 0.4);
    CHECK((o.estimates - f.estimates).cwiseAbs().maxCoeff() == 0.0);
    const auto z = fit_oracle(design, 0.4, none, none);
    CHECK(z.estimates.isZero(0.0));
    CHECK(z.derivatives.isZero(0.0));
    const auto partial = fit_oracle(design, 0.4, {true, false, true}, {false, false, true});
    CHECK(partial.estimates.col(1).isZero(0.0));
    CHECK(partial.derivatives.col(0).isZero(0.0));
    CHECK(partial.derivatives.col(1).isZero(0.0));
}

TEST_CASE("oracle beats the penalised fit on Example 1") {
    double wg = 0.0, orc = 0.0;
    for (int s = 0; s < 20; ++s) {
        const auto data = generate({1, 10, 200, static_cast<std::uint64_t>(100 + s), 0, 200});
        const auto systems = LocalSystems::for_panel(data.panel, 1, default_bandwidths(200, 10).h);
        const auto fit = fit_var(systems, 10, EstimateOptions{});
        std::vector<CoefficientPath> op;
        for (Eigen::Index i = 0; i < 10; ++i)
            op.push_back(fit_oracle(systems, i, 1, 10, data.truth.level_support(i),
                                    data.truth.derivative_support(i)));
        std::vector<Matrix> a_wg, a_or;
        for (Eigen::Index t = 0; t < 200; ++t) {
            a_wg.push_back(transition_matrix(fit.paths, t, 1));
            a_or.push_back(transition_matrix(op, t, 1));
        }
        wg += scaled_frobenius_error(a_wg, data.truth.transitions);
        orc += scaled_frobenius_error(a_or, data.truth.transitions);
    }
    CHECK(orc < wg);
}

TEST_CASE("unpenalised full fit") {
    RandomStream rs(3, 0, StreamPurpose::User);
    Matrix x(200, 2);
    for (Eigen::Index t = 0; t < 200; ++t) x.row(t) << rs.normal(), rs.normal();
    const auto design = build_lagged_design(TimeSeriesPanel(x), 0, 1);
    const auto f = fit_full(design, 0.3);
    for (Eigen::Index t : {0, 77, 199}) {
        const Vector ref = oracle::weighted_ls(oracle::local_problem(
            *design.regressors, design.response_values, design.times, design.grid[t], 0.3, 200));
        CHECK((theta_of(f, 0.3).col(t) - ref).cwiseAbs().maxCoeff() <= 1e-9);
    }
    Matrix zero = x;
    zero.col(1).setZero();
    CHECK(fit_full(build_lagged_design(TimeSeriesPanel(zero), 1, 1), 0.3).estimates.isZero(0.0));
}

TEST_CASE("full fit is singular when 2d exceeds the window") {
    const auto data = generate({1, 100, 200, 1, 0, 200});
    const double h = default_bandwidths(200, 100).h;
    CHECK_THROWS_AS(fit_full(build_lagged_design(data.panel, 0, 1), h), SingularDesignError);
}
