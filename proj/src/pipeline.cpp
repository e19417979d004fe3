#include "tvnet/pipeline.hpp"

#include "tvnet/error.hpp"
#include "tvnet/parallel.hpp"

namespace tvnet {

Bandwidths resolve_bandwidths(const TimeSeriesPanel& panel, const EstimateOptions& options) {
    Bandwidths bw;
    if (options.h <= 0.0 || options.b <= 0.0) bw = default_bandwidths(panel.n(), panel.d());
    if (options.h > 0.0) bw.h = options.h;
    if (options.b > 0.0) bw.b = options.b;
    if (!(bw.h > 0.0) || !(bw.b > 0.0)) throw DomainError("bandwidths must be positive");
    return bw;
}

VarFit fit_var(const LocalSystems& systems, Eigen::Index d, const EstimateOptions& options) {
    const Eigen::Index p = options.lag_order;
    VarFit fit;
    fit.h = systems.bandwidth();
    const auto count = static_cast<std::size_t>(d);
    fit.preliminary.resize(count);
    fit.paths.resize(count);
    fit.lambda2.resize(count);
    fit.lambda2_grid.resize(count);
    fit.gic.resize(count);
    parallel_for(count, options.threads, [&](std::size_t i) {
        const auto r = static_cast<Eigen::Index>(i);
        const std::string eq = " (equation " + std::to_string(r + 1) + ")";
        CoefficientPath prelim;
        try {
            prelim = preliminary_path(systems, r, p, d, options.lambda1, options.lasso);
        } catch (const Error& e) {
            rethrow_in_stage(e, "stage 1 time-varying LASSO" + eq);
        }
        Lambda2Selection sel;
        try {
            sel = gic_select_lambda2(systems, r, prelim, options.lambda2_grid, options.gamma,
                                     options.group, options.lambda2_grid_options);
        } catch (const Error& e) {
            rethrow_in_stage(e, "stage 2 weighted group LASSO" + eq);
        }
        fit.preliminary[i] = std::move(prelim);
        fit.paths[i] = std::move(sel.fit.path);
        fit.lambda2[i] = sel.lambda2;
        fit.lambda2_grid[i] = std::move(sel.lambdas);
        fit.gic[i] = std::move(sel.gic);
    });
    return fit;
}

VarFit fit_var(const TimeSeriesPanel& panel, const EstimateOptions& options) {
    if (options.lag_order < 1) throw ValidationError("lag order must be at least 1");
    const Bandwidths bw = resolve_bandwidths(panel, options);
    const LocalSystems systems =
        LocalSystems::for_panel(panel, options.lag_order, bw.h, options.kernel, options.threads);
    return fit_var(systems, panel.d(), options);
}

PipelineResult estimate_network(const TimeSeriesPanel& panel, const EstimateOptions& options) {
    if (options.lag_order < 1) throw ValidationError("lag order must be at least 1");
    PipelineResult out;
    out.bandwidths = resolve_bandwidths(panel, options);
    EstimateOptions opts = options;
    opts.h = out.bandwidths.h;
    opts.b = out.bandwidths.b;
    out.var = fit_var(panel, opts);
    try {
        out.residuals = residuals(panel, out.var.paths, options.lag_order);
        out.precision = precision_path(out.residuals, out.bandwidths.b, options.lambda3,
                                       options.kernel, options.threads);
    } catch (const Error& e) {
        rethrow_in_stage(e, "stage 3 time-varying CLIME");
    }
    try {
        out.network = build_network(out.var.paths, &out.precision);
    } catch (const Error& e) {
        rethrow_in_stage(e, "network extraction");
    }
    return out;
}

OrderSelection select_var_order(const TimeSeriesPanel& panel, int kmax, double xi,
                                const EstimateOptions& options) {
    if (kmax < 1) throw ValidationError("kmax must be at least 1");
    if (!(xi > 0.0)) throw ValidationError("xi_A must be positive");
    EstimateOptions opts = options;
    opts.lag_order = 2 * kmax;
    if (opts.lag_order >= panel.n())
        throw InsufficientDataError("panel too short for a tv-VAR(" +
                                    std::to_string(opts.lag_order) + ")");
    const VarFit fit = fit_var(panel, opts);
    OrderSelection sel;
    sel.totals = lag_norm_totals(fit.paths, xi);
    sel.ratios = ratio_criterion(sel.totals, kmax);
    sel.order = argmax_order(sel.ratios);
    return sel;
}

}  // namespace tvnet
