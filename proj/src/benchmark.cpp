#include "tvnet/benchmark.hpp"

#include "tvnet/error.hpp"
#include "tvnet/parallel.hpp"
#include "tvnet/text.hpp"

#include <sstream>

namespace tvnet {

std::string to_string(Method m) {
    switch (m) {
        case Method::WgLasso: return "wglasso";
        case Method::Oracle: return "oracle";
        case Method::Full: return "full";
        case Method::Clime: return "clime";
        case Method::InfeasibleClime: return "infeasible-clime";
    }
    return "wglasso";
}

Method method_from_string(const std::string& s) {
    for (Method m : all_methods())
        if (to_string(m) == s) return m;
    throw ValidationError("unknown method '" + s +
                          "' (wglasso | oracle | full | clime | infeasible-clime)");
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = {Method::WgLasso, Method::Oracle, Method::Full,
                                                Method::Clime, Method::InfeasibleClime};
    return methods;
}

namespace {

bool wants(const BenchmarkConfig& c, Method m) {
    for (Method x : c.methods)
        if (x == m) return true;
    return false;
}

std::vector<Matrix> lag_one_path(const std::vector<CoefficientPath>& paths) {
    std::vector<Matrix> out(static_cast<std::size_t>(paths.front().n()));
    for (std::size_t t = 0; t < out.size(); ++t)
        out[t] = transition_matrix(paths, static_cast<Eigen::Index>(t), 1);
    return out;
}

MetricRecord var_record(const std::vector<CoefficientPath>& paths, const EdgeSet& edges,
                        const TimeSeriesPanel& panel, const SimulatedData& data) {
    MetricRecord rec;
    add_classification(rec, classification_metrics(edges, data.truth.granger, PairUniverse::Directed));
    rec["EE_A"] = scaled_frobenius_error(lag_one_path(paths), data.truth.transitions);
    const ResidualPanel res = residuals(panel, paths, 1);
    rec["RMSE_e"] = rmse_errors(res.values, data.innovations, res.first_available);
    rec["avgR2"] = average_r2(panel.values(), res.values, res.first_available);
    return rec;
}

MetricRecord clime_record(const PrecisionPath& prec, const SimulatedData& data) {
    MetricRecord rec;
    add_classification(rec, classification_metrics(partial_corr_edges(prec), data.truth.partial,
                                                    PairUniverse::UndirectedOffDiagonal));
    rec["EE_Omega"] = scaled_frobenius_error(prec.matrices, data.truth.precision);
    return rec;
}

}  // namespace

ReplicationOutcome run_replication(const BenchmarkConfig& config, std::uint32_t replication) {
    ScenarioSpec spec{config.example, config.d, config.n, config.seed, replication, config.burn_in};
    const SimulatedData data = generate(spec);
    ReplicationOutcome out;
    out.replication = replication;

    EstimateOptions opts = config.options;
    opts.lag_order = 1;
    opts.threads = 1;

    TimeSeriesPanel panel = data.panel;
    if (config.example == 4 && config.factor_mode != FactorMode::None) {
        double h_star = config.h_star;
        if (!(h_star > 0.0)) h_star = default_bandwidths(panel.n(), panel.d()).h_star;
        panel = factor_adjust(panel, config.factor_mode, config.factor_k, h_star).idiosyncratic;
    }
    const Bandwidths bw = resolve_bandwidths(panel, opts);
    const LocalSystems systems = LocalSystems::for_panel(panel, 1, bw.h, opts.kernel, 1);
    const Eigen::Index d = panel.d();

    auto attempt = [&](Method m, auto&& body) {
        try {
            out.records[to_string(m)] = body();
        } catch (const Error& e) {
            out.failures[to_string(m)] = e.what();
        }
    };

    std::vector<CoefficientPath> wg;
    bool wg_ok = false;
    if (wants(config, Method::WgLasso) || wants(config, Method::Clime)) {
        try {
            wg = fit_var(systems, d, opts).paths;
            wg_ok = true;
        } catch (const Error& e) {
            out.failures[to_string(Method::WgLasso)] = e.what();
            if (wants(config, Method::Clime)) out.failures[to_string(Method::Clime)] = e.what();
        }
    }
    if (wg_ok && wants(config, Method::WgLasso))
        attempt(Method::WgLasso, [&] { return var_record(wg, granger_edges(wg), panel, data); });
    if (wants(config, Method::Oracle))
        attempt(Method::Oracle, [&] {
            std::vector<CoefficientPath> paths;
            for (Eigen::Index i = 0; i < d; ++i)
                paths.push_back(fit_oracle(systems, i, 1, d, data.truth.level_support(i),
                                           data.truth.derivative_support(i)));
            return var_record(paths, granger_edges(paths), panel, data);
        });
    if (wants(config, Method::Full))
        attempt(Method::Full, [&] {
            std::vector<CoefficientPath> paths;
            for (Eigen::Index i = 0; i < d; ++i) paths.push_back(fit_full(systems, i, 1, d));
            return var_record(paths, granger_edges_thresholded(paths, 0.0), panel, data);
        });
    if (wg_ok && wants(config, Method::Clime))
        attempt(Method::Clime, [&] {
            const ResidualPanel res = residuals(panel, wg, 1);
            return clime_record(precision_path(res, bw.b, opts.lambda3, opts.kernel, 1), data);
        });
    if (wants(config, Method::InfeasibleClime))
        attempt(Method::InfeasibleClime, [&] {
            ResidualPanel res{data.innovations, 0, "true-innovations"};
            return clime_record(precision_path(res, bw.b, opts.lambda3, opts.kernel, 1), data);
        });
    return out;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
    if (config.reps < 1) throw ValidationError("replication count must be positive");
    if (config.methods.empty()) throw ValidationError("no methods selected");
    BenchmarkResult result;
    result.config = config;
    result.replications.resize(static_cast<std::size_t>(config.reps));
    parallel_for(result.replications.size(), config.options.threads, [&](std::size_t r) {
        result.replications[r] = run_replication(config, static_cast<std::uint32_t>(r));
    });
    for (Method m : config.methods) {
        const std::string name = to_string(m);
        std::vector<MetricRecord> records;
        long failures = 0;
        for (const auto& rep : result.replications) {
            auto it = rep.records.find(name);
            if (it != rep.records.end())
                records.push_back(it->second);
            else
                ++failures;
        }
        result.failures[name] = failures;
        if (!records.empty()) result.summary[name] = aggregate(records);
    }
    return result;
}

std::string benchmark_csv(const BenchmarkResult& result) {
    std::ostringstream out;
    out << "example,d,n,method,metric,mean,sd,count\n";
    const auto& c = result.config;
    for (Method m : c.methods) {
        const std::string name = to_string(m);
        auto it = result.summary.find(name);
        if (it == result.summary.end()) continue;
        for (const auto& [metric, s] : it->second)
            out << c.example << ',' << c.d << ',' << c.n << ',' << name << ',' << metric << ','
                << format_double(s.mean) << ',' << format_double(s.sd) << ',' << s.count << '\n';
    }
    return out.str();
}

}  // namespace tvnet
