#pragma once

// Monte-Carlo harness: simulate replications of an example, run the chosen
// estimators and summarise their support-recovery and error measures.

#include "tvnet/factors.hpp"
#include "tvnet/metrics.hpp"
#include "tvnet/pipeline.hpp"
#include "tvnet/simulate.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tvnet {

enum class Method { WgLasso, Oracle, Full, Clime, InfeasibleClime };

std::string to_string(Method m);
Method method_from_string(const std::string& s);
const std::vector<Method>& all_methods();

struct BenchmarkConfig {
    int example = 1;
    Eigen::Index d = 10;
    Eigen::Index n = 200;
    std::uint64_t seed = 1;
    int reps = 1;
    int burn_in = 200;
    std::vector<Method> methods = {Method::WgLasso, Method::Oracle, Method::Clime};
    EstimateOptions options;
    // Example 4 factor step.
    FactorMode factor_mode = FactorMode::TimeVarying;
    Eigen::Index factor_k = 2;  // < 0: information criterion
    double h_star = 0.0;        // 0: default
};

struct ReplicationOutcome {
    std::uint32_t replication = 0;
    std::map<std::string, MetricRecord> records;   // by method name
    std::map<std::string, std::string> failures;   // by method name
};

/// Runs every configured method on one replication; estimator failures are
/// recorded per method rather than thrown.
ReplicationOutcome run_replication(const BenchmarkConfig& config, std::uint32_t replication);

struct BenchmarkResult {
    BenchmarkConfig config;
    std::vector<ReplicationOutcome> replications;
    std::map<std::string, std::map<std::string, MetricSummary>> summary;  // method -> metric
    std::map<std::string, long> failures;                                  // method -> count
};

/// Replications run in parallel (options.threads); each replication is
/// single-threaded, so results do not depend on the thread count.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

/// `method,metric,mean,sd,count` rows in a fixed order.
std::string benchmark_csv(const BenchmarkResult& result);

}  // namespace tvnet
