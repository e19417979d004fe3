#pragma once

// Seeded data-generating processes for the four simulation examples.
//
// Randomness comes from Philox4x32-10.  The key is the 64-bit seed; the
// 128-bit counter is (draw index lo, draw index hi, replication, purpose), so
// every (replication, purpose) pair owns an independent sub-stream and the
// draws of one purpose never shift when another purpose consumes more.

#include "tvnet/edges.hpp"
#include "tvnet/panel.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace tvnet {

inline constexpr const char* kRngName = "philox4x32-10/v1";

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);

enum class StreamPurpose : std::uint32_t {
    Truth = 1,        // Example 1 branch choices
    Innovations = 2,  // VAR noise, including burn-in
    Loadings = 3,     // Example 4 constant loadings
    Factors = 4,      // Example 4 factor innovations
    User = 16,        // free for callers (tests, benchmarks)
};

class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint32_t replication, StreamPurpose purpose);

    std::uint32_t next_u32();
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    /// Standard normal via Box-Muller (both variates are used).
    double normal();

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t replication_, purpose_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

double normal_cdf(double x);

struct ScenarioSpec {
    int example = 1;
    Eigen::Index d = 10;
    Eigen::Index n = 200;
    std::uint64_t seed = 1;
    std::uint32_t replication = 0;
    int burn_in = 200;
};

struct ScenarioTruth {
    int example = 1;
    Eigen::Index d = 0;
    Eigen::Index n = 0;
    std::vector<Matrix> transitions;  // A_1(tau_t), t = 1..n
    std::vector<Matrix> precision;    // Omega(tau_t)
    EdgeSet granger;
    EdgeSet partial;
    // Example 4 only.
    Matrix loadings_constant;         // d x 1
    std::vector<Matrix> loadings;     // Lambda_t, d x 2

    /// Columns of response i's coefficient vector that are not identically zero.
    std::vector<bool> level_support(Eigen::Index i) const;
    /// Columns whose path varies over the grid.
    std::vector<bool> derivative_support(Eigen::Index i) const;
};

ScenarioTruth truth_example1(Eigen::Index d, Eigen::Index n, std::uint64_t seed,
                             std::uint32_t replication = 0);
ScenarioTruth truth_example2(Eigen::Index d, Eigen::Index n);
ScenarioTruth truth_example3(Eigen::Index d, Eigen::Index n);
ScenarioTruth truth_example4(Eigen::Index d, Eigen::Index n, std::uint64_t seed,
                             std::uint32_t replication = 0);
ScenarioTruth make_truth(const ScenarioSpec& spec);

/// Symmetric square root of Omega^{-1}.
Matrix covariance_root(const Matrix& omega);

struct SimulatedData {
    TimeSeriesPanel panel;    // Z for Example 4, X otherwise
    ScenarioTruth truth;
    Matrix innovations;       // e_t, n x d
    Matrix idiosyncratic;     // X_t (equals panel values except in Example 4)
    Matrix factors;           // Example 4: F_t, n x 2
};

/// Simulates X_t = A_1(tau_t) X_{t-1} + Sigma_t^{1/2} eps_t after a burn-in
/// started at zero with tau frozen at the first grid value.
SimulatedData generate(const ScenarioSpec& spec);

/// Same recursion for an arbitrary truth object.
SimulatedData simulate_var(const ScenarioTruth& truth, std::uint64_t seed,
                           std::uint32_t replication, int burn_in);

}  // namespace tvnet
