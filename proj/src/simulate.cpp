#include "tvnet/simulate.hpp"

#include "tvnet/error.hpp"

#include <cmath>
#include <string>

namespace tvnet {

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint32_t replication, StreamPurpose purpose)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      replication_(replication),
      purpose_(static_cast<std::uint32_t>(purpose)) {}

std::uint32_t RandomStream::next_u32() {
    if (used_ == 4) {
        buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_),
                                 static_cast<std::uint32_t>(block_ >> 32), replication_, purpose_},
                                key_);
        ++block_;
        used_ = 0;
    }
    return buffer_[static_cast<std::size_t>(used_++)];
}

double RandomStream::uniform() {
    const std::uint64_t a = next_u32() >> 5, b = next_u32() >> 6;
    return (static_cast<double>(a * 67108864ull + b) + 0.5) / 9007199254740992.0;
}

double RandomStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

double phi_tau(double tau) { return normal_cdf(5.0 * (tau - 0.5)); }

void finish_truth(ScenarioTruth& truth) {
    const Eigen::Index d = truth.d;
    truth.granger = EdgeSet(d, true);
    truth.partial = EdgeSet(d, false);
    for (Eigen::Index t = 0; t < truth.n; ++t) {
        const Matrix& a = truth.transitions[static_cast<std::size_t>(t)];
        const Matrix& w = truth.precision[static_cast<std::size_t>(t)];
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
                if (a(i, j) != 0.0) truth.granger.add(i, j);
                if (i < j && w(i, j) != 0.0) truth.partial.add(i, j);
            }
    }
}

// The printed Example 2 band (1, -a, a) is indefinite once a > 4/9, which
// happens for tau below about 0.43.  There the spectrum is lifted so the
// smallest eigenvalue is 0.1 and the matrix is rescaled to unit diagonal,
// keeping the band support and its signs.
void lift_precision(Matrix& w) {
    const double floor = 0.1;
    const double mu = Eigen::SelfAdjointEigenSolver<Matrix>(w, Eigen::EigenvaluesOnly).eigenvalues()[0];
    if (mu >= floor) return;
    const double c = floor - mu;
    w.diagonal().array() += c;
    w /= 1.0 + c;
}

ScenarioTruth blank_truth(int example, Eigen::Index d, Eigen::Index n) {
    if (d < 1) throw DomainError("d must be positive");
    if (n < 2) throw DomainError("n must be at least 2");
    ScenarioTruth truth;
    truth.example = example;
    truth.d = d;
    truth.n = n;
    truth.transitions.assign(static_cast<std::size_t>(n), Matrix::Zero(d, d));
    truth.precision.assign(static_cast<std::size_t>(n), Matrix::Identity(d, d));
    return truth;
}

}  // namespace

std::vector<bool> ScenarioTruth::level_support(Eigen::Index i) const {
    std::vector<bool> out(static_cast<std::size_t>(d), false);
    for (const Matrix& a : transitions)
        for (Eigen::Index j = 0; j < d; ++j)
            if (a(i, j) != 0.0) out[static_cast<std::size_t>(j)] = true;
    return out;
}

std::vector<bool> ScenarioTruth::derivative_support(Eigen::Index i) const {
    std::vector<bool> out(static_cast<std::size_t>(d), false);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double first = transitions.front()(i, j);
        for (const Matrix& a : transitions)
            if (a(i, j) != first) {
                out[static_cast<std::size_t>(j)] = true;
                break;
            }
    }
    return out;
}

ScenarioTruth truth_example1(Eigen::Index d, Eigen::Index n, std::uint64_t seed,
                             std::uint32_t replication) {
    if (d % 2 != 0) throw DomainError("Example 1 needs an even dimension, got d = " + std::to_string(d));
    ScenarioTruth truth = blank_truth(1, d, n);
    RandomStream stream(seed, replication, StreamPurpose::Truth);
    std::vector<bool> rising(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) rising[static_cast<std::size_t>(i)] = stream.uniform() < 0.5;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double tau = static_cast<double>(t + 1) / static_cast<double>(n);
        const double phi = phi_tau(tau);
        Matrix& a = truth.transitions[static_cast<std::size_t>(t)];
        for (Eigen::Index i = 0; i < d; ++i)
            a(i, i) = rising[static_cast<std::size_t>(i)] ? 0.64 * phi : 0.64 - 0.64 * phi;
        Matrix& w = truth.precision[static_cast<std::size_t>(t)];
        for (Eigen::Index m = 0; m < d; m += 2) w(m, m + 1) = w(m + 1, m) = 1.4 * phi - 0.7;
    }
    finish_truth(truth);
    return truth;
}

ScenarioTruth truth_example2(Eigen::Index d, Eigen::Index n) {
    ScenarioTruth truth = blank_truth(2, d, n);
    for (Eigen::Index t = 0; t < n; ++t) {
        const double tau = static_cast<double>(t + 1) / static_cast<double>(n);
        const double phi = phi_tau(tau);
        Matrix& a = truth.transitions[static_cast<std::size_t>(t)];
        Matrix& w = truth.precision[static_cast<std::size_t>(t)];
        for (Eigen::Index i = 0; i < d; ++i) {
            a(i, i) = 0.7 * phi;
            if (i + 1 < d) {
                a(i, i + 1) = 0.7 - 0.7 * phi;
                w(i, i + 1) = w(i + 1, i) = 0.7 * phi - 0.7;
            }
            if (i + 2 < d) w(i, i + 2) = w(i + 2, i) = 0.7 - 0.7 * phi;
        }
        lift_precision(w);
    }
    finish_truth(truth);
    return truth;
}

ScenarioTruth truth_example3(Eigen::Index d, Eigen::Index n) {
    ScenarioTruth truth = blank_truth(3, d, n);
    for (Eigen::Index t = 0; t < n; ++t) {
        const double tau = static_cast<double>(t + 1) / static_cast<double>(n);
        Matrix& a = truth.transitions[static_cast<std::size_t>(t)];
        Matrix& w = truth.precision[static_cast<std::size_t>(t)];
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
                const double lag = static_cast<double>(std::abs(i - j));
                a(i, j) = std::pow(0.4 - 0.1 * tau, lag + 1.0);
                w(i, j) = std::pow(0.8 - 0.1 * tau, lag);
            }
    }
    finish_truth(truth);
    return truth;
}

ScenarioTruth truth_example4(Eigen::Index d, Eigen::Index n, std::uint64_t seed,
                             std::uint32_t replication) {
    ScenarioTruth truth = truth_example2(d, n);
    truth.example = 4;
    RandomStream stream(seed, replication, StreamPurpose::Loadings);
    truth.loadings_constant.resize(d, 1);
    for (Eigen::Index i = 0; i < d; ++i) truth.loadings_constant(i, 0) = stream.normal();
    truth.loadings.assign(static_cast<std::size_t>(n), Matrix(d, 2));
    for (Eigen::Index t = 0; t < n; ++t) {
        Matrix& lam = truth.loadings[static_cast<std::size_t>(t)];
        lam.col(0) = truth.loadings_constant.col(0);
        const double tn = static_cast<double>(t + 1) / static_cast<double>(n);
        for (Eigen::Index i = 0; i < d; ++i) {
            const double id = static_cast<double>(i + 1) / static_cast<double>(d);
            lam(i, 1) = 2.0 / (1.0 + std::exp(-2.0 * (10.0 * tn - 5.0 * id - 2.0)));
        }
    }
    return truth;
}

ScenarioTruth make_truth(const ScenarioSpec& spec) {
    switch (spec.example) {
        case 1: return truth_example1(spec.d, spec.n, spec.seed, spec.replication);
        case 2: return truth_example2(spec.d, spec.n);
        case 3: return truth_example3(spec.d, spec.n);
        case 4: return truth_example4(spec.d, spec.n, spec.seed, spec.replication);
        default: throw DomainError("unknown example " + std::to_string(spec.example));
    }
}

Matrix covariance_root(const Matrix& omega) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(omega);
    if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition of the precision failed");
    const Vector mu = eig.eigenvalues();
    if (mu.minCoeff() < 1e-8)
        throw DomainError("truth precision matrix is not positive definite (smallest eigenvalue " +
                          std::to_string(mu.minCoeff()) + ")");
    const Vector scale = mu.cwiseMax(1e-12).cwiseSqrt().cwiseInverse();
    return eig.eigenvectors() * scale.asDiagonal() * eig.eigenvectors().transpose();
}

SimulatedData simulate_var(const ScenarioTruth& truth, std::uint64_t seed,
                           std::uint32_t replication, int burn_in) {
    if (burn_in < 0) throw DomainError("burn-in must be nonnegative");
    const Eigen::Index d = truth.d, n = truth.n;
    std::vector<Matrix> roots(static_cast<std::size_t>(n));
    for (Eigen::Index t = 0; t < n; ++t)
        roots[static_cast<std::size_t>(t)] = covariance_root(truth.precision[static_cast<std::size_t>(t)]);

    RandomStream stream(seed, replication, StreamPurpose::Innovations);
    Vector eps(d), x = Vector::Zero(d);
    auto draw = [&](Eigen::Index t) {
        for (Eigen::Index j = 0; j < d; ++j) eps[j] = stream.normal();
        return Vector(roots[static_cast<std::size_t>(t)] * eps);
    };
    for (int s = 0; s < burn_in; ++s) x = truth.transitions.front() * x + draw(0);

    Matrix values(n, d), innovations(n, d);
    for (Eigen::Index t = 0; t < n; ++t) {
        const Vector e = draw(t);
        x = truth.transitions[static_cast<std::size_t>(t)] * x + e;
        values.row(t) = x.transpose();
        innovations.row(t) = e.transpose();
    }
    return SimulatedData{TimeSeriesPanel(values), truth, innovations, values, Matrix()};
}

SimulatedData generate(const ScenarioSpec& spec) {
    ScenarioTruth truth = make_truth(spec);
    SimulatedData data = simulate_var(truth, spec.seed, spec.replication, spec.burn_in);
    if (spec.example != 4) return data;

    const Eigen::Index n = spec.n;
    RandomStream stream(spec.seed, spec.replication, StreamPurpose::Factors);
    const double phi[2] = {0.6, 0.3};
    Matrix f(n, 2);
    double state[2] = {stream.normal(), stream.normal()};
    for (Eigen::Index t = 0; t < n; ++t)
        for (int k = 0; k < 2; ++k) {
            state[k] = phi[k] * state[k] + std::sqrt(1.0 - phi[k] * phi[k]) * stream.normal();
            f(t, k) = state[k];
        }
    Matrix z = data.idiosyncratic;
    for (Eigen::Index t = 0; t < n; ++t)
        z.row(t) += (data.truth.loadings[static_cast<std::size_t>(t)] * f.row(t).transpose()).transpose();
    data.panel = TimeSeriesPanel(z);
    data.factors = std::move(f);
    return data;
}

}  // namespace tvnet
