#include "doctest.h"

#include "tvnet/error.hpp"
#include "tvnet/simulate.hpp"

#include <Eigen/Eigenvalues>

using namespace tvnet;

TEST_CASE("Philox4x32-10 known answers") {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    CHECK(philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}) ==
          A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32_10(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                        A2{0xffffffffu, 0xffffffffu}) ==
          A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32_10(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                        A2{0xa4093822u, 0x299f31d0u}) ==
          A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("random streams") {
    RandomStream a(5, 0, StreamPurpose::User), b(5, 0, StreamPurpose::User);
    RandomStream c(5, 1, StreamPurpose::User), e(5, 0, StreamPurpose::Innovations);
    bool differs_rep = false, differs_purpose = false;
    for (int k = 0; k < 16; ++k) {
        const auto x = a.next_u32();
        CHECK(x == b.next_u32());
        differs_rep |= x != c.next_u32();
        differs_purpose |= x != e.next_u32();
    }
    CHECK(differs_rep);
    CHECK(differs_purpose);

    RandomStream u(9, 0, StreamPurpose::User);
    double s = 0.0, s2 = 0.0, lo = 1.0, hi = 0.0;
    const int m = 100000;
    for (int k = 0; k < m; ++k) {
        const double v = u.uniform();
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        const double z = u.normal();
        s += z;
        s2 += z * z;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(std::abs(s / m) < 0.02);
    CHECK(std::abs(s2 / m - 1.0) < 0.02);
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(2.5) == doctest::Approx(0.9937903346742238).epsilon(1e-14));
}

TEST_CASE("Example 1 truth") {
    const auto truth = truth_example1(8, 10, 3);
    const Matrix& mid = truth.transitions[4];  // tau = 0.5
    CHECK((mid - 0.32 * Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((truth.precision[4] - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-15);
    const Matrix& last = truth.transitions[9];  // tau = 1
    int rising = 0;
    for (Eigen::Index i = 0; i < 8; ++i) {
        const double a = last(i, i);
        const bool up = std::abs(a - 0.64 * normal_cdf(2.5)) < 1e-15;
        CHECK((up || std::abs(a - (0.64 - 0.64 * normal_cdf(2.5))) < 1e-15));
        rising += up;
    }
    CHECK(0.64 * normal_cdf(2.5) == doctest::Approx(0.63602).epsilon(1e-5));
    CHECK(truth.granger.size() == 8);
    for (Eigen::Index i = 0; i < 8; ++i) CHECK(truth.granger.contains(i, i));
    CHECK(truth.precision[9](0, 1) == doctest::Approx(1.4 * normal_cdf(2.5) - 0.7));
    CHECK(truth.precision[9](0, 2) == 0.0);
    CHECK(truth.partial.size() == 4);
    CHECK_THROWS_AS(truth_example1(7, 10, 3), DomainError);
    CHECK(truth_example1(8, 10, 3).transitions == truth.transitions);
    MESSAGE(rising << " of 8 entries rise");
}

TEST_CASE("Example 2 truth") {
    const auto truth = truth_example2(6, 10);
    const Matrix& a = truth.transitions[4];
    const Matrix& w = truth.precision[4];
    for (Eigen::Index i = 0; i < 6; ++i) {
        CHECK(a(i, i) == doctest::Approx(0.35));
        CHECK(w(i, i) == 1.0);
        if (i + 1 < 6) {
            CHECK(a(i, i + 1) == doctest::Approx(0.35));
            CHECK(w(i, i + 1) == doctest::Approx(-0.35));
        }
        if (i + 2 < 6) CHECK(w(i, i + 2) == doctest::Approx(0.35));
        if (i + 3 < 6) CHECK(w(i, i + 3) == 0.0);
        if (i > 0) CHECK(a(i, i - 1) == 0.0);
    }
    CHECK(truth.granger.size() == 6 + 5);
    for (Eigen::Index i = 0; i + 1 < 6; ++i) CHECK(truth.granger.contains(i, i + 1));
}

TEST_CASE("Example 2 precision is positive definite at d = 50") {
    const auto truth = truth_example2(50, 200);
    double smallest = 1e300;
    for (const Matrix& w : truth.precision) {
        smallest = std::min(smallest, Eigen::SelfAdjointEigenSolver<Matrix>(w).eigenvalues()[0]);
        CHECK(w.diagonal().isOnes(0.0));
    }
    CHECK(smallest > 0.0);
}

TEST_CASE("Example 3 truth") {
    const auto truth = truth_example3(5, 1000);
    CHECK(truth.transitions.front()(2, 2) == doctest::Approx(0.4 - 0.1 / 1000.0));
    const Matrix& a = truth.transitions.back();
    const Matrix& w = truth.precision.back();
    CHECK(a(0, 0) == doctest::Approx(0.3));
    CHECK(w(0, 2) == doctest::Approx(0.49));
    CHECK(w(4, 2) == doctest::Approx(0.49));
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((w - w.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i + 1 < 5; ++i)
        for (Eigen::Index j = 0; j + 1 < 5; ++j) CHECK(a(i, j) == a(i + 1, j + 1));
}

TEST_CASE("Example 4 loadings") {
    const auto truth = truth_example4(5, 10, 2);
    for (const Matrix& lam : truth.loadings) {
        CHECK(lam.col(1).minCoeff() > 0.0);
        CHECK(lam.col(1).maxCoeff() < 2.0);
        CHECK(lam.col(0) == truth.loadings_constant.col(0));
    }
    // t/n = 0.7, i/d = 0.4
    CHECK(truth.loadings[6](1, 1) == doctest::Approx(2.0 / (1.0 + std::exp(-6.0))).epsilon(1e-14));
    CHECK(truth.loadings[6](1, 1) == doctest::Approx(1.99505).epsilon(1e-5));
    CHECK(truth.transitions == truth_example2(5, 10).transitions);
}

TEST_CASE("Example 4 factors have unit variance") {
    const auto data = generate({4, 3, 20000, 6, 0, 200});
    for (Eigen::Index k = 0; k < 2; ++k) {
        const Vector f = data.factors.col(k);
        const double var = (f.array() - f.mean()).square().mean();
        CHECK(var == doctest::Approx(1.0).epsilon(0.06));
    }
    for (Eigen::Index t : {0, 5000, 19999}) {
        const Vector z = data.truth.loadings[static_cast<std::size_t>(t)] * data.factors.row(t).transpose() +
                         data.idiosyncratic.row(t).transpose();
        CHECK((z.transpose() - data.panel.values().row(t)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("white noise scenario") {
    ScenarioTruth truth;
    truth.d = 4;
    truth.n = 5000;
    truth.transitions.assign(5000, Matrix::Zero(4, 4));
    truth.precision.assign(5000, Matrix::Identity(4, 4));
    const auto data = simulate_var(truth, 12, 0, 50);
    const Matrix& x = data.panel.values();
    const Matrix centred = x.rowwise() - x.colwise().mean();
    const Matrix cov = centred.transpose() * centred / 5000.0;
    CHECK((cov - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 0.1);
    CHECK(x == data.innovations);
}

TEST_CASE("generation is a pure function of the scenario") {
    const ScenarioSpec spec{1, 6, 80, 21, 3, 200};
    const auto a = generate(spec), b = generate(spec);
    CHECK(a.panel.values() == b.panel.values());
    CHECK(a.innovations == b.innovations);
    CHECK(a.truth.transitions == truth_example1(6, 80, 21, 3).transitions);
    auto other = spec;
    other.burn_in = 50;
    const auto c = generate(other);
    CHECK(c.truth.transitions == a.truth.transitions);
    CHECK(c.panel.values() != a.panel.values());
    other = spec;
    other.replication = 4;
    CHECK(generate(other).panel.values() != a.panel.values());
}

TEST_CASE("simulated recursion follows the truth") {
    const auto data = generate({2, 5, 60, 4, 0, 200});
    const Matrix& x = data.panel.values();
    for (Eigen::Index t = 1; t < 60; ++t) {
        const Vector pred = data.truth.transitions[static_cast<std::size_t>(t)] * x.row(t - 1).transpose();
        CHECK((x.row(t).transpose() - pred - data.innovations.row(t).transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("windowed regression recovers Example 1 near the end") {
    const auto data = generate({1, 4, 2000, 17, 0, 200});
    const Matrix& x = data.panel.values();
    double sxy = 0.0, sxx = 0.0;
    for (Eigen::Index t = 1700; t < 1900; ++t) {
        sxy += x(t, 0) * x(t - 1, 0);
        sxx += x(t - 1, 0) * x(t - 1, 0);
    }
    const double truth = data.truth.transitions[1799](0, 0);  // tau = 0.9
    CHECK(std::abs(sxy / sxx - truth) <= 0.1);
}

TEST_CASE("covariance root") {
    Matrix w(3, 3);
    w << 2.0, 0.5, 0.1, 0.5, 1.5, -0.3, 0.1, -0.3, 1.0;
    const Matrix r = covariance_root(w);
    const Matrix sigma = w.inverse();
    CHECK((r * r.transpose() - sigma).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((r - r.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = bad(1, 0) = 2.0;
    CHECK_THROWS_AS(covariance_root(bad), DomainError);
}
