#include "doctest.h"

#include "tvnet/error.hpp"
#include "tvnet/panel.hpp"

#include <filesystem>

using namespace tvnet;

TEST_CASE("standardised columns have mean 0 and unit variance") {
    const auto p = parse_panel_csv("1,2\n2,4\n3,6\n", true);
    REQUIRE(p.n() == 3);
    for (Eigen::Index j = 0; j < 2; ++j) {
        const Vector c = p.values().col(j);
        CHECK(std::abs(c.mean()) < 1e-12);
        CHECK(std::abs((c.array() - c.mean()).square().sum() / 2.0 - 1.0) < 1e-12);
        CHECK(c[0] == doctest::Approx(-1.0));
        CHECK(c[1] == doctest::Approx(0.0));
        CHECK(c[2] == doctest::Approx(1.0));
    }
}

TEST_CASE("zero-variance column cannot be standardised") {
    CHECK_THROWS_AS(parse_panel_csv("5\n5\n", true), DomainError);
}

TEST_CASE("header row supplies names and values pass through") {
    const auto p = parse_panel_csv("a,b,c\n1,2,3\n4,5,6\n7,8,9\n10,11,12.5\n", false);
    CHECK(p.n() == 4);
    CHECK(p.d() == 3);
    CHECK(p.names() == std::vector<std::string>{"a", "b", "c"});
    CHECK(p.values()(3, 2) == 12.5);
    CHECK(p.values()(0, 0) == 1.0);
}

TEST_CASE("malformed input is rejected with row and column") {
    CHECK_THROWS_AS(parse_panel_csv("1,2\n3\n", false), FormatError);
    CHECK_THROWS_AS(parse_panel_csv("1,2\n3,NaN\n", false), MissingDataError);
    CHECK_THROWS_AS(parse_panel_csv("1,2\n3,\n", false), MissingDataError);
    try {
        parse_panel_csv("x,y\n1,2\n3,abc\n", false);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row") != std::string::npos);
        CHECK(msg.find("column") != std::string::npos);
    }
}

TEST_CASE("grid is t/n") {
    const auto p = parse_panel_csv("1\n2\n3\n4\n", false);
    for (Eigen::Index t = 0; t < 4; ++t) CHECK(p.grid()[t] == static_cast<double>(t + 1) / 4.0);
}

TEST_CASE("save then load is bit exact") {
    Matrix m(3, 2);
    m << 0.1, 1.0 / 3.0, -2.5e-300, 1e300, 123456789.123456789, -0.0;
    const TimeSeriesPanel p(m, {"u", "v"});
    const auto file = std::filesystem::temp_directory_path() / "tvnet_panel_roundtrip.csv";
    save_panel(p, file);
    const auto q = load_panel(file, false);
    std::filesystem::remove(file);
    CHECK(q.names() == p.names());
    for (Eigen::Index i = 0; i < 3; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) CHECK(q.values()(i, j) == m(i, j));
}

TEST_CASE("lag-1 design shifts by one") {
    Matrix m(4, 2);
    m << 1, 10, 2, 20, 3, 30, 4, 40;
    const auto design = build_lagged_design(TimeSeriesPanel(m), 0, 1);
    REQUIRE(design.regressors->rows() == 3);
    CHECK(design.regressors->col(0) == Vector::LinSpaced(3, 1, 3));
    CHECK(design.response_values == Vector::LinSpaced(3, 2, 4));
    CHECK(design.times[0] == 0.5);
}

TEST_CASE("lag-2 design dimensions and boundary") {
    const TimeSeriesPanel p(Matrix::Random(4, 2));
    const auto design = build_lagged_design(p, 1, 2);
    CHECK(design.regressors->cols() == 4);
    CHECK(design.regressors->rows() == 2);
    // row for t = 3 holds (X_2, X_1)
    CHECK(design.regressors->row(0).head(2) == p.values().row(1));
    CHECK(design.regressors->row(0).tail(2) == p.values().row(0));
    CHECK_THROWS_AS(build_lagged_design(p, 0, 4), InsufficientDataError);
}

TEST_CASE("constant panel gives constant regressor rows") {
    const TimeSeriesPanel p(Matrix::Constant(6, 3, 2.5));
    const auto design = build_lagged_design(p, 0, 2);
    for (Eigen::Index r = 1; r < design.regressors->rows(); ++r)
        CHECK(design.regressors->row(r) == design.regressors->row(0));
}
