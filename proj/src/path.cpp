#include "tvnet/path.hpp"

#include "tvnet/error.hpp"

namespace tvnet {

std::string to_string(Stage stage) {
    switch (stage) {
        case Stage::Preliminary: return "preliminary";
        case Stage::WeightedGroup: return "weighted-group";
        case Stage::Oracle: return "oracle";
        case Stage::Full: return "full";
    }
    return "unknown";
}

Stage stage_from_string(const std::string& s) {
    if (s == "preliminary") return Stage::Preliminary;
    if (s == "weighted-group") return Stage::WeightedGroup;
    if (s == "oracle") return Stage::Oracle;
    if (s == "full") return Stage::Full;
    throw ValidationError("unknown stage tag '" + s + "'");
}

namespace {

std::vector<Eigen::Index> nonzero_columns(const Matrix& m) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        if ((m.col(j).array() != 0.0).any()) out.push_back(j);
    return out;
}

}  // namespace

std::vector<Eigen::Index> CoefficientPath::active_levels() const {
    return nonzero_columns(estimates);
}

std::vector<Eigen::Index> CoefficientPath::active_derivatives() const {
    return nonzero_columns(derivatives);
}

Matrix transition_matrix(const std::vector<CoefficientPath>& paths, Eigen::Index t,
                         Eigen::Index lag) {
    const auto d = static_cast<Eigen::Index>(paths.size());
    Matrix a(d, d);
    for (const auto& path : paths) {
        if (path.d != d) throw ShapeError("path dimension does not match the number of paths");
        a.row(path.response) = path.estimates.block(t, (lag - 1) * d, 1, d);
    }
    return a;
}

}  // namespace tvnet
