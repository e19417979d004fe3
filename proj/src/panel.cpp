#include "tvnet/panel.hpp"

#include "tvnet/error.hpp"
#include "tvnet/text.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace tvnet {

Vector time_grid(Eigen::Index n) {
    Vector g(n);
    for (Eigen::Index t = 0; t < n; ++t)
        g[t] = static_cast<double>(t + 1) / static_cast<double>(n);
    return g;
}

TimeSeriesPanel::TimeSeriesPanel(Matrix values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
    if (values_.rows() < 2 || values_.cols() < 1)
        throw ShapeError("panel needs n >= 2 rows and d >= 1 columns, got " +
                         std::to_string(values_.rows()) + "x" +
                         std::to_string(values_.cols()));
    for (Eigen::Index t = 0; t < values_.rows(); ++t)
        for (Eigen::Index j = 0; j < values_.cols(); ++j)
            if (!std::isfinite(values_(t, j)))
                throw MissingDataError("non-finite value at row " + std::to_string(t + 1) +
                                       ", column " + std::to_string(j + 1));
    if (names_.empty()) {
        for (Eigen::Index j = 0; j < values_.cols(); ++j)
            names_.push_back("x" + std::to_string(j + 1));
    } else if (static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
        throw ShapeError("expected " + std::to_string(values_.cols()) + " names, got " +
                         std::to_string(names_.size()));
    }
    grid_ = time_grid(values_.rows());
}

TimeSeriesPanel parse_panel_csv(const std::string& text, bool standardize_columns) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        rows.push_back(split_csv_line(line));
    }
    if (rows.empty()) throw FormatError("empty CSV input");

    std::vector<std::string> names;
    std::size_t first = 0;
    for (const auto& cell : rows.front()) {
        double v;
        if (!is_missing_token(cell) && !parse_double(cell, v)) {
            names.reserve(rows.front().size());
            for (const auto& c : rows.front()) names.push_back(trim(c));
            first = 1;
            break;
        }
    }

    const std::size_t width = rows.front().size();
    const std::size_t n = rows.size() - first;
    Matrix values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
    for (std::size_t r = first; r < rows.size(); ++r) {
        const auto line_no = std::to_string(r + 1);
        if (rows[r].size() != width)
            throw FormatError("ragged row " + line_no + ": expected " + std::to_string(width) +
                              " cells, found " + std::to_string(rows[r].size()));
        for (std::size_t c = 0; c < width; ++c) {
            const auto& cell = rows[r][c];
            if (is_missing_token(cell))
                throw MissingDataError("missing value at row " + line_no + ", column " +
                                       std::to_string(c + 1));
            double v;
            if (!parse_double(cell, v))
                throw ParseError("non-numeric cell '" + trim(cell) + "' at row " + line_no +
                                 ", column " + std::to_string(c + 1));
            if (std::isnan(v))
                throw MissingDataError("NaN at row " + line_no + ", column " +
                                       std::to_string(c + 1));
            values(static_cast<Eigen::Index>(r - first), static_cast<Eigen::Index>(c)) = v;
        }
    }
    TimeSeriesPanel panel(std::move(values), std::move(names));
    return standardize_columns ? standardize(panel) : panel;
}

TimeSeriesPanel load_panel(const std::filesystem::path& path, bool standardize_columns) {
    return parse_panel_csv(read_file(path), standardize_columns);
}

std::string panel_csv(const TimeSeriesPanel& panel) {
    std::ostringstream out;
    for (std::size_t j = 0; j < panel.names().size(); ++j)
        out << (j ? "," : "") << panel.names()[j];
    out << '\n';
    write_matrix_rows(out, panel.values());
    return out.str();
}

void save_panel(const TimeSeriesPanel& panel, const std::filesystem::path& path) {
    write_file(path, panel_csv(panel));
}

TimeSeriesPanel standardize(const TimeSeriesPanel& panel) {
    Matrix v = panel.values();
    const double n = static_cast<double>(v.rows());
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const double mean = v.col(j).mean();
        v.col(j).array() -= mean;
        const double var = v.col(j).squaredNorm() / (n - 1.0);
        if (!(var > 0.0))
            throw DomainError("column " + std::to_string(j + 1) +
                              " has zero variance and cannot be standardised");
        v.col(j) /= std::sqrt(var);
    }
    return TimeSeriesPanel(std::move(v), panel.names());
}

std::shared_ptr<const Matrix> lagged_regressors(const TimeSeriesPanel& panel, Eigen::Index p) {
    const Eigen::Index n = panel.n(), d = panel.d();
    if (p < 1) throw DomainError("lag order must be >= 1");
    if (p >= n)
        throw InsufficientDataError("lag order " + std::to_string(p) +
                                    " leaves no observations for n = " + std::to_string(n));
    auto reg = std::make_shared<Matrix>(n - p, p * d);
    for (Eigen::Index r = 0; r < n - p; ++r) {
        const Eigen::Index t = p + r;  // 0-based row of the response
        for (Eigen::Index k = 1; k <= p; ++k)
            reg->block(r, (k - 1) * d, 1, d) = panel.values().row(t - k);
    }
    return reg;
}

namespace {

LaggedDesign make_design(const TimeSeriesPanel& panel, Eigen::Index i, Eigen::Index p,
                         std::shared_ptr<const Matrix> reg) {
    LaggedDesign design;
    design.response = i;
    design.lag_order = p;
    design.n = panel.n();
    design.d = panel.d();
    design.regressors = std::move(reg);
    design.response_values = panel.values().col(i).tail(panel.n() - p);
    design.times = panel.grid().tail(panel.n() - p);
    design.grid = panel.grid();
    return design;
}

}  // namespace

LaggedDesign build_lagged_design(const TimeSeriesPanel& panel, Eigen::Index i, Eigen::Index p) {
    if (i < 0 || i >= panel.d()) throw DomainError("response index out of range");
    return make_design(panel, i, p, lagged_regressors(panel, p));
}

std::vector<LaggedDesign> build_all_designs(const TimeSeriesPanel& panel, Eigen::Index p) {
    auto reg = lagged_regressors(panel, p);
    std::vector<LaggedDesign> out;
    out.reserve(static_cast<std::size_t>(panel.d()));
    for (Eigen::Index i = 0; i < panel.d(); ++i) out.push_back(make_design(panel, i, p, reg));
    return out;
}

}  // namespace tvnet
