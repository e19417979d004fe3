#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace tvnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Observed n x d panel (rows are time, columns variables) together with
/// its scaled-time grid tau_t = t/n, t = 1..n.  Immutable once built.
class TimeSeriesPanel {
public:
    TimeSeriesPanel(Matrix values, std::vector<std::string> names = {});

    Eigen::Index n() const { return values_.rows(); }
    Eigen::Index d() const { return values_.cols(); }
    const Matrix& values() const { return values_; }
    const std::vector<std::string>& names() const { return names_; }
    const Vector& grid() const { return grid_; }

private:
    Matrix values_;
    std::vector<std::string> names_;
    Vector grid_;
};

/// Scaled-time grid (1/n, 2/n, ..., 1).
Vector time_grid(Eigen::Index n);

/// Lagged regression design for response i of a tv-VAR(p).
///
/// Row r (r = 0..n-p-1) corresponds to time t = p + r + 1 (1-based) and holds
/// (X_{t-1}', ..., X_{t-p}'); column (k-1)*d + j is lag k of variable j.  The
/// regressor block is shared between the d responses of one panel.
struct LaggedDesign {
    Eigen::Index response = 0;
    Eigen::Index lag_order = 1;
    Eigen::Index n = 0;  // panel length, not the effective sample
    Eigen::Index d = 0;
    std::shared_ptr<const Matrix> regressors;  // (n-p) x pd
    Vector response_values;                    // x_{t,i}, t = p+1..n
    Vector times;                              // tau_t, t = p+1..n
    Vector grid;                               // full grid tau_1..tau_n

    Eigen::Index effective_length() const { return n - lag_order; }
    Eigen::Index num_coefficients() const { return lag_order * d; }
};

/// Parses a CSV file.  The first row is a header iff any cell in it is not a
/// number.  Optionally standardises each column (mean 0, unbiased variance 1).
TimeSeriesPanel load_panel(const std::filesystem::path& path, bool standardize);

/// Same as load_panel but from an in-memory CSV string.
TimeSeriesPanel parse_panel_csv(const std::string& text, bool standardize);

/// Header row of names, then the values in shortest round-trip form.
std::string panel_csv(const TimeSeriesPanel& panel);

/// Writes panel_csv to a file.
void save_panel(const TimeSeriesPanel& panel, const std::filesystem::path& path);

TimeSeriesPanel standardize(const TimeSeriesPanel& panel);

/// Shared lag-stacked regressor block for all responses of a panel.
std::shared_ptr<const Matrix> lagged_regressors(const TimeSeriesPanel& panel,
                                                Eigen::Index p);

LaggedDesign build_lagged_design(const TimeSeriesPanel& panel, Eigen::Index i,
                                 Eigen::Index p);

/// Designs for every response, sharing one regressor block.
std::vector<LaggedDesign> build_all_designs(const TimeSeriesPanel& panel,
                                            Eigen::Index p);

}  // namespace tvnet
