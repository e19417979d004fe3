#pragma once

// Small text and file helpers shared by the CSV readers/writers.

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace tvnet {

std::string trim(const std::string& s);
std::vector<std::string> split_csv_line(const std::string& line);

/// Empty cells and NA/NaN spellings.
bool is_missing_token(const std::string& cell);

/// Strict parse of the whole (trimmed) cell.
bool parse_double(const std::string& cell, double& out);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

void write_matrix_rows(std::ostream& out, const Eigen::MatrixXd& m);

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames, so readers never see a
/// partially written artifact.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace tvnet
