#pragma once

// Artifact formats.
//
// Binary containers are little-endian and start with an 8-byte magic string
// followed by a uint32 format version:
//
//   coefficient path  "TVNPATH\0"  v1
//       int64 n, d, p, response; uint32 stage (0 prelim, 1 wg, 2 oracle, 3 full)
//       n x 2pd doubles, row-major: row t = (alpha(tau_t), alpha'(tau_t))
//       int64 m; m doubles (tuning values, m = 0 or n)
//   precision path    "TVNPREC\0"  v1
//       int64 n, d; double bandwidth
//       n doubles (lambda3 per tau)
//       n blocks of d x d doubles, row-major, symmetrised
//       uint8 has_raw; if 1, n further d x d blocks (raw)
//   scenario truth    "TVNTRTH\0"  v1
//       int32 example; int64 d, n
//       n blocks d x d (A_1), n blocks d x d (Omega), row-major
//       int64 k; k (src, dst) int64 pairs of Granger edges
//       int64 k; k (i, j) int64 pairs of partial-correlation edges
//       int64 r, c; r x c doubles (constant loadings)
//       int64 m, r, c; m blocks r x c (time-varying loadings)

#include "tvnet/path.hpp"
#include "tvnet/simulate.hpp"
#include "tvnet/tvclime.hpp"

#include <filesystem>
#include <string>

namespace tvnet {

inline constexpr std::uint32_t kContainerVersion = 1;

std::string encode_path(const CoefficientPath& path);
CoefficientPath decode_path(const std::string& bytes);
void save_path(const CoefficientPath& path, const std::filesystem::path& file);
CoefficientPath load_path(const std::filesystem::path& file);

std::string encode_precision(const PrecisionPath& prec);
PrecisionPath decode_precision(const std::string& bytes);
void save_precision(const PrecisionPath& prec, const std::filesystem::path& file);
PrecisionPath load_precision(const std::filesystem::path& file);

std::string encode_truth(const ScenarioTruth& truth);
ScenarioTruth decode_truth(const std::string& bytes);
void save_truth(const ScenarioTruth& truth, const std::filesystem::path& file);
ScenarioTruth load_truth(const std::filesystem::path& file);

/// One row per grid point: t, tau, then a<k>_<j> and da<k>_<j> columns
/// (1-based lag and variable indices).
std::string path_csv(const CoefficientPath& path);

/// d x d matrix with a header of variable indices.
std::string matrix_csv(const Matrix& m);

/// Residual panel as CSV; unavailable leading rows are left empty.
std::string residuals_csv(const ResidualPanel& res);

}  // namespace tvnet
