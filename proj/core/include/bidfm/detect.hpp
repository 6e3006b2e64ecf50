#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bidfm/matrix.hpp"
#include "bidfm/membership.hpp"

namespace bidfm {

struct DetectOptions {
  int kmeans_restarts = 10;
  int kmeans_max_iter = 300;
  double svd_tol = 1e-10;
  double normalize_eps = 1e-12;
};

struct DetectionResult {
  Membership row_labels;
  Membership col_labels;
  Vector singular_values;           // the min(K_r, K_c) leading values used
  double row_objective = 0.0;       // k-means objectives
  double col_objective = 0.0;
  std::vector<int> degenerate_rows; // near-zero embedding rows (normalized methods)
  std::vector<int> degenerate_cols;
  double shift = 0.0;               // constant added by shift_nonnegative, if any
};

// Spectral clustering on the adjacency matrix: k-means on the rows of the
// leading min(K_r, K_c) left and right singular vectors.
DetectionResult bisc(const Matrix& a, int k_r, int k_c, std::uint64_t seed,
                     const DetectOptions& options = {});

// As bisc, but the singular-vector rows are normalized to unit length first,
// which removes per-node degree scaling.
DetectionResult nbisc(const Matrix& a, int k_r, int k_c, std::uint64_t seed,
                      const DetectOptions& options = {});

// D_r^{-1/2} A D_c^{-1/2}, with D = diag(|A| degrees) + regularizer. With no
// regularizer given, each side uses its own mean degree.
Matrix regularized_laplacian(const Matrix& a, std::optional<double> regularizer = std::nullopt);

// Co-clustering on the regularized Laplacian with row-normalized singular
// vectors. Requires a non-negative a (see shift_nonnegative).
DetectionResult disim(const Matrix& a, int k_r, int k_c, std::optional<double> regularizer,
                      std::uint64_t seed, const DetectOptions& options = {});

// Ratio embedding: R(i, k) = U(i, k + 1) / U(i, 1), clipped to [-T, T], with
// T = log(side size) unless a threshold is given. Requires min(K_r, K_c) >= 2.
DetectionResult dscore(const Matrix& a, int k_r, int k_c, std::optional<double> threshold,
                       std::uint64_t seed, const DetectOptions& options = {});

// dscore applied to the regularized Laplacian.
DetectionResult rdscore(const Matrix& a, int k_r, int k_c, std::optional<double> regularizer,
                        std::optional<double> threshold, std::uint64_t seed,
                        const DetectOptions& options = {});

struct ShiftedMatrix {
  Matrix matrix;
  double shift = 0.0;
};

// Adds max(0, -min a) + 0.01 * range(a) (range taken as 1 when a is
// constant) to every entry when a has a negative entry; otherwise returns a
// unchanged with shift 0.
ShiftedMatrix shift_nonnegative(const Matrix& a);

enum class Algorithm { kBiSC, kNBiSC, kDISIM, kDSCORE, kRDSCORE };

std::string to_string(Algorithm alg);
// Accepts bisc, nbisc, disim, dscore, rdscore (case-insensitive, '-' ignored).
Algorithm parse_algorithm(std::string_view name);
const std::vector<Algorithm>& all_algorithms();

// Dispatches with default regularizer/threshold. Laplacian-based methods get
// shift_nonnegative applied first when a has negative entries, and the shift
// is recorded in the result.
DetectionResult run_algorithm(Algorithm alg, const Matrix& a, int k_r, int k_c,
                              std::uint64_t seed, const DetectOptions& options = {});

}  // namespace bidfm
