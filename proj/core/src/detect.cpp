#include "bidfm/detect.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>

#include "bidfm/errors.hpp"
#include "bidfm/kmeans.hpp"
#include "bidfm/linalg.hpp"

namespace bidfm {

namespace {

using Eigen::Index;

void check_cluster_counts(const Matrix& a, int k_r, int k_c, const char* who) {
  if (k_r < 1 || k_c < 1) throw DimensionError(std::string(who) + ": K_r and K_c must be positive");
  if (k_r > a.rows() || k_c > a.cols()) {
    throw DimensionError(std::string(who) + ": asked for " + std::to_string(k_r) + " x " + std::to_string(k_c) +
                         " clusters on a " + std::to_string(a.rows()) + " x " + std::to_string(a.cols()) +
                         " matrix");
  }
  if (std::min(k_r, k_c) > std::min(a.rows(), a.cols())) {
    throw DimensionError(std::string(who) + ": embedding dimension exceeds matrix rank bound");
  }
}

void require_nonnegative(const Matrix& a, const char* who) {
  if (a.size() > 0 && a.minCoeff() < 0.0) {
    throw PreconditionError(std::string(who) +
                            ": negative entries; apply shift_nonnegative before a Laplacian-based method");
  }
}

using Oriented = std::function<DetectionResult(const Matrix&, int, int)>;

// Runs `fn` with K_r <= K_c, transposing the input when needed and swapping
// the sides of the result back.
DetectionResult with_row_side_smaller(const Matrix& a, int k_r, int k_c, const Oriented& fn) {
  if (k_r <= k_c) return fn(a, k_r, k_c);
  const Matrix at = a.transpose();
  DetectionResult r = fn(at, k_c, k_r);
  std::swap(r.row_labels, r.col_labels);
  std::swap(r.row_objective, r.col_objective);
  std::swap(r.degenerate_rows, r.degenerate_cols);
  return r;
}

SvdFactors embed(const Matrix& a, int k, const DetectOptions& o) {
  SvdOptions so;
  so.tol = o.svd_tol;
  return truncated_svd(a, k, so);
}

DetectionResult cluster_sides(const Matrix& rows, const Matrix& cols, int k_r, int k_c, std::uint64_t seed,
                              const DetectOptions& o) {
  DetectionResult r;
  KMeansResult kr = kmeans(rows, k_r, seed, o.kmeans_restarts, o.kmeans_max_iter);
  KMeansResult kc = kmeans(cols, k_c, seed, o.kmeans_restarts, o.kmeans_max_iter);
  r.row_labels = std::move(kr.labels);
  r.col_labels = std::move(kc.labels);
  r.row_objective = kr.objective;
  r.col_objective = kc.objective;
  return r;
}

DetectionResult normalized_clustering(const Matrix& a, int k_r, int k_c, std::uint64_t seed,
                                      const DetectOptions& o) {
  SvdFactors f = embed(a, k_r, o);
  RowNormalization rows = row_normalize(f.left, o.normalize_eps);
  RowNormalization cols = row_normalize(f.right, o.normalize_eps);
  DetectionResult r = cluster_sides(rows.rows, cols.rows, k_r, k_c, seed, o);
  r.singular_values = f.singular_values;
  r.degenerate_rows = std::move(rows.degenerate);
  r.degenerate_cols = std::move(cols.degenerate);
  return r;
}

Matrix ratio_embedding(const Matrix& u, double threshold) {
  Matrix r(u.rows(), u.cols() - 1);
  for (Index i = 0; i < u.rows(); ++i) {
    const double lead = u(i, 0);
    for (Index t = 1; t < u.cols(); ++t) {
      const double num = u(i, t);
      double v;
      if (lead != 0.0) {
        v = num / lead;
      } else {
        v = num == 0.0 ? 0.0 : std::copysign(threshold, num);
      }
      r(i, t - 1) = std::clamp(v, -threshold, threshold);
    }
  }
  return r;
}

double default_threshold(Index n) { return std::max(std::log(static_cast<double>(n)), 1.0); }

DetectionResult ratio_clustering(const Matrix& a, int k_r, int k_c, std::optional<double> threshold,
                                 std::uint64_t seed, const DetectOptions& o) {
  if (threshold && !(*threshold > 0.0)) throw DimensionError("dscore: threshold must be positive");
  SvdFactors f = embed(a, k_r, o);
  const Matrix rows = ratio_embedding(f.left, threshold.value_or(default_threshold(a.rows())));
  const Matrix cols = ratio_embedding(f.right, threshold.value_or(default_threshold(a.cols())));
  DetectionResult r = cluster_sides(rows, cols, k_r, k_c, seed, o);
  r.singular_values = f.singular_values;
  return r;
}

std::string normalized_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == '-' || c == '_') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

DetectionResult bisc(const Matrix& a, int k_r, int k_c, std::uint64_t seed, const DetectOptions& options) {
  check_cluster_counts(a, k_r, k_c, "bisc");
  return with_row_side_smaller(a, k_r, k_c, [&](const Matrix& m, int kr, int kc) {
    SvdFactors f = embed(m, kr, options);
    DetectionResult r = cluster_sides(f.left, f.right, kr, kc, seed, options);
    r.singular_values = f.singular_values;
    return r;
  });
}

DetectionResult nbisc(const Matrix& a, int k_r, int k_c, std::uint64_t seed, const DetectOptions& options) {
  check_cluster_counts(a, k_r, k_c, "nbisc");
  return with_row_side_smaller(a, k_r, k_c, [&](const Matrix& m, int kr, int kc) {
    return normalized_clustering(m, kr, kc, seed, options);
  });
}

Matrix regularized_laplacian(const Matrix& a, std::optional<double> regularizer) {
  if (regularizer && !(*regularizer >= 0.0)) throw DimensionError("regularizer must be non-negative");
  require_finite(a, "regularized_laplacian");
  const Vector d_r = a.cwiseAbs().rowwise().sum();
  const Vector d_c = a.cwiseAbs().colwise().sum().transpose();
  const double tau_r = regularizer.value_or(d_r.size() > 0 ? d_r.mean() : 0.0);
  const double tau_c = regularizer.value_or(d_c.size() > 0 ? d_c.mean() : 0.0);
  auto inv_sqrt = [](double d) { return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0; };
  Vector s_r(d_r.size());
  Vector s_c(d_c.size());
  for (Index i = 0; i < d_r.size(); ++i) s_r(i) = inv_sqrt(d_r(i) + tau_r);
  for (Index j = 0; j < d_c.size(); ++j) s_c(j) = inv_sqrt(d_c(j) + tau_c);
  return s_r.asDiagonal() * a * s_c.asDiagonal();
}

DetectionResult disim(const Matrix& a, int k_r, int k_c, std::optional<double> regularizer, std::uint64_t seed,
                      const DetectOptions& options) {
  check_cluster_counts(a, k_r, k_c, "disim");
  require_nonnegative(a, "disim");
  const Matrix l = regularized_laplacian(a, regularizer);
  return with_row_side_smaller(l, k_r, k_c, [&](const Matrix& m, int kr, int kc) {
    return normalized_clustering(m, kr, kc, seed, options);
  });
}

DetectionResult dscore(const Matrix& a, int k_r, int k_c, std::optional<double> threshold, std::uint64_t seed,
                       const DetectOptions& options) {
  check_cluster_counts(a, k_r, k_c, "dscore");
  if (std::min(k_r, k_c) < 2) {
    throw PreconditionError("dscore: ratio embedding needs min(K_r, K_c) >= 2");
  }
  return with_row_side_smaller(a, k_r, k_c, [&](const Matrix& m, int kr, int kc) {
    return ratio_clustering(m, kr, kc, threshold, seed, options);
  });
}

DetectionResult rdscore(const Matrix& a, int k_r, int k_c, std::optional<double> regularizer,
                        std::optional<double> threshold, std::uint64_t seed, const DetectOptions& options) {
  check_cluster_counts(a, k_r, k_c, "rdscore");
  require_nonnegative(a, "rdscore");
  if (std::min(k_r, k_c) < 2) {
    throw PreconditionError("rdscore: ratio embedding needs min(K_r, K_c) >= 2");
  }
  return dscore(regularized_laplacian(a, regularizer), k_r, k_c, threshold, seed, options);
}

ShiftedMatrix shift_nonnegative(const Matrix& a) {
  if (a.size() == 0) return {a, 0.0};
  const double lo = a.minCoeff();
  if (lo >= 0.0) return {a, 0.0};
  const double range = a.maxCoeff() - lo;
  const double shift = -lo + 0.01 * (range > 0.0 ? range : 1.0);
  return {(a.array() + shift).matrix(), shift};
}

std::string to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::kBiSC: return "BiSC";
    case Algorithm::kNBiSC: return "nBiSC";
    case Algorithm::kDISIM: return "DI-SIM";
    case Algorithm::kDSCORE: return "D-SCORE";
    case Algorithm::kRDSCORE: return "rD-SCORE";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  const std::string s = normalized_name(name);
  if (s == "bisc") return Algorithm::kBiSC;
  if (s == "nbisc") return Algorithm::kNBiSC;
  if (s == "disim") return Algorithm::kDISIM;
  if (s == "dscore") return Algorithm::kDSCORE;
  if (s == "rdscore") return Algorithm::kRDSCORE;
  throw ParseError("unknown algorithm '" + std::string(name) + "'");
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all = {Algorithm::kBiSC, Algorithm::kNBiSC, Algorithm::kDISIM,
                                             Algorithm::kDSCORE, Algorithm::kRDSCORE};
  return all;
}

DetectionResult run_algorithm(Algorithm alg, const Matrix& a, int k_r, int k_c, std::uint64_t seed,
                              const DetectOptions& options) {
  switch (alg) {
    case Algorithm::kBiSC: return bisc(a, k_r, k_c, seed, options);
    case Algorithm::kNBiSC: return nbisc(a, k_r, k_c, seed, options);
    case Algorithm::kDSCORE: return dscore(a, k_r, k_c, std::nullopt, seed, options);
    case Algorithm::kDISIM:
    case Algorithm::kRDSCORE: {
      ShiftedMatrix shifted = shift_nonnegative(a);
      DetectionResult r = alg == Algorithm::kDISIM
                              ? disim(shifted.matrix, k_r, k_c, std::nullopt, seed, options)
                              : rdscore(shifted.matrix, k_r, k_c, std::nullopt, std::nullopt, seed, options);
      r.shift = shifted.shift;
      return r;
    }
  }
  throw PreconditionError("run_algorithm: unknown algorithm");
}

}  // namespace bidfm
