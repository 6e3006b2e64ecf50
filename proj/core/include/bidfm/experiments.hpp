#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bidfm/detect.hpp"
#include "bidfm/matrix.hpp"
#include "bidfm/membership.hpp"
#include "bidfm/sampling.hpp"

namespace bidfm {

enum class ModelKind { kBiDFM, kBiDCDFM };
enum class SweepKind { kRho, kN, kSigma2 };

std::string to_string(ModelKind kind);
std::string to_string(SweepKind kind);
ModelKind parse_model_kind(std::string_view name);
SweepKind parse_sweep_kind(std::string_view name);

// One simulation study. Exactly one parameter is swept over `values`; the
// others stay fixed. Sweeping n sets n_r = n_c = n.
struct SimulationConfig {
  std::string name = "custom";
  ModelKind model = ModelKind::kBiDFM;
  int n_r = 200;
  int n_c = 300;
  int k_r = 2;
  int k_c = 3;
  Matrix p;
  double rho = 0.5;
  DistributionSpec dist = DistributionSpec::bernoulli();
  SweepKind sweep = SweepKind::kRho;
  std::vector<double> values;
  int replicates = 50;
  std::vector<Algorithm> algorithms;
  std::uint64_t base_seed = 0;
  bool population = false;   // use A := Omega instead of sampling
  double theta_floor = 0.05;
  int threads = 0;           // 0 picks hardware concurrency
  DetectOptions detect;

  // Throws ValidationError listing every problem.
  void check() const;
};

struct ReplicateRecord {
  Algorithm algorithm;
  double value = 0.0;
  int replicate = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string failure;
  double error_rate = 0.0, nmi = 0.0, ari = 0.0;
};

struct CurvePoint {
  Algorithm algorithm;
  double value = 0.0;
  int replicates = 0;  // successful replicates
  int failures = 0;
  double mean_error = 0.0, se_error = 0.0;
  double mean_nmi = 0.0, se_nmi = 0.0;
  double mean_ari = 0.0, se_ari = 0.0;
  std::uint64_t first_seed = 0, last_seed = 0;
};

struct ExperimentReport {
  std::string name;
  SweepKind sweep = SweepKind::kRho;
  std::vector<CurvePoint> points;        // algorithm-major, then sweep order
  std::vector<ReplicateRecord> records;  // same order, replicates innermost

  const CurvePoint& point(Algorithm alg, double value) const;
};

// For every swept value: build Omega (memberships and theta seeded from
// base_seed and the sweep index), draw `replicates` matrices with seeds
// base_seed + r, run each algorithm and score it against the truth.
// Algorithm failures are recorded per replicate and excluded from the means.
// Output is identical for any thread count.
ExperimentReport run_simulation(const SimulationConfig& config);

// sim1a..sim1d (Bernoulli), sim2a..sim2f (Normal), sim3a..sim3d (signed).
SimulationConfig preset(std::string_view name);
const std::vector<std::string>& preset_names();

// One row per algorithm x swept value.
std::string report_csv(const ExperimentReport& report);
// One row per algorithm x swept value x replicate x metric.
std::string report_long_csv(const ExperimentReport& report);

struct EigengapResult {
  int k = 1;
  std::vector<double> singular_values;
};

// Top m singular values and argmax_{1<=k<m} s_k / s_{k+1}. A value
// s_{k+1} <= 1e-12 s_1 counts as zero and ends the search at that k.
EigengapResult estimate_k_eigengap(const Matrix& a, int m = 8);

struct DegreeProfiles {
  Vector d_r;  // sum_j |A(i, j)|
  Vector d_c;  // sum_i |A(i, j)|
};
DegreeProfiles degree_profiles(const Matrix& a);

enum class FilterMode {
  kRows,         // drop zero out-degree rows
  kCols,         // drop zero in-degree columns
  kRowsAndCols,  // both of the above, independently
  kBothAnd,      // square: drop nodes with zero in- and out-degree from both sides
  kBothOr,       // square: drop nodes with zero in- or out-degree from both sides
};
FilterMode parse_filter_mode(std::string_view name);
std::string to_string(FilterMode mode);

struct FilterResult {
  Matrix matrix;
  std::vector<int> kept_rows;
  std::vector<int> kept_cols;
  std::vector<int> zero_out;     // rows with zero degree
  std::vector<int> zero_in;      // columns with zero degree
  std::vector<int> zero_both;    // square only: zero_out intersect zero_in
  std::vector<int> zero_either;  // square only: zero_out union zero_in
};

// Throws DimensionError for the square-only modes on a non-square matrix.
FilterResult filter_zero_degree(const Matrix& a, FilterMode mode);

struct PartitionSimilarity {
  double hamming = 0.0;
  double nmi = 0.0;
  double ari = 0.0;
};

// Agreement between the row and column partitions of a network whose row
// and column nodes coincide.
PartitionSimilarity row_column_similarity(const Membership& row_labels,
                                          const Membership& col_labels);

}  // namespace bidfm
