#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bidfm/membership.hpp"

namespace bidfm {

// counts(k, l) = |truth cluster k  intersect  estimated cluster l|.
class ConfusionMatrix {
 public:
  ConfusionMatrix(int rows, int cols);
  static ConfusionMatrix from_counts(std::vector<std::vector<std::int64_t>> counts);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::int64_t total() const noexcept { return total_; }
  std::int64_t at(int k, int l) const { return counts_[static_cast<std::size_t>(k) * cols_ + l]; }
  void add(int k, int l, std::int64_t c = 1);
  std::int64_t row_sum(int k) const;
  std::int64_t col_sum(int l) const;

 private:
  int rows_;
  int cols_;
  std::int64_t total_ = 0;
  std::vector<std::int64_t> counts_;
};

// Throws DimensionError when the node counts differ.
ConfusionMatrix confusion(const Membership& truth, const Membership& estimated);

// Maximum-weight perfect assignment on a square weight matrix (Hungarian
// method, O(k^3)). Returns col_of_row.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight);

// Nodes left unmatched under the best label permutation.
std::int64_t misassigned_nodes(const Membership& estimated, const Membership& truth);

// Fraction of misassigned nodes under the best label permutation, in [0, 1].
double hamming_error(const Membership& estimated, const Membership& truth);

// Normalized mutual information. 0 log 0 = 0. When both entropies vanish
// (two single-cluster partitions) the value is 1; when only one does it is 0.
double nmi(const Membership& estimated, const Membership& truth);
double nmi(const ConfusionMatrix& c);

// Adjusted Rand index with exact integer pair counts. A vanishing
// denominator gives 1 for identical partitions and 0 otherwise.
double ari(const Membership& estimated, const Membership& truth);
double ari(const ConfusionMatrix& c);

// min over label permutations pi of max over truth clusters k of
// |C_k symmetric-difference Chat_pi(k)| / |C_k|.
// Exact: enumerates permutations up to 8 clusters and solves the bottleneck
// assignment problem beyond that. Every truth cluster must be occupied.
double criterion_f(const Membership& estimated, const Membership& truth);

struct MetricsReport {
  double error_rate_r = 0, error_rate_c = 0, error_rate = 0;  // error_rate = max
  double nmi_r = 0, nmi_c = 0, nmi = 0;                       // nmi = min
  double ari_r = 0, ari_c = 0, ari = 0;                       // ari = min
};

MetricsReport combined_report(const Membership& est_r, const Membership& truth_r,
                              const Membership& est_c, const Membership& truth_c);

std::string metrics_csv_header();
std::string to_csv_row(const MetricsReport& report);

}  // namespace bidfm
