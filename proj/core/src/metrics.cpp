#include "bidfm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "bidfm/errors.hpp"
#include "bidfm/io.hpp"

namespace bidfm {

namespace {

void require_same_size(const Membership& a, const Membership& b, const char* who) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(who) + ": partitions cover " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " nodes");
  }
}

std::int64_t pairs(std::int64_t x) { return x * (x - 1) / 2; }

// Square cost matrix padded with zeros, weight(k, l) = counts(k, l).
std::vector<std::vector<double>> padded_weights(const ConfusionMatrix& c) {
  const int k = std::max(c.rows(), c.cols());
  std::vector<std::vector<double>> w(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int i = 0; i < c.rows(); ++i)
    for (int j = 0; j < c.cols(); ++j) w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<double>(c.at(i, j));
  return w;
}

// Kuhn's augmenting-path matching restricted to edges allowed[k][l].
bool has_perfect_matching(const std::vector<std::vector<char>>& allowed) {
  const std::size_t k = allowed.size();
  std::vector<int> match_of_col(k, -1);
  std::function<bool(std::size_t, std::vector<char>&)> augment = [&](std::size_t row, std::vector<char>& seen) {
    for (std::size_t col = 0; col < k; ++col) {
      if (!allowed[row][col] || seen[col]) continue;
      seen[col] = 1;
      if (match_of_col[col] < 0 || augment(static_cast<std::size_t>(match_of_col[col]), seen)) {
        match_of_col[col] = static_cast<int>(row);
        return true;
      }
    }
    return false;
  };
  for (std::size_t row = 0; row < k; ++row) {
    std::vector<char> seen(k, 0);
    if (!augment(row, seen)) return false;
  }
  return true;
}

double bottleneck_by_enumeration(const std::vector<std::vector<double>>& cost) {
  std::vector<int> perm(cost.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (std::size_t k = 0; k < perm.size(); ++k) worst = std::max(worst, cost[k][static_cast<std::size_t>(perm[k])]);
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double bottleneck_by_matching(const std::vector<std::vector<double>>& cost) {
  std::vector<double> levels;
  for (const auto& row : cost) levels.insert(levels.end(), row.begin(), row.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::size_t lo = 0;
  std::size_t hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    std::vector<std::vector<char>> allowed(cost.size(), std::vector<char>(cost.size(), 0));
    for (std::size_t k = 0; k < cost.size(); ++k)
      for (std::size_t l = 0; l < cost.size(); ++l) allowed[k][l] = cost[k][l] <= levels[mid] ? 1 : 0;
    if (has_perfect_matching(allowed)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return levels[lo];
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), counts_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0) {
  if (rows < 1 || cols < 1) throw DimensionError("confusion matrix needs at least one row and column");
}

ConfusionMatrix ConfusionMatrix::from_counts(std::vector<std::vector<std::int64_t>> counts) {
  if (counts.empty() || counts.front().empty()) throw DimensionError("empty confusion matrix");
  ConfusionMatrix c(static_cast<int>(counts.size()), static_cast<int>(counts.front().size()));
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k].size() != counts.front().size()) throw DimensionError("ragged confusion matrix");
    for (std::size_t l = 0; l < counts[k].size(); ++l) c.add(static_cast<int>(k), static_cast<int>(l), counts[k][l]);
  }
  return c;
}

void ConfusionMatrix::add(int k, int l, std::int64_t c) {
  if (c < 0) throw DimensionError("confusion counts must be non-negative");
  counts_[static_cast<std::size_t>(k) * cols_ + l] += c;
  total_ += c;
}

std::int64_t ConfusionMatrix::row_sum(int k) const {
  std::int64_t s = 0;
  for (int l = 0; l < cols_; ++l) s += at(k, l);
  return s;
}

std::int64_t ConfusionMatrix::col_sum(int l) const {
  std::int64_t s = 0;
  for (int k = 0; k < rows_; ++k) s += at(k, l);
  return s;
}

ConfusionMatrix confusion(const Membership& truth, const Membership& estimated) {
  require_same_size(truth, estimated, "confusion");
  ConfusionMatrix c(truth.k(), estimated.k());
  for (std::size_t i = 0; i < truth.size(); ++i) c.add(truth[i], estimated[i]);
  return c;
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight) {
  // Hungarian method with potentials on cost = -weight; 1-based internals.
  const std::size_t n = weight.size();
  for (const auto& row : weight) {
    if (row.size() != n) throw DimensionError("max_weight_assignment: weight matrix must be square");
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -weight[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col_of_row(n, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) col_of_row[p[j] - 1] = static_cast<int>(j - 1);
  }
  return col_of_row;
}

std::int64_t misassigned_nodes(const Membership& estimated, const Membership& truth) {
  require_same_size(estimated, truth, "hamming_error");
  if (truth.size() == 0) return 0;
  const ConfusionMatrix c = confusion(truth, estimated);
  const auto w = padded_weights(c);
  const auto assignment = max_weight_assignment(w);
  std::int64_t matched = 0;
  for (std::size_t k = 0; k < assignment.size(); ++k) {
    matched += static_cast<std::int64_t>(std::llround(w[k][static_cast<std::size_t>(assignment[k])]));
  }
  return c.total() - matched;
}

double hamming_error(const Membership& estimated, const Membership& truth) {
  if (truth.size() == 0) {
    require_same_size(estimated, truth, "hamming_error");
    return 0.0;
  }
  return static_cast<double>(misassigned_nodes(estimated, truth)) / static_cast<double>(truth.size());
}

double nmi(const ConfusionMatrix& c) {
  const auto n = static_cast<double>(c.total());
  if (c.total() == 0) throw DimensionError("nmi: empty partitions");
  double mutual = 0.0;
  for (int k = 0; k < c.rows(); ++k) {
    const auto rk = static_cast<double>(c.row_sum(k));
    for (int l = 0; l < c.cols(); ++l) {
      const auto ckl = static_cast<double>(c.at(k, l));
      if (ckl > 0.0) mutual += ckl * std::log(ckl * n / (rk * static_cast<double>(c.col_sum(l))));
    }
  }
  double entropy_terms = 0.0;
  for (int k = 0; k < c.rows(); ++k) {
    const auto rk = static_cast<double>(c.row_sum(k));
    if (rk > 0.0) entropy_terms += rk * std::log(rk / n);
  }
  for (int l = 0; l < c.cols(); ++l) {
    const auto cl = static_cast<double>(c.col_sum(l));
    if (cl > 0.0) entropy_terms += cl * std::log(cl / n);
  }
  if (entropy_terms == 0.0) return 1.0;  // both partitions are a single cluster
  return std::clamp(-2.0 * mutual / entropy_terms, 0.0, 1.0);
}

double nmi(const Membership& estimated, const Membership& truth) {
  require_same_size(estimated, truth, "nmi");
  return nmi(confusion(truth, estimated));
}

double ari(const ConfusionMatrix& c) {
  if (c.total() < 2) throw DimensionError("ari: needs at least two nodes");
  std::int64_t index = 0;
  for (int k = 0; k < c.rows(); ++k)
    for (int l = 0; l < c.cols(); ++l) index += pairs(c.at(k, l));
  std::int64_t row_pairs = 0;
  for (int k = 0; k < c.rows(); ++k) row_pairs += pairs(c.row_sum(k));
  std::int64_t col_pairs = 0;
  for (int l = 0; l < c.cols(); ++l) col_pairs += pairs(c.col_sum(l));
  const auto total = static_cast<long double>(pairs(c.total()));
  const long double expected = static_cast<long double>(row_pairs) * static_cast<long double>(col_pairs) / total;
  const long double maximum = 0.5L * static_cast<long double>(row_pairs + col_pairs);
  const long double denom = maximum - expected;
  if (denom == 0.0L) return (index == row_pairs && index == col_pairs) ? 1.0 : 0.0;
  return static_cast<double>((static_cast<long double>(index) - expected) / denom);
}

double ari(const Membership& estimated, const Membership& truth) {
  require_same_size(estimated, truth, "ari");
  return ari(confusion(truth, estimated));
}

double criterion_f(const Membership& estimated, const Membership& truth) {
  require_same_size(estimated, truth, "criterion_f");
  if (!truth.all_nonempty()) throw DimensionError("criterion_f: every truth cluster must be occupied");
  const ConfusionMatrix c = confusion(truth, estimated);
  const int k = std::max(c.rows(), c.cols());
  std::vector<std::vector<double>> cost(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0.0));
  for (int t = 0; t < c.rows(); ++t) {
    const std::int64_t size = c.row_sum(t);
    for (int e = 0; e < k; ++e) {
      const std::int64_t est_size = e < c.cols() ? c.col_sum(e) : 0;
      const std::int64_t common = e < c.cols() ? c.at(t, e) : 0;
      cost[static_cast<std::size_t>(t)][static_cast<std::size_t>(e)] =
          static_cast<double>(size + est_size - 2 * common) / static_cast<double>(size);
    }
  }
  return k <= 8 ? bottleneck_by_enumeration(cost) : bottleneck_by_matching(cost);
}

MetricsReport combined_report(const Membership& est_r, const Membership& truth_r, const Membership& est_c,
                              const Membership& truth_c) {
  MetricsReport m;
  m.error_rate_r = hamming_error(est_r, truth_r);
  m.error_rate_c = hamming_error(est_c, truth_c);
  m.error_rate = std::max(m.error_rate_r, m.error_rate_c);
  m.nmi_r = nmi(est_r, truth_r);
  m.nmi_c = nmi(est_c, truth_c);
  m.nmi = std::min(m.nmi_r, m.nmi_c);
  m.ari_r = ari(est_r, truth_r);
  m.ari_c = ari(est_c, truth_c);
  m.ari = std::min(m.ari_r, m.ari_c);
  return m;
}

std::string metrics_csv_header() { return "error_rate_r,error_rate_c,error_rate,nmi_r,nmi_c,nmi,ari_r,ari_c,ari"; }

std::string to_csv_row(const MetricsReport& m) {
  std::ostringstream out;
  const double fields[] = {m.error_rate_r, m.error_rate_c, m.error_rate, m.nmi_r, m.nmi_c,
                           m.nmi,          m.ari_r,        m.ari_c,      m.ari};
  for (std::size_t i = 0; i < std::size(fields); ++i) out << (i ? "," : "") << format_double(fields[i]);
  return out.str();
}

}  // namespace bidfm
