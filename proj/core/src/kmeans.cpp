#include "bidfm/kmeans.hpp"

#include <limits>
#include <string>

#include "bidfm/errors.hpp"
#include "bidfm/rng.hpp"

namespace bidfm {

namespace {

using Eigen::Index;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double squared_distance(const RowMatrix& x, Index i, const RowMatrix& c, Index j) {
  double s = 0.0;
  for (Index t = 0; t < x.cols(); ++t) {
    const double diff = x(i, t) - c(j, t);
    s += diff * diff;
  }
  return s;
}

RowMatrix plus_plus_seeds(const RowMatrix& x, int k, Rng& rng) {
  const Index n = x.rows();
  RowMatrix centers(k, x.cols());
  centers.row(0) = x.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  std::vector<double> nearest(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) nearest[static_cast<std::size_t>(i)] = squared_distance(x, i, centers, 0);

  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (double v : nearest) total += v;
    Index pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cumulative = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double w = nearest[static_cast<std::size_t>(i)];
        if (w <= 0.0) continue;
        cumulative += w;
        if (cumulative > target) {
          pick = i;
          break;
        }
      }
      while (nearest[static_cast<std::size_t>(pick)] <= 0.0 && pick > 0) --pick;
    } else {
      pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centers.row(j) = x.row(pick);
    for (Index i = 0; i < n; ++i) {
      nearest[static_cast<std::size_t>(i)] =
          std::min(nearest[static_cast<std::size_t>(i)], squared_distance(x, i, centers, j));
    }
  }
  return centers;
}

struct Run {
  std::vector<int> labels;
  RowMatrix centers;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

void assign(const RowMatrix& x, const RowMatrix& centers, std::vector<int>& labels) {
  for (Index i = 0; i < x.rows(); ++i) {
    int best = 0;
    double best_d = squared_distance(x, i, centers, 0);
    for (Index j = 1; j < centers.rows(); ++j) {
      const double d = squared_distance(x, i, centers, j);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(j);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
}

// Moves the point farthest from its own centroid into each empty cluster.
void repair_empty(const RowMatrix& x, const RowMatrix& centers, std::vector<int>& labels, int k) {
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++counts[static_cast<std::size_t>(l)];
  for (int e = 0; e < k; ++e) {
    if (counts[static_cast<std::size_t>(e)] > 0) continue;
    Index far = -1;
    double far_d = -1.0;
    for (Index i = 0; i < x.rows(); ++i) {
      const int l = labels[static_cast<std::size_t>(i)];
      if (counts[static_cast<std::size_t>(l)] <= 1) continue;
      const double d = squared_distance(x, i, centers, l);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far < 0) break;  // fewer points than clusters; cannot happen when n >= k
    --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
    labels[static_cast<std::size_t>(far)] = e;
    ++counts[static_cast<std::size_t>(e)];
  }
}

void update_centers(const RowMatrix& x, const std::vector<int>& labels, RowMatrix& centers) {
  const Index k = centers.rows();
  RowMatrix sums = RowMatrix::Zero(k, x.cols());
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < x.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    sums.row(l) += x.row(i);
    ++counts[static_cast<std::size_t>(l)];
  }
  for (Index j = 0; j < k; ++j) {
    if (counts[static_cast<std::size_t>(j)] > 0) centers.row(j) = sums.row(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
  }
}

double objective_of(const RowMatrix& x, const std::vector<int>& labels, const RowMatrix& centers) {
  double total = 0.0;
  for (Index i = 0; i < x.rows(); ++i) total += squared_distance(x, i, centers, labels[static_cast<std::size_t>(i)]);
  return total;
}

Run lloyd(const RowMatrix& x, int k, Rng& rng, int max_iter) {
  Run run;
  run.centers = plus_plus_seeds(x, k, rng);
  run.labels.assign(static_cast<std::size_t>(x.rows()), -1);
  std::vector<int> previous;
  for (int iter = 0; iter < max_iter; ++iter) {
    previous = run.labels;
    assign(x, run.centers, run.labels);
    repair_empty(x, run.centers, run.labels, k);
    update_centers(x, run.labels, run.centers);
    run.objective = objective_of(x, run.labels, run.centers);
    run.trace.push_back(run.objective);
    run.iterations = iter + 1;
    if (run.labels == previous) {
      run.converged = true;
      break;
    }
  }
  return run;
}

}  // namespace

KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, int restarts, int max_iter) {
  if (k < 1 || k > x.rows()) {
    throw DimensionError("kmeans: k = " + std::to_string(k) + " but only " + std::to_string(x.rows()) +
                         " points");
  }
  if (restarts < 1 || max_iter < 1) throw DimensionError("kmeans: restarts and max_iter must be positive");
  require_finite(x, "kmeans");

  const RowMatrix points = x;
  Run best;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    Run run = lloyd(points, k, rng, max_iter);
    if (r == 0 || run.objective < best.objective) best = std::move(run);
  }

  KMeansResult out;
  out.labels = Membership(std::move(best.labels), k);
  out.centroids = best.centers;
  out.objective = best.objective;
  out.iterations = best.iterations;
  out.converged = best.converged;
  out.trace = std::move(best.trace);
  return out;
}

double kmeans_objective(const Matrix& x, const Membership& labels, const Matrix& centroids) {
  if (static_cast<Index>(labels.size()) != x.rows() || centroids.cols() != x.cols() ||
      centroids.rows() < labels.k()) {
    throw DimensionError("kmeans_objective: shapes do not match");
  }
  double total = 0.0;
  for (Index i = 0; i < x.rows(); ++i)
    total += (x.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
  return total;
}

}  // namespace bidfm
