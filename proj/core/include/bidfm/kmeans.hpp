#pragma once

#include <cstdint>
#include <vector>

#include "bidfm/matrix.hpp"
#include "bidfm/membership.hpp"

namespace bidfm {

struct KMeansResult {
  Membership labels;
  Matrix centroids;                 // k x d
  double objective = 0.0;           // sum of squared distances to assigned centroids
  int iterations = 0;               // Lloyd iterations of the winning restart
  bool converged = false;
  std::vector<double> trace;        // objective after every Lloyd step of the winning restart
};

// Lloyd's algorithm from k-means++ seeds, best of `restarts` runs.
//
// Restart r draws its seeds from Rng(seed, r); the lowest objective wins and
// ties go to the earliest restart. Points equidistant from several centroids
// join the lowest-index one. A cluster that empties during the iteration is
// reseeded with the point farthest from its own centroid, so the result
// always has exactly k occupied clusters when x has at least k rows.
KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed, int restarts = 10,
                    int max_iter = 300);

double kmeans_objective(const Matrix& x, const Membership& labels, const Matrix& centroids);

}  // namespace bidfm
