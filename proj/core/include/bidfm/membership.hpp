#pragma once

#include <cstddef>
#include <vector>

#include "bidfm/matrix.hpp"

namespace bidfm {

// Hard cluster assignment for one side of a bipartite network.
//
// Labels are stored zero-based (0..k-1); files and reports use the
// one-based convention. Construction checks the range only. Whether every
// cluster is occupied is a separate question (all_nonempty), because
// estimated partitions may legitimately leave clusters unused when they are
// compared against a truth with a different number of clusters.
class Membership {
 public:
  Membership() = default;
  Membership(std::vector<int> labels, int k);

  static Membership from_one_based(const std::vector<int>& labels, int k);
  // Inverse of one_hot(). Every row must contain exactly one 1.
  static Membership from_one_hot(const Matrix& z);

  std::size_t size() const noexcept { return labels_.size(); }
  int k() const noexcept { return k_; }
  int operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  std::vector<int> one_based() const;
  std::vector<std::size_t> cluster_sizes() const;
  bool all_nonempty() const;
  Matrix one_hot() const;

  friend bool operator==(const Membership&, const Membership&) = default;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

}  // namespace bidfm
