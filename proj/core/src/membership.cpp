#include "bidfm/membership.hpp"

#include <algorithm>
#include <string>

#include "bidfm/errors.hpp"

namespace bidfm {

Membership::Membership(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) throw DimensionError("membership needs at least one cluster, got k = " + std::to_string(k_));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= k_) {
      throw DimensionError("label " + std::to_string(labels_[i] + 1) + " of node " + std::to_string(i + 1) +
                           " outside 1.." + std::to_string(k_));
    }
  }
}

Membership Membership::from_one_based(const std::vector<int>& labels, int k) {
  std::vector<int> zero_based(labels.size());
  std::transform(labels.begin(), labels.end(), zero_based.begin(), [](int l) { return l - 1; });
  return Membership(std::move(zero_based), k);
}

Membership Membership::from_one_hot(const Matrix& z) {
  std::vector<int> labels(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    int found = -1;
    for (Eigen::Index k = 0; k < z.cols(); ++k) {
      if (z(i, k) == 1.0) {
        if (found >= 0) throw DimensionError("row " + std::to_string(i + 1) + " has more than one 1");
        found = static_cast<int>(k);
      } else if (z(i, k) != 0.0) {
        throw DimensionError("membership matrix entries must be 0 or 1");
      }
    }
    if (found < 0) throw DimensionError("row " + std::to_string(i + 1) + " has no cluster");
    labels[static_cast<std::size_t>(i)] = found;
  }
  return Membership(std::move(labels), static_cast<int>(z.cols()));
}

std::vector<int> Membership::one_based() const {
  std::vector<int> out(labels_.size());
  std::transform(labels_.begin(), labels_.end(), out.begin(), [](int l) { return l + 1; });
  return out;
}

std::vector<std::size_t> Membership::cluster_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(std::max(k_, 0)), 0);
  for (int l : labels_) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

bool Membership::all_nonempty() const {
  const auto sizes = cluster_sizes();
  return std::none_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s == 0; });
}

Matrix Membership::one_hot() const {
  Matrix z = Matrix::Zero(static_cast<Eigen::Index>(labels_.size()), k_);
  for (std::size_t i = 0; i < labels_.size(); ++i) z(static_cast<Eigen::Index>(i), labels_[i]) = 1.0;
  return z;
}

}  // namespace bidfm
