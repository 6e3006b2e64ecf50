#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace bidfm {

// Dense real matrix. Adjacency matrices, expected adjacency matrices and
// singular-vector embeddings all use this type.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Throws DomainError if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

}  // namespace bidfm
