#pragma once

#include <vector>

#include "bidfm/matrix.hpp"

namespace bidfm {

// Leading singular triplets: m ~= left * diag(singular_values) * right^T.
struct SvdFactors {
  Matrix left;              // n x k, orthonormal columns
  Vector singular_values;   // k values, non-increasing
  Matrix right;             // m x k, orthonormal columns
};

struct SvdOptions {
  double tol = 1e-10;  // residual tolerance relative to the largest singular value
  int max_iter = 0;    // 0 selects 1000 * k
};

// k leading singular triplets of m.
//
// Block Krylov iteration on m^T m with Rayleigh-Ritz extraction, full
// reorthogonalization and thick restarts once the basis reaches its cap.
// Iteration stops when every requested triplet satisfies
// ||m^T u_i - s_i v_i|| <= tol * s_1. Each left singular vector is
// sign-normalized so that its largest-magnitude entry is positive.
//
// Throws DimensionError unless 1 <= k <= min(rows, cols), DomainError on
// non-finite input and ConvergenceError when the iteration cap is reached.
SvdFactors truncated_svd(const Matrix& m, int k, const SvdOptions& options = {});

struct RowNormalization {
  Matrix rows;
  // Indices (zero-based) of rows whose norm was below eps; left unscaled.
  std::vector<int> degenerate;
};

// Scales each row with norm >= eps to unit Euclidean norm.
RowNormalization row_normalize(const Matrix& m, double eps = 1e-12);

// Largest singular value.
double spectral_norm(const Matrix& m);

// ||a - b|| in the operator 2-norm. Shapes must agree.
double spectral_deviation(const Matrix& a, const Matrix& b);

// Flips column signs of u (and the matching columns of v) so that the
// largest-magnitude entry of each column of u is positive.
void canonicalize_signs(Matrix& u, Matrix& v);

}  // namespace bidfm
