#include "bidfm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bidfm/errors.hpp"
#include "bidfm/rng.hpp"

namespace bidfm {

namespace {

using Eigen::Index;

constexpr std::uint64_t kStartSeed = 0x5eed5eed5eedULL;

Matrix random_block(Index rows, Index cols, Rng& rng) {
  Matrix x(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) x(i, j) = rng.normal();
  return x;
}

// Orthonormalizes the columns of x against basis.leftCols(used) and each
// other, appending the survivors. Returns how many columns were appended.
Index append_orthonormal(Matrix& basis, Index& used, const Matrix& x) {
  const Index capacity = basis.cols();
  Index added = 0;
  for (Index j = 0; j < x.cols() && used < capacity; ++j) {
    Vector v = x.col(j);
    const double original = v.norm();
    if (!(original > 0.0)) continue;
    double before = original;
    double after = before;
    for (int pass = 0; pass < 3; ++pass) {
      if (used > 0) {
        const Vector coeffs = basis.leftCols(used).transpose() * v;
        v.noalias() -= basis.leftCols(used) * coeffs;
      }
      after = v.norm();
      if (after >= 0.5 * before) break;
      before = after;
    }
    if (after <= 1e-12 * original) continue;
    basis.col(used) = v / after;
    ++used;
    ++added;
  }
  return added;
}

struct RitzPairs {
  Vector values;
  Matrix left;   // r x s
  Matrix right;  // s x s, coefficients in the basis
};

RitzPairs rayleigh_ritz(const Matrix& projected) {
  Eigen::BDCSVD<Matrix> svd(projected, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.singularValues(), svd.matrixU(), svd.matrixV()};
}

// Leading singular triplets of w, which has at least as many rows as columns.
SvdFactors krylov_svd(const Matrix& w, int k, double tol, int max_iter) {
  const Index r = w.rows();
  const Index c = w.cols();
  const Index block = std::min<Index>(c, 2 * static_cast<Index>(k) + 4);
  const Index capacity = std::min<Index>(c, std::max<Index>(6 * block, 60));

  Matrix basis(c, capacity);
  Matrix image(r, capacity);  // w * basis
  Index used = 0;
  Rng rng(kStartSeed);

  Matrix next = random_block(c, block, rng);
  double residual = 0.0;
  RitzPairs ritz;

  for (int iter = 0; iter < max_iter; ++iter) {
    const Index start = used;
    Index added = append_orthonormal(basis, used, next);
    if (added == 0 && used < c && used < capacity) {
      added = append_orthonormal(basis, used, random_block(c, block, rng));
    }
    if (added > 0) image.middleCols(start, added).noalias() = w * basis.middleCols(start, added);

    ritz = rayleigh_ritz(image.leftCols(used));
    const double scale = ritz.values(0);
    const Index width = std::min<Index>(block, used);
    // w^T u_i = s_i v_i + residual_i; the same product seeds the next block.
    Matrix wt_u = w.transpose() * ritz.left.leftCols(width);

    residual = 0.0;
    for (Index i = 0; i < k; ++i) {
      const Vector v = basis.leftCols(used) * ritz.right.col(i);
      residual = std::max(residual, (wt_u.col(i) - ritz.values(i) * v).norm());
    }
    if (used == c || residual <= tol * scale || scale == 0.0) {
      SvdFactors out;
      out.singular_values = ritz.values.head(k);
      out.left = ritz.left.leftCols(k);
      out.right = basis.leftCols(used) * ritz.right.leftCols(k);
      return out;
    }

    if (used + block > capacity) {
      const Index keep = std::min<Index>(used, std::max<Index>(block, capacity / 2));
      const Matrix kept_basis = basis.leftCols(used) * ritz.right.leftCols(keep);
      basis.leftCols(keep) = kept_basis;
      image.leftCols(keep) = ritz.left.leftCols(keep) * ritz.values.head(keep).asDiagonal();
      used = keep;
    }
    next = std::move(wt_u);
  }
  throw ConvergenceError("truncated_svd: no convergence after " + std::to_string(max_iter) +
                             " iterations (residual " + std::to_string(residual) + ")",
                         residual);
}

}  // namespace

void canonicalize_signs(Matrix& u, Matrix& v) {
  for (Index j = 0; j < u.cols(); ++j) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < u.rows(); ++i) {
      const double a = std::fabs(u(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (u(best, j) < 0.0) {
      u.col(j) *= -1.0;
      if (j < v.cols()) v.col(j) *= -1.0;
    }
  }
}

SvdFactors truncated_svd(const Matrix& m, int k, const SvdOptions& options) {
  const Index dim = std::min(m.rows(), m.cols());
  if (k < 1 || k > dim) {
    throw DimensionError("truncated_svd: k = " + std::to_string(k) + " outside 1.." + std::to_string(dim) +
                         " for a " + std::to_string(m.rows()) + " x " + std::to_string(m.cols()) + " matrix");
  }
  if (!(options.tol > 0.0)) throw DimensionError("truncated_svd: tolerance must be positive");
  require_finite(m, "truncated_svd");
  const int max_iter = options.max_iter > 0 ? options.max_iter : 1000 * k;

  SvdFactors out;
  if (m.cols() > m.rows()) {
    const Matrix mt = m.transpose();
    SvdFactors t = krylov_svd(mt, k, options.tol, max_iter);
    out.left = std::move(t.right);
    out.right = std::move(t.left);
    out.singular_values = std::move(t.singular_values);
  } else {
    out = krylov_svd(m, k, options.tol, max_iter);
  }
  canonicalize_signs(out.left, out.right);
  return out;
}

RowNormalization row_normalize(const Matrix& m, double eps) {
  RowNormalization out{m, {}};
  for (Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm >= eps && norm > 0.0) {
      out.rows.row(i) /= norm;
    } else {
      out.degenerate.push_back(static_cast<int>(i));
    }
  }
  return out;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return truncated_svd(m, 1).singular_values(0);
}

double spectral_deviation(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("spectral_deviation: shapes " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + " differ");
  }
  return spectral_norm(a - b);
}

}  // namespace bidfm
