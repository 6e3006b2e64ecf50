#include "bidfm/model.hpp"

#include <cmath>
#include <sstream>

#include "bidfm/errors.hpp"
#include "bidfm/rng.hpp"

namespace bidfm {

namespace {

using Eigen::Index;

void check_membership(const Membership& z, const char* side, std::vector<std::string>& out) {
  if (z.size() == 0) {
    out.push_back(std::string(side) + " membership is empty");
    return;
  }
  const auto sizes = z.cluster_sizes();
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0) out.push_back(std::string(side) + " cluster " + std::to_string(k + 1) + " is empty");
  }
}

void check_mixing(const Membership& row, const Membership& col, const Matrix& p,
                  std::vector<std::string>& out) {
  if (p.rows() != row.k() || p.cols() != col.k()) {
    std::ostringstream msg;
    msg << "P is " << p.rows() << "x" << p.cols() << " but K_r = " << row.k() << ", K_c = " << col.k();
    out.push_back(msg.str());
    return;
  }
  if (p.size() == 0) return;
  if (!p.allFinite()) {
    out.push_back("P has non-finite entries");
    return;
  }
  const double max_abs = p.cwiseAbs().maxCoeff();
  if (std::fabs(max_abs - 1.0) > kMaxEntryTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "max|P| != 1 (got " << max_abs << ")";
    out.push_back(msg.str());
  }
  const double smallest = smallest_singular_value(p);
  if (!(smallest > kRankTolerance)) {
    std::ostringstream msg;
    msg << "P is rank deficient (smallest singular value " << smallest << ")";
    out.push_back(msg.str());
  }
}

void check_theta(const Vector& theta, std::size_t n, const char* name, std::vector<std::string>& out) {
  if (static_cast<std::size_t>(theta.size()) != n) {
    out.push_back(std::string(name) + " has " + std::to_string(theta.size()) + " entries, expected " +
                  std::to_string(n));
    return;
  }
  for (Index i = 0; i < theta.size(); ++i) {
    if (!(theta(i) > 0.0) || !std::isfinite(theta(i))) {
      out.push_back(std::string(name) + "(" + std::to_string(i + 1) + ") is not a positive finite number");
      return;
    }
  }
}

void throw_if_invalid(std::vector<std::string> violations) {
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

}  // namespace

Matrix mixing_p1() {
  Matrix p(2, 3);
  p << 1.0, 0.2, 0.3,
       0.3, 0.8, 0.2;
  return p;
}

Matrix mixing_p2() {
  Matrix p(2, 3);
  p << -1.0, 0.3, -0.5,
       -0.4, 0.8, 0.2;
  return p;
}

double smallest_singular_value(const Matrix& p) {
  if (p.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(p);
  const Vector& s = svd.singularValues();
  return s(s.size() - 1);
}

std::vector<std::string> validate(const BiDFMParams& params) {
  std::vector<std::string> out;
  check_membership(params.row, "row", out);
  check_membership(params.col, "column", out);
  check_mixing(params.row, params.col, params.p, out);
  if (!(params.rho > 0.0) || !std::isfinite(params.rho)) out.push_back("rho must be positive and finite");
  return out;
}

std::vector<std::string> validate(const BiDCDFMParams& params) {
  std::vector<std::string> out;
  check_membership(params.row, "row", out);
  check_membership(params.col, "column", out);
  check_mixing(params.row, params.col, params.p, out);
  check_theta(params.theta_r, params.row.size(), "theta_r", out);
  check_theta(params.theta_c, params.col.size(), "theta_c", out);
  return out;
}

Matrix expected_adjacency(const BiDFMParams& params) {
  throw_if_invalid(validate(params));
  const auto n_r = static_cast<Index>(params.row.size());
  const auto n_c = static_cast<Index>(params.col.size());
  Matrix omega(n_r, n_c);
  for (Index j = 0; j < n_c; ++j) {
    const int l = params.col[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n_r; ++i) omega(i, j) = params.rho * params.p(params.row[static_cast<std::size_t>(i)], l);
  }
  return omega;
}

Matrix expected_adjacency(const BiDCDFMParams& params) {
  throw_if_invalid(validate(params));
  const auto n_r = static_cast<Index>(params.row.size());
  const auto n_c = static_cast<Index>(params.col.size());
  Matrix omega(n_r, n_c);
  for (Index j = 0; j < n_c; ++j) {
    const int l = params.col[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n_r; ++i) {
      omega(i, j) = params.theta_r(i) * params.theta_c(j) * params.p(params.row[static_cast<std::size_t>(i)], l);
    }
  }
  return omega;
}

BiDCDFMParams as_degree_corrected(const BiDFMParams& params) {
  const double root = std::sqrt(params.rho);
  return {params.row, params.col, params.p,
          Vector::Constant(static_cast<Index>(params.row.size()), root),
          Vector::Constant(static_cast<Index>(params.col.size()), root)};
}

Membership sample_memberships(int n, int k, std::uint64_t seed) {
  if (k < 1) throw DimensionError("sample_memberships: k must be positive");
  if (n < k) {
    throw DimensionError("sample_memberships: cannot fill " + std::to_string(k) + " clusters with " +
                         std::to_string(n) + " nodes");
  }
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(seed, attempt);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int& l : labels) l = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    Membership z(std::move(labels), k);
    if (z.all_nonempty()) return z;
  }
}

Vector sample_theta(int n, double rho, std::uint64_t seed, double floor) {
  if (n < 0) throw DimensionError("sample_theta: n must be non-negative");
  if (!(rho > 0.0)) throw DomainError("sample_theta: rho must be positive");
  if (!(floor >= 0.0 && floor < 1.0)) throw DomainError("sample_theta: floor must lie in [0, 1)");
  Rng rng(seed);
  const double root = std::sqrt(rho);
  Vector theta(n);
  for (Index i = 0; i < n; ++i) theta(i) = root * (floor + (1.0 - floor) * rng.uniform_open());
  return theta;
}

}  // namespace bidfm
