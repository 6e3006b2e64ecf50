#include "bidfm/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bidfm/errors.hpp"

namespace bidfm {

namespace {

using Eigen::Index;

struct SideStats {
  int min_size = 0;
  int max_size = 0;
};

SideStats side_stats(const Membership& z) {
  const auto sizes = z.cluster_sizes();
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  return {static_cast<int>(*lo), static_cast<int>(*hi)};
}

template <class Scale>
GammaTau gamma_tau_impl(const DistributionSpec& dist, const Matrix& omega, Scale scale) {
  check_support(omega, dist);
  GammaTau out;
  for (Index j = 0; j < omega.cols(); ++j)
    for (Index i = 0; i < omega.rows(); ++i)
      out.gamma = std::max(out.gamma, distribution_moments(dist, omega(i, j), scale(i, j)).gamma_contribution);
  const double max_abs = omega.size() > 0 ? omega.cwiseAbs().maxCoeff() : 0.0;
  switch (dist.kind) {
    case EdgeLaw::kBernoulli: out.tau = 1.0; break;
    case EdgeLaw::kSigned: out.tau = 1.0 + max_abs; break;
    case EdgeLaw::kNormal:
    case EdgeLaw::kPoisson: out.tau = std::nullopt; break;
  }
  return out;
}

// Rows of `u` grouped by cluster: returns the cluster centroids and the
// largest distance of any member from its centroid.
std::pair<Matrix, double> cluster_rows(const Matrix& u, const Membership& z) {
  Matrix centroids = Matrix::Zero(z.k(), u.cols());
  const auto sizes = z.cluster_sizes();
  for (Index i = 0; i < u.rows(); ++i) centroids.row(z[static_cast<std::size_t>(i)]) += u.row(i);
  for (int k = 0; k < z.k(); ++k) centroids.row(k) /= static_cast<double>(sizes[static_cast<std::size_t>(k)]);
  double spread = 0.0;
  for (Index i = 0; i < u.rows(); ++i)
    spread = std::max(spread, (u.row(i) - centroids.row(z[static_cast<std::size_t>(i)])).norm());
  return {centroids, spread};
}

double min_pairwise_distance(const Matrix& centroids) {
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < centroids.rows(); ++k)
    for (Index l = k + 1; l < centroids.rows(); ++l) best = std::min(best, (centroids.row(k) - centroids.row(l)).norm());
  return best;
}

template <class Predicted>
double between_deviation(const Matrix& centroids, Predicted predicted) {
  double worst = 0.0;
  for (Index k = 0; k < centroids.rows(); ++k)
    for (Index l = k + 1; l < centroids.rows(); ++l)
      worst = std::max(worst, std::fabs((centroids.row(k) - centroids.row(l)).norm() - predicted(k, l)));
  return worst;
}

SvdFactors population_factors(const Matrix& omega, int rank) {
  SvdFactors f = truncated_svd(omega, rank);
  const double top = f.singular_values(0);
  if (!(f.singular_values(rank - 1) > 1e-10 * top)) {
    throw DimensionError("population matrix is rank deficient (rank < " + std::to_string(rank) + ")");
  }
  return f;
}

GeometryReport geometry(const Matrix& omega, const Membership& row, const Membership& col, bool normalized) {
  const int rank = std::min(row.k(), col.k());
  const SvdFactors f = population_factors(omega, rank);
  Matrix u_r = f.left;
  Matrix u_c = f.right;
  if (normalized) {
    u_r = row_normalize(u_r).rows;
    u_c = row_normalize(u_c).rows;
  }
  const auto [cent_r, spread_r] = cluster_rows(u_r, row);
  const auto [cent_c, spread_c] = cluster_rows(u_c, col);

  GeometryReport report;
  report.rank = rank;
  report.within_row_deviation = spread_r;
  report.within_col_deviation = spread_c;

  auto predicted_for = [normalized](const Membership& z) {
    const auto sizes = z.cluster_sizes();
    return [normalized, sizes](Index k, Index l) {
      if (normalized) return std::sqrt(2.0);
      return std::sqrt(1.0 / static_cast<double>(sizes[static_cast<std::size_t>(k)]) +
                       1.0 / static_cast<double>(sizes[static_cast<std::size_t>(l)]));
    };
  };
  // Closed-form distances hold on the side with the fewer clusters, and on
  // both sides when the counts agree.
  if (row.k() <= col.k()) report.between_row_deviation = between_deviation(cent_r, predicted_for(row));
  if (col.k() <= row.k()) report.between_col_deviation = between_deviation(cent_c, predicted_for(col));
  report.columns_checked = row.k() == col.k();
  return report;
}

double positive_log(double x) { return std::log(x); }

}  // namespace

double GeometryReport::max_deviation() const {
  return std::max({within_row_deviation, within_col_deviation, between_row_deviation, between_col_deviation});
}

void check_inputs(const TheoryInputs& in) {
  auto fail = [](const std::string& what) { throw DimensionError("theory inputs: " + what); };
  if (in.n_r < 1 || in.n_c < 1) fail("n_r and n_c must be positive");
  if (in.k_r < 1 || in.k_c < 1) fail("K_r and K_c must be positive");
  if (in.n_r_min > in.n_r_max || in.n_c_min > in.n_c_max) fail("cluster size extrema out of order");
  if (in.theta_r_min > in.theta_r_max || in.theta_c_min > in.theta_c_max) fail("theta extrema out of order");
  if (in.gamma < 0.0) fail("gamma must be non-negative");
  if (in.tau && *in.tau < 0.0) fail("tau must be non-negative");
}

GammaTau gamma_tau(const DistributionSpec& dist, const BiDFMParams& params) {
  const Matrix omega = expected_adjacency(params);
  GammaTau out = gamma_tau_impl(dist, omega, [&](Index, Index) { return params.rho; });
  switch (dist.kind) {
    case EdgeLaw::kBernoulli: out.gamma_bound = 1.0; break;
    case EdgeLaw::kNormal: out.gamma_bound = *dist.sigma2 / params.rho; break;
    case EdgeLaw::kSigned: out.gamma_bound = 1.0 / params.rho; break;
    case EdgeLaw::kPoisson: out.gamma_bound = 1.0; break;
  }
  return out;
}

GammaTau gamma_tau(const DistributionSpec& dist, const BiDCDFMParams& params) {
  const Matrix omega = expected_adjacency(params);
  GammaTau out = gamma_tau_impl(dist, omega, [&](Index i, Index j) { return params.theta_r(i) * params.theta_c(j); });
  const double floor_product = params.theta_r.minCoeff() * params.theta_c.minCoeff();
  switch (dist.kind) {
    case EdgeLaw::kBernoulli: out.gamma_bound = 1.0; break;
    case EdgeLaw::kNormal: out.gamma_bound = *dist.sigma2 / floor_product; break;
    case EdgeLaw::kSigned: out.gamma_bound = 1.0 / floor_product; break;
    case EdgeLaw::kPoisson: out.gamma_bound = 1.0; break;
  }
  return out;
}

TheoryInputs theory_inputs(const DistributionSpec& dist, const BiDFMParams& params) {
  const GammaTau gt = gamma_tau(dist, params);
  TheoryInputs in;
  in.n_r = static_cast<int>(params.row.size());
  in.n_c = static_cast<int>(params.col.size());
  in.k_r = params.row.k();
  in.k_c = params.col.k();
  in.sigma_kr_p = smallest_singular_value(params.p);
  in.rho = params.rho;
  in.gamma = gt.gamma;
  in.tau = gt.tau;
  const SideStats r = side_stats(params.row);
  const SideStats c = side_stats(params.col);
  in.n_r_min = r.min_size;
  in.n_r_max = r.max_size;
  in.n_c_min = c.min_size;
  in.n_c_max = c.max_size;
  const double root = std::sqrt(params.rho);
  in.theta_r_min = in.theta_r_max = in.theta_c_min = in.theta_c_max = root;
  in.theta_r_l1 = root * in.n_r;
  in.theta_c_l1 = root * in.n_c;

  const Matrix omega = expected_adjacency(params);
  const SvdFactors f = population_factors(omega, std::min(in.k_r, in.k_c));
  in.delta_c = min_pairwise_distance(cluster_rows(f.right, params.col).first);
  const Matrix normalized = row_normalize(f.right).rows;
  const Matrix v_c = cluster_rows(normalized, params.col).first;
  in.delta_c_star = min_pairwise_distance(v_c);
  in.m_vc = v_c.rowwise().norm().minCoeff();
  return in;
}

TheoryInputs theory_inputs(const DistributionSpec& dist, const BiDCDFMParams& params) {
  const GammaTau gt = gamma_tau(dist, params);
  TheoryInputs in;
  in.n_r = static_cast<int>(params.row.size());
  in.n_c = static_cast<int>(params.col.size());
  in.k_r = params.row.k();
  in.k_c = params.col.k();
  in.sigma_kr_p = smallest_singular_value(params.p);
  in.gamma = gt.gamma;
  in.tau = gt.tau;
  const SideStats r = side_stats(params.row);
  const SideStats c = side_stats(params.col);
  in.n_r_min = r.min_size;
  in.n_r_max = r.max_size;
  in.n_c_min = c.min_size;
  in.n_c_max = c.max_size;
  in.theta_r_min = params.theta_r.minCoeff();
  in.theta_r_max = params.theta_r.maxCoeff();
  in.theta_c_min = params.theta_c.minCoeff();
  in.theta_c_max = params.theta_c.maxCoeff();
  in.theta_r_l1 = params.theta_r.sum();
  in.theta_c_l1 = params.theta_c.sum();
  // Largest per-entry scale; equals rho when theta is constant sqrt(rho).
  in.rho = in.theta_r_max * in.theta_c_max;

  const Matrix omega = expected_adjacency(params);
  const SvdFactors f = population_factors(omega, std::min(in.k_r, in.k_c));
  in.delta_c = min_pairwise_distance(cluster_rows(f.right, params.col).first);
  const Matrix v_c = cluster_rows(row_normalize(f.right).rows, params.col).first;
  in.delta_c_star = min_pairwise_distance(v_c);
  in.m_vc = v_c.rowwise().norm().minCoeff();
  return in;
}

double empirical_tau(const Matrix& a, const Matrix& omega) {
  if (a.rows() != omega.rows() || a.cols() != omega.cols()) throw DimensionError("empirical_tau: shapes differ");
  if (a.size() == 0) return 0.0;
  return (a - omega).cwiseAbs().maxCoeff();
}

AssumptionCheck check_assumption1(const TheoryInputs& in) {
  check_inputs(in);
  AssumptionCheck out;
  if (!in.tau) {
    out.indeterminate = true;
    return out;
  }
  const double lhs = in.gamma * in.rho;
  const double rhs = *in.tau * *in.tau * positive_log(in.n_r + in.n_c) / std::max(in.n_r, in.n_c);
  out.ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
  out.holds = lhs >= rhs * (1.0 - 1e-12);
  return out;
}

AssumptionCheck check_assumption2(const TheoryInputs& in) {
  check_inputs(in);
  AssumptionCheck out;
  if (!in.tau) {
    out.indeterminate = true;
    return out;
  }
  const double spread = std::max(in.theta_r_max * in.theta_c_l1, in.theta_c_max * in.theta_r_l1);
  const double lhs = in.gamma * spread;
  const double rhs = *in.tau * *in.tau * positive_log(in.n_r + in.n_c);
  out.ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
  out.holds = lhs >= rhs * (1.0 - 1e-12);
  return out;
}

double deviation_bound_bidfm(const TheoryInputs& in, double c_alpha) {
  check_inputs(in);
  return c_alpha * std::sqrt(in.gamma * in.rho * std::max(in.n_r, in.n_c) * positive_log(in.n_r + in.n_c));
}

double deviation_bound_bidcdfm(const TheoryInputs& in, double c_alpha) {
  check_inputs(in);
  const double spread = std::max(in.theta_r_max * in.theta_c_l1, in.theta_c_max * in.theta_r_l1);
  return c_alpha * std::sqrt(in.gamma * spread * positive_log(in.n_r + in.n_c));
}

Envelope error_envelope_bidfm(const TheoryInputs& in, double c) {
  check_inputs(in);
  if (!(in.sigma_kr_p > 0.0) || !(in.rho > 0.0) || in.n_r_min < 1 || in.n_c_min < 1) {
    throw DimensionError("error_envelope_bidfm: sigma_K(P), rho and minimum cluster sizes must be positive");
  }
  double delta_c;
  if (in.delta_c) {
    delta_c = *in.delta_c;
  } else if (in.k_r == in.k_c) {
    delta_c = std::sqrt(2.0 / in.n_c_max);
  } else {
    throw DimensionError("error_envelope_bidfm: delta_c is required when K_r != K_c");
  }
  const double kr = in.k_r;
  const double kc = in.k_c;
  const double common = std::max(in.n_r, in.n_c) * positive_log(in.n_r + in.n_c) /
                        (in.sigma_kr_p * in.sigma_kr_p * in.rho * in.n_r_min * in.n_c_min);
  Envelope e;
  e.f_r = c * in.gamma * kr * kr * in.n_r_max / static_cast<double>(in.n_r_min) * common;
  e.f_c = c * in.gamma * kr * kc / (delta_c * delta_c * in.n_c_min) * common;
  return e;
}

Envelope error_envelope_bidcdfm(const TheoryInputs& in, double c) {
  check_inputs(in);
  if (!(in.sigma_kr_p > 0.0) || !(in.theta_r_min > 0.0) || !(in.theta_c_min > 0.0) || in.n_r_min < 1 ||
      in.n_c_min < 1) {
    throw DimensionError("error_envelope_bidcdfm: sigma_K(P), theta minima and cluster sizes must be positive");
  }
  double delta = 0.0;
  double m_vc = 0.0;
  if (in.delta_c_star && in.m_vc) {
    delta = *in.delta_c_star;
    m_vc = *in.m_vc;
  } else if (in.k_r == in.k_c) {
    delta = std::sqrt(2.0);
    m_vc = 1.0;
  } else {
    throw DimensionError("error_envelope_bidcdfm: delta_c_star and m_vc are required when K_r != K_c");
  }
  const double kr = in.k_r;
  const double kc = in.k_c;
  const double spread = std::max(in.theta_r_max * in.theta_c_l1, in.theta_c_max * in.theta_r_l1);
  const double log_n = positive_log(in.n_r + in.n_c);
  const double s2 = in.sigma_kr_p * in.sigma_kr_p;
  const double nr_min = in.n_r_min;
  const double nc_min = in.n_c_min;
  Envelope e;
  e.f_r = c * in.gamma * in.theta_r_max * in.theta_r_max * kr * kr * in.n_r_max * spread * log_n /
          (std::pow(in.theta_r_min, 4) * in.theta_c_min * in.theta_c_min * s2 * nr_min * nr_min * nc_min);
  e.f_c = c * in.gamma * in.theta_c_max * in.theta_c_max * kr * kc * in.n_c_max * spread * log_n /
          (in.theta_r_min * in.theta_r_min * std::pow(in.theta_c_min, 4) * s2 * delta * delta * m_vc * m_vc *
           nr_min * nc_min * nc_min);
  return e;
}

GeometryReport population_geometry_check(const BiDFMParams& params) {
  return geometry(expected_adjacency(params), params.row, params.col, false);
}

GeometryReport population_geometry_check(const BiDCDFMParams& params) {
  return geometry(expected_adjacency(params), params.row, params.col, true);
}

SvdFactors population_svd_oracle(const BiDCDFMParams& params) {
  if (auto v = validate(params); !v.empty()) throw ValidationError(std::move(v));
  const int k_r = params.row.k();
  const int k_c = params.col.k();
  const auto n_r = static_cast<Index>(params.row.size());
  const auto n_c = static_cast<Index>(params.col.size());
  const double norm_r = params.theta_r.norm();
  const double norm_c = params.theta_c.norm();

  // Column norms of Theta Z, one per cluster.
  Vector block_r = Vector::Zero(k_r);
  Vector block_c = Vector::Zero(k_c);
  for (Index i = 0; i < n_r; ++i) block_r(params.row[static_cast<std::size_t>(i)]) += params.theta_r(i) * params.theta_r(i);
  for (Index j = 0; j < n_c; ++j) block_c(params.col[static_cast<std::size_t>(j)]) += params.theta_c(j) * params.theta_c(j);
  block_r = block_r.cwiseSqrt();
  block_c = block_c.cwiseSqrt();

  Matrix gamma_r = Matrix::Zero(n_r, k_r);
  Matrix gamma_c = Matrix::Zero(n_c, k_c);
  for (Index i = 0; i < n_r; ++i) {
    const int k = params.row[static_cast<std::size_t>(i)];
    gamma_r(i, k) = params.theta_r(i) / block_r(k);
  }
  for (Index j = 0; j < n_c; ++j) {
    const int l = params.col[static_cast<std::size_t>(j)];
    gamma_c(j, l) = params.theta_c(j) / block_c(l);
  }
  const Vector d_r = block_r / norm_r;
  const Vector d_c = block_c / norm_c;
  const Matrix core = d_r.asDiagonal() * params.p * d_c.asDiagonal();

  Eigen::JacobiSVD<Matrix> small(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const int rank = std::min(k_r, k_c);
  SvdFactors out;
  out.singular_values = norm_r * norm_c * small.singularValues().head(rank);
  out.left = gamma_r * small.matrixU().leftCols(rank);
  out.right = gamma_c * small.matrixV().leftCols(rank);
  canonicalize_signs(out.left, out.right);
  return out;
}

}  // namespace bidfm
