#include "bidfm/sampling.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "bidfm/errors.hpp"
#include "bidfm/rng.hpp"

namespace bidfm {

namespace {

using Eigen::Index;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

void support_error(const DistributionSpec& dist, Index i, Index j, double value, const char* interval) {
  std::ostringstream msg;
  msg.precision(17);
  msg << to_string(dist.kind) << " edges need Omega in " << interval << ", but Omega(" << i + 1 << ", " << j + 1
      << ") = " << value;
  throw DomainError(msg.str());
}

void check_entry(const DistributionSpec& dist, double value, Index i, Index j) {
  switch (dist.kind) {
    case EdgeLaw::kBernoulli:
      if (!(value >= 0.0 && value <= 1.0)) support_error(dist, i, j, value, "[0, 1]");
      break;
    case EdgeLaw::kSigned:
      if (!(value >= -1.0 && value <= 1.0)) support_error(dist, i, j, value, "[-1, 1]");
      break;
    case EdgeLaw::kPoisson:
      if (!(value >= 0.0)) support_error(dist, i, j, value, "[0, inf)");
      break;
    case EdgeLaw::kNormal:
      if (!std::isfinite(value)) support_error(dist, i, j, value, "(-inf, inf)");
      break;
  }
}

}  // namespace

void DistributionSpec::check() const {
  if (kind == EdgeLaw::kNormal) {
    if (!sigma2) throw DomainError("normal edges need sigma2_A");
    if (!(*sigma2 > 0.0) || !std::isfinite(*sigma2)) throw DomainError("sigma2_A must be positive and finite");
  } else if (sigma2) {
    throw DomainError("sigma2_A is only meaningful for normal edges");
  }
}

std::string to_string(EdgeLaw law) {
  switch (law) {
    case EdgeLaw::kBernoulli: return "bernoulli";
    case EdgeLaw::kNormal: return "normal";
    case EdgeLaw::kSigned: return "signed";
    case EdgeLaw::kPoisson: return "poisson";
  }
  return "unknown";
}

EdgeLaw parse_edge_law(std::string_view name) {
  const std::string s = lower(name);
  if (s == "bernoulli") return EdgeLaw::kBernoulli;
  if (s == "normal" || s == "gaussian") return EdgeLaw::kNormal;
  if (s == "signed") return EdgeLaw::kSigned;
  if (s == "poisson") return EdgeLaw::kPoisson;
  throw ParseError("unknown edge distribution '" + std::string(name) + "'");
}

void check_support(const Matrix& omega, const DistributionSpec& dist) {
  dist.check();
  for (Index j = 0; j < omega.cols(); ++j)
    for (Index i = 0; i < omega.rows(); ++i) check_entry(dist, omega(i, j), i, j);
}

Matrix sample_adjacency(const Matrix& omega, const DistributionSpec& dist, std::uint64_t seed) {
  check_support(omega, dist);
  Matrix a(omega.rows(), omega.cols());
  const double sd = dist.sigma2 ? std::sqrt(*dist.sigma2) : 0.0;
  for (Index j = 0; j < omega.cols(); ++j) {
    for (Index i = 0; i < omega.rows(); ++i) {
      Rng rng(seed, derive_seed(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)));
      const double w = omega(i, j);
      switch (dist.kind) {
        case EdgeLaw::kBernoulli: a(i, j) = rng.uniform() < w ? 1.0 : 0.0; break;
        case EdgeLaw::kNormal: a(i, j) = w + sd * rng.normal(); break;
        case EdgeLaw::kSigned: a(i, j) = rng.uniform() < 0.5 * (1.0 + w) ? 1.0 : -1.0; break;
        case EdgeLaw::kPoisson: a(i, j) = static_cast<double>(rng.poisson(w)); break;
      }
    }
  }
  return a;
}

Moments distribution_moments(const DistributionSpec& dist, double omega_entry, double scale) {
  dist.check();
  check_entry(dist, omega_entry, 0, 0);
  if (!(scale > 0.0)) throw DomainError("distribution_moments: scale must be positive");
  double variance = 0.0;
  switch (dist.kind) {
    case EdgeLaw::kBernoulli: variance = omega_entry * (1.0 - omega_entry); break;
    case EdgeLaw::kNormal: variance = *dist.sigma2; break;
    case EdgeLaw::kSigned: variance = 1.0 - omega_entry * omega_entry; break;
    case EdgeLaw::kPoisson: variance = omega_entry; break;
  }
  return {variance, variance / scale};
}

}  // namespace bidfm
