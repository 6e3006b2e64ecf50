#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bidfm/matrix.hpp"

namespace bidfm {

enum class EdgeLaw { kBernoulli, kNormal, kSigned, kPoisson };

// Edge distribution with mean Omega(i, j).
//   Bernoulli  P(A = 1) = Omega              requires Omega in [0, 1]
//   Normal     N(Omega, sigma2)              any Omega
//   Signed     P(A = +1) = (1 + Omega) / 2   requires Omega in [-1, 1]
//   Poisson    Poisson(Omega)                requires Omega >= 0
struct DistributionSpec {
  EdgeLaw kind = EdgeLaw::kBernoulli;
  std::optional<double> sigma2;  // present iff kind == kNormal

  static DistributionSpec bernoulli() { return {EdgeLaw::kBernoulli, std::nullopt}; }
  static DistributionSpec normal(double sigma2) { return {EdgeLaw::kNormal, sigma2}; }
  static DistributionSpec signed_edges() { return {EdgeLaw::kSigned, std::nullopt}; }
  static DistributionSpec poisson() { return {EdgeLaw::kPoisson, std::nullopt}; }

  // Throws DomainError when sigma2 is missing, non-positive, or set on a
  // law that takes no parameter.
  void check() const;
};

std::string to_string(EdgeLaw law);
// Accepts "bernoulli", "normal", "signed", "poisson" (case-insensitive).
EdgeLaw parse_edge_law(std::string_view name);

// Throws DomainError naming the first entry outside the law's support.
void check_support(const Matrix& omega, const DistributionSpec& dist);

// Draws A with independent entries and E[A] = omega. Entry (i, j) uses its
// own generator keyed by (seed, i, j), so the result does not depend on
// traversal order.
Matrix sample_adjacency(const Matrix& omega, const DistributionSpec& dist, std::uint64_t seed);

struct Moments {
  double variance = 0.0;
  double gamma_contribution = 0.0;  // variance / scale
};

// Exact variance of one entry with mean omega_entry, and that variance
// divided by `scale` (rho under BiDFM, theta_r(i) * theta_c(j) under BiDCDFM).
Moments distribution_moments(const DistributionSpec& dist, double omega_entry, double scale);

}  // namespace bidfm
