#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bidfm/matrix.hpp"
#include "bidfm/membership.hpp"

namespace bidfm {

// Bipartite distribution-free model: E[A] = rho * Z_r P Z_c^T.
struct BiDFMParams {
  Membership row;   // n_r nodes in K_r clusters
  Membership col;   // n_c nodes in K_c clusters
  Matrix p;         // K_r x K_c mixing matrix, max |P| = 1, full rank
  double rho = 1.0; // sparsity
};

// Degree-corrected variant: E[A] = Theta_r Z_r P Z_c^T Theta_c.
struct BiDCDFMParams {
  Membership row;
  Membership col;
  Matrix p;
  Vector theta_r;  // n_r positive node weights
  Vector theta_c;  // n_c positive node weights
};

inline constexpr double kMaxEntryTolerance = 1e-12;
inline constexpr double kRankTolerance = 1e-10;
inline constexpr double kDefaultThetaFloor = 0.05;

// The two mixing matrices used throughout the simulation studies.
// P1 is entrywise non-negative; P2 has negative entries.
Matrix mixing_p1();
Matrix mixing_p2();

// Returns every violated invariant; an empty list means the parameters are valid.
std::vector<std::string> validate(const BiDFMParams& params);
std::vector<std::string> validate(const BiDCDFMParams& params);

// Expected adjacency matrix. Throws ValidationError on invalid parameters.
Matrix expected_adjacency(const BiDFMParams& params);
Matrix expected_adjacency(const BiDCDFMParams& params);

// The degree-corrected parameters with theta_r = theta_c = sqrt(rho), which
// describe the same expected adjacency matrix.
BiDCDFMParams as_degree_corrected(const BiDFMParams& params);

// n labels drawn uniformly over k clusters, redrawn until every cluster is
// occupied. Throws DimensionError when n < k.
Membership sample_memberships(int n, int k, std::uint64_t seed);

// theta(i) = sqrt(rho) * u_i with u_i uniform on (floor, 1).
Vector sample_theta(int n, double rho, std::uint64_t seed, double floor = kDefaultThetaFloor);

// Smallest singular value of p (the min(K_r, K_c)-th one).
double smallest_singular_value(const Matrix& p);

}  // namespace bidfm
