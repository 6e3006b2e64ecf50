#pragma once

#include <optional>

#include "bidfm/linalg.hpp"
#include "bidfm/model.hpp"
#include "bidfm/sampling.hpp"

namespace bidfm {

// Everything the deviation bounds and misclustering envelopes consume.
// tau is empty when the edge law has unbounded support. The theta fields
// only matter for the degree-corrected quantities; the separation fields
// may be left empty when K_r == K_c, in which case their closed-form
// values are substituted.
struct TheoryInputs {
  int n_r = 0, n_c = 0;
  int k_r = 0, k_c = 0;
  double sigma_kr_p = 0.0;  // smallest singular value of P
  double rho = 0.0;
  double gamma = 0.0;       // gamma (BiDFM) or gamma_* (BiDCDFM)
  std::optional<double> tau;
  int n_r_min = 0, n_r_max = 0, n_c_min = 0, n_c_max = 0;
  double theta_r_min = 0, theta_r_max = 0, theta_c_min = 0, theta_c_max = 0;
  double theta_r_l1 = 0, theta_c_l1 = 0;
  std::optional<double> delta_c;       // min distance between rows of X_c
  std::optional<double> delta_c_star;  // min distance between rows of V_c
  std::optional<double> m_vc;          // min row norm of V_c
};

// Throws DimensionError when extrema are out of order or a required
// positive quantity is not positive.
void check_inputs(const TheoryInputs& in);

struct GammaTau {
  double gamma = 0.0;         // exact max Var / scale over all entries
  double gamma_bound = 0.0;   // closed-form upper bound (1, sigma2/rho, 1/rho, ...)
  std::optional<double> tau;  // empty when unbounded
};

GammaTau gamma_tau(const DistributionSpec& dist, const BiDFMParams& params);
GammaTau gamma_tau(const DistributionSpec& dist, const BiDCDFMParams& params);

// Fills every TheoryInputs field from model parameters. Separation
// quantities come from the population singular vectors.
TheoryInputs theory_inputs(const DistributionSpec& dist, const BiDFMParams& params);
TheoryInputs theory_inputs(const DistributionSpec& dist, const BiDCDFMParams& params);

// max |A - Omega| over the observed sample; a heuristic stand-in for tau
// under unbounded laws.
double empirical_tau(const Matrix& a, const Matrix& omega);

struct AssumptionCheck {
  bool holds = false;
  bool indeterminate = false;  // tau unbounded
  double ratio = 0.0;          // left side / right side
};

// gamma * rho >= tau^2 log(n_r + n_c) / max(n_r, n_c)
AssumptionCheck check_assumption1(const TheoryInputs& in);
// gamma_* max(theta_r,max ||theta_c||_1, theta_c,max ||theta_r||_1) >= tau^2 log(n_r + n_c)
AssumptionCheck check_assumption2(const TheoryInputs& in);

// C_alpha * sqrt(gamma rho max(n_r, n_c) log(n_r + n_c))
double deviation_bound_bidfm(const TheoryInputs& in, double c_alpha = 1.0);
// C_alpha * sqrt(gamma_* max(theta_r,max ||theta_c||_1, theta_c,max ||theta_r||_1) log(n_r + n_c))
double deviation_bound_bidcdfm(const TheoryInputs& in, double c_alpha = 1.0);

// Order-of-magnitude envelopes for the per-side clustering criterion; the
// big-O constant is the caller's `c`.
struct Envelope {
  double f_r = 0.0;
  double f_c = 0.0;
};
Envelope error_envelope_bidfm(const TheoryInputs& in, double c = 1.0);
Envelope error_envelope_bidcdfm(const TheoryInputs& in, double c = 1.0);

struct GeometryReport {
  int rank = 0;
  bool columns_checked = false;        // between-centroid distances for the larger side
  double within_row_deviation = 0.0;   // max distance between embedding rows of one cluster
  double within_col_deviation = 0.0;
  double between_row_deviation = 0.0;  // max |distance - predicted|
  double between_col_deviation = 0.0;
  double max_deviation() const;
};

// Checks the population embedding: rows of one cluster coincide, and
// centroids are (1/n_k + 1/n_l)^{1/2} apart (BiDFM, unnormalized) or
// sqrt(2) apart (BiDCDFM, normalized). Column distances are checked only
// when K_r == K_c. Throws ValidationError on invalid parameters and
// DimensionError when Omega is rank deficient.
GeometryReport population_geometry_check(const BiDFMParams& params);
GeometryReport population_geometry_check(const BiDCDFMParams& params);

// Compact SVD of Omega assembled analytically from the small matrix
// D_r P D_c and the column-normalized Theta Z blocks.
SvdFactors population_svd_oracle(const BiDCDFMParams& params);

}  // namespace bidfm
