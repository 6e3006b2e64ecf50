#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "bidfm/experiments.hpp"
#include "bidfm/model.hpp"
#include "bidfm/sampling.hpp"
#include "bidfm/theory.hpp"

namespace bidfm {

// A fully resolved generative model read from a JSON config:
//
//   {
//     "format": "bidfm-model v1",
//     "model": "bidfm" | "bidcdfm",
//     "n_r": 200, "n_c": 300, "k_r": 2, "k_c": 3,
//     "P": "P1" | "P2" | [[row], ...],
//     "rho": 0.5,
//     "row_labels": [...], "col_labels": [...],      optional, one-based
//     "membership_seed": 11,                         used when labels are absent
//     "theta": {"floor": 0.05, "seed": 12},          bidcdfm, generated theta
//     "theta_r": [...], "theta_c": [...],            bidcdfm, explicit theta
//     "distribution": {"kind": "normal", "sigma2_A": 1.0},
//     "sample_seed": 13
//   }
//
// Missing seeds are derived from `fallback_seed`.
struct ModelSpec {
  ModelKind kind = ModelKind::kBiDFM;
  BiDFMParams bidfm;      // valid when kind == kBiDFM
  BiDCDFMParams bidcdfm;  // always filled (theta = sqrt(rho) for BiDFM)
  DistributionSpec dist;
  std::uint64_t sample_seed = 0;

  Matrix omega() const;
  const Membership& row_truth() const { return bidcdfm.row; }
  const Membership& col_truth() const { return bidcdfm.col; }
};

// Throws ParseError on malformed JSON or missing keys and ValidationError
// when the parameters break model invariants.
ModelSpec parse_model_spec(std::string_view json_text, std::uint64_t fallback_seed = 0);
std::string model_spec_to_json(const ModelSpec& spec);

// Mixing matrix from "P1", "P2" or a nested array.
Matrix parse_mixing(std::string_view json_text);

DistributionSpec parse_distribution(std::string_view json_text);

// Simulation config. A "preset" key seeds every field from that preset and
// the remaining keys override it:
//
//   {
//     "preset": "sim1a",
//     "model": "bidfm", "n_r": 200, "n_c": 300, "k_r": 2, "k_c": 3,
//     "P": "P1", "rho": 0.5,
//     "distribution": {"kind": "bernoulli"},
//     "sweep": {"parameter": "rho" | "n" | "sigma2_A", "values": [...]},
//     "replicates": 50, "algorithms": ["bisc", "nbisc"],
//     "base_seed": 7, "population": false, "theta_floor": 0.05,
//     "threads": 0, "kmeans_restarts": 10
//   }
SimulationConfig parse_simulation_config(std::string_view json_text);

// Direct theory inputs, keyed by the TheoryInputs field names.
TheoryInputs parse_theory_inputs(std::string_view json_text);

}  // namespace bidfm
