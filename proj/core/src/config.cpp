#include "bidfm/config.hpp"

#include <cmath>

#include "json.hpp"

#include "bidfm/errors.hpp"
#include "bidfm/rng.hpp"

namespace bidfm {

using json = nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("key '") + key + "' has the wrong type");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) && !j.at(key).is_null() ? get<T>(j, key) : fallback;
}

Matrix mixing_from(const json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "P1" || name == "p1") return mixing_p1();
    if (name == "P2" || name == "p2") return mixing_p2();
    throw ParseError("unknown mixing matrix '" + name + "'");
  }
  if (!j.is_array() || j.empty()) throw ParseError("P must be \"P1\", \"P2\" or a non-empty nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw ParseError("P rows must be non-empty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix p(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ParseError("P rows differ in length");
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[static_cast<std::size_t>(c)].is_number()) throw ParseError("P entries must be numbers");
      p(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return p;
}

DistributionSpec distribution_from(const json& j) {
  if (j.is_string()) {
    DistributionSpec d{parse_edge_law(j.get<std::string>()), std::nullopt};
    if (d.kind == EdgeLaw::kNormal) throw ParseError("normal edges need {\"kind\": \"normal\", \"sigma2_A\": ...}");
    return d;
  }
  if (!j.is_object()) throw ParseError("distribution must be an object");
  DistributionSpec d;
  try {
    d.kind = parse_edge_law(get<std::string>(j, "kind"));
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  if (j.contains("sigma2_A")) d.sigma2 = get<double>(j, "sigma2_A");
  d.check();
  return d;
}

Vector vector_from(const json& j, const char* key) {
  const auto v = get<std::vector<double>>(j, key);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mixing_to(const Matrix& p) {
  json out = json::array();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < p.cols(); ++j) row.push_back(p(i, j));
    out.push_back(row);
  }
  return out;
}

json distribution_to(const DistributionSpec& d) {
  json out = {{"kind", to_string(d.kind)}};
  if (d.sigma2) out["sigma2_A"] = *d.sigma2;
  return out;
}

Membership labels_or_sample(const json& j, const char* key, int n, int k, std::uint64_t seed) {
  if (!j.contains(key)) return sample_memberships(n, k, seed);
  const auto labels = get<std::vector<int>>(j, key);
  if (static_cast<int>(labels.size()) != n) throw ParseError(std::string(key) + " must have one label per node");
  try {
    return Membership::from_one_based(labels, k);
  } catch (const Error& e) {
    throw ParseError(std::string(key) + ": " + e.what());
  }
}

}  // namespace

Matrix ModelSpec::omega() const {
  return kind == ModelKind::kBiDFM ? expected_adjacency(bidfm) : expected_adjacency(bidcdfm);
}

Matrix parse_mixing(std::string_view json_text) { return mixing_from(parse_json(json_text)); }

DistributionSpec parse_distribution(std::string_view json_text) { return distribution_from(parse_json(json_text)); }

ModelSpec parse_model_spec(std::string_view json_text, std::uint64_t fallback_seed) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw ParseError("model config must be a JSON object");
  if (j.contains("format") && get<std::string>(j, "format") != "bidfm-model v1")
    throw ParseError("unsupported format '" + get<std::string>(j, "format") + "'");

  ModelSpec spec;
  spec.kind = parse_model_kind(get_or<std::string>(j, "model", "bidfm"));
  const int n_r = get<int>(j, "n_r");
  const int n_c = get<int>(j, "n_c");
  const int k_r = get<int>(j, "k_r");
  const int k_c = get<int>(j, "k_c");
  if (n_r < 1 || n_c < 1 || k_r < 1 || k_c < 1) throw ParseError("n_r, n_c, k_r and k_c must be positive");
  const Matrix p = j.contains("P") ? mixing_from(j.at("P")) : throw ParseError("missing key 'P'");
  const double rho = get_or<double>(j, "rho", 1.0);
  spec.dist = j.contains("distribution") ? distribution_from(j.at("distribution")) : DistributionSpec::bernoulli();

  const auto membership_seed = get_or<std::uint64_t>(j, "membership_seed", derive_seed(fallback_seed, 1));
  spec.sample_seed = get_or<std::uint64_t>(j, "sample_seed", derive_seed(fallback_seed, 2));
  const Membership row = labels_or_sample(j, "row_labels", n_r, k_r, derive_seed(membership_seed, 1));
  const Membership col = labels_or_sample(j, "col_labels", n_c, k_c, derive_seed(membership_seed, 2));

  if (spec.kind == ModelKind::kBiDFM) {
    spec.bidfm = BiDFMParams{row, col, p, rho};
    if (auto v = validate(spec.bidfm); !v.empty()) throw ValidationError(std::move(v));
    spec.bidcdfm = as_degree_corrected(spec.bidfm);
  } else {
    Vector theta_r, theta_c;
    if (j.contains("theta_r") || j.contains("theta_c")) {
      theta_r = vector_from(j, "theta_r");
      theta_c = vector_from(j, "theta_c");
    } else {
      const json t = j.value("theta", json::object());
      const double floor = get_or<double>(t, "floor", kDefaultThetaFloor);
      const auto seed = get_or<std::uint64_t>(t, "seed", derive_seed(fallback_seed, 3));
      theta_r = sample_theta(n_r, rho, derive_seed(seed, 1), floor);
      theta_c = sample_theta(n_c, rho, derive_seed(seed, 2), floor);
    }
    spec.bidcdfm = BiDCDFMParams{row, col, p, theta_r, theta_c};
    if (auto v = validate(spec.bidcdfm); !v.empty()) throw ValidationError(std::move(v));
  }
  check_support(spec.omega(), spec.dist);
  return spec;
}

std::string model_spec_to_json(const ModelSpec& spec) {
  const BiDCDFMParams& dc = spec.bidcdfm;
  json out;
  out["format"] = "bidfm-model v1";
  out["model"] = spec.kind == ModelKind::kBiDFM ? "bidfm" : "bidcdfm";
  out["n_r"] = dc.row.size();
  out["n_c"] = dc.col.size();
  out["k_r"] = dc.row.k();
  out["k_c"] = dc.col.k();
  out["P"] = mixing_to(dc.p);
  if (spec.kind == ModelKind::kBiDFM) {
    out["rho"] = spec.bidfm.rho;
  } else {
    out["theta_r"] = std::vector<double>(dc.theta_r.data(), dc.theta_r.data() + dc.theta_r.size());
    out["theta_c"] = std::vector<double>(dc.theta_c.data(), dc.theta_c.data() + dc.theta_c.size());
  }
  out["row_labels"] = dc.row.one_based();
  out["col_labels"] = dc.col.one_based();
  out["distribution"] = distribution_to(spec.dist);
  out["sample_seed"] = spec.sample_seed;
  return out.dump(2) + "\n";
}

SimulationConfig parse_simulation_config(std::string_view json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw ParseError("simulation config must be a JSON object");
  SimulationConfig c;
  if (j.contains("preset")) {
    c = preset(get<std::string>(j, "preset"));
  } else {
    c.algorithms = all_algorithms();
    c.p = mixing_p1();
  }
  if (j.contains("name")) c.name = get<std::string>(j, "name");
  if (j.contains("model")) c.model = parse_model_kind(get<std::string>(j, "model"));
  if (j.contains("n_r")) c.n_r = get<int>(j, "n_r");
  if (j.contains("n_c")) c.n_c = get<int>(j, "n_c");
  if (j.contains("k_r")) c.k_r = get<int>(j, "k_r");
  if (j.contains("k_c")) c.k_c = get<int>(j, "k_c");
  if (j.contains("P")) c.p = mixing_from(j.at("P"));
  if (j.contains("rho")) c.rho = get<double>(j, "rho");
  if (j.contains("distribution")) c.dist = distribution_from(j.at("distribution"));
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    c.sweep = parse_sweep_kind(get<std::string>(s, "parameter"));
    c.values = get<std::vector<double>>(s, "values");
  }
  if (j.contains("replicates")) c.replicates = get<int>(j, "replicates");
  if (j.contains("algorithms")) {
    c.algorithms.clear();
    for (const auto& name : get<std::vector<std::string>>(j, "algorithms")) c.algorithms.push_back(parse_algorithm(name));
  }
  if (j.contains("base_seed")) c.base_seed = get<std::uint64_t>(j, "base_seed");
  if (j.contains("population")) c.population = get<bool>(j, "population");
  if (j.contains("theta_floor")) c.theta_floor = get<double>(j, "theta_floor");
  if (j.contains("threads")) c.threads = get<int>(j, "threads");
  if (j.contains("kmeans_restarts")) c.detect.kmeans_restarts = get<int>(j, "kmeans_restarts");
  c.check();
  return c;
}

TheoryInputs parse_theory_inputs(std::string_view json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw ParseError("theory inputs must be a JSON object");
  TheoryInputs in;
  in.n_r = get<int>(j, "n_r");
  in.n_c = get<int>(j, "n_c");
  in.k_r = get<int>(j, "k_r");
  in.k_c = get<int>(j, "k_c");
  in.sigma_kr_p = get<double>(j, "sigma_kr_p");
  in.rho = get_or<double>(j, "rho", 0.0);
  in.gamma = get<double>(j, "gamma");
  if (j.contains("tau") && !j.at("tau").is_null()) in.tau = get<double>(j, "tau");
  in.n_r_min = get<int>(j, "n_r_min");
  in.n_r_max = get<int>(j, "n_r_max");
  in.n_c_min = get<int>(j, "n_c_min");
  in.n_c_max = get<int>(j, "n_c_max");
  in.theta_r_min = get_or<double>(j, "theta_r_min", 0.0);
  in.theta_r_max = get_or<double>(j, "theta_r_max", 0.0);
  in.theta_c_min = get_or<double>(j, "theta_c_min", 0.0);
  in.theta_c_max = get_or<double>(j, "theta_c_max", 0.0);
  in.theta_r_l1 = get_or<double>(j, "theta_r_l1", 0.0);
  in.theta_c_l1 = get_or<double>(j, "theta_c_l1", 0.0);
  if (j.contains("delta_c") && !j.at("delta_c").is_null()) in.delta_c = get<double>(j, "delta_c");
  if (j.contains("delta_c_star") && !j.at("delta_c_star").is_null()) in.delta_c_star = get<double>(j, "delta_c_star");
  if (j.contains("m_vc") && !j.at("m_vc").is_null()) in.m_vc = get<double>(j, "m_vc");
  check_inputs(in);
  return in;
}

}  // namespace bidfm
