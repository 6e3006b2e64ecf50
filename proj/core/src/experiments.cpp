#include "bidfm/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bidfm/errors.hpp"
#include "bidfm/io.hpp"
#include "bidfm/linalg.hpp"
#include "bidfm/metrics.hpp"
#include "bidfm/model.hpp"
#include "bidfm/rng.hpp"

namespace bidfm {

namespace {

using Eigen::Index;

std::string lower(std::string_view s) {
  std::string out;
  for (char ch : s) {
    if (ch == '-' || ch == '_') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return out;
}

std::vector<double> grid(int first, int last, int step, double scale) {
  std::vector<double> out;
  for (int v = first; v <= last; v += step) out.push_back(v / scale);
  return out;
}

// Parameters at one swept value.
struct Point {
  int n_r, n_c;
  double rho;
  DistributionSpec dist;
};

Point resolve(const SimulationConfig& c, double value) {
  Point p{c.n_r, c.n_c, c.rho, c.dist};
  switch (c.sweep) {
    case SweepKind::kRho: p.rho = value; break;
    case SweepKind::kN: p.n_r = p.n_c = static_cast<int>(value); break;
    case SweepKind::kSigma2: p.dist.sigma2 = value; break;
  }
  return p;
}

struct Instance {
  Matrix omega;
  Membership row, col;
};

Instance build_instance(const SimulationConfig& c, std::size_t index) {
  const Point pt = resolve(c, c.values[index]);
  const std::uint64_t s = derive_seed(c.base_seed, index);
  Instance inst;
  inst.row = sample_memberships(pt.n_r, c.k_r, derive_seed(s, 1));
  inst.col = sample_memberships(pt.n_c, c.k_c, derive_seed(s, 2));
  if (c.model == ModelKind::kBiDFM) {
    inst.omega = expected_adjacency(BiDFMParams{inst.row, inst.col, c.p, pt.rho});
  } else {
    BiDCDFMParams params{inst.row, inst.col, c.p, sample_theta(pt.n_r, pt.rho, derive_seed(s, 3), c.theta_floor),
                         sample_theta(pt.n_c, pt.rho, derive_seed(s, 4), c.theta_floor)};
    inst.omega = expected_adjacency(params);
  }
  check_support(inst.omega, pt.dist);
  return inst;
}

double mean_of(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double standard_error(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::string sweep_column(SweepKind kind) {
  switch (kind) {
    case SweepKind::kRho: return "rho";
    case SweepKind::kN: return "n";
    case SweepKind::kSigma2: return "sigma2_A";
  }
  return "value";
}

}  // namespace

std::string to_string(ModelKind kind) { return kind == ModelKind::kBiDFM ? "BiDFM" : "BiDCDFM"; }

std::string to_string(SweepKind kind) { return sweep_column(kind); }

ModelKind parse_model_kind(std::string_view name) {
  const std::string s = lower(name);
  if (s == "bidfm") return ModelKind::kBiDFM;
  if (s == "bidcdfm") return ModelKind::kBiDCDFM;
  throw ParseError("unknown model '" + std::string(name) + "'");
}

SweepKind parse_sweep_kind(std::string_view name) {
  const std::string s = lower(name);
  if (s == "rho") return SweepKind::kRho;
  if (s == "n") return SweepKind::kN;
  if (s == "sigma2a" || s == "sigma2") return SweepKind::kSigma2;
  throw ParseError("unknown sweep parameter '" + std::string(name) + "'");
}

void SimulationConfig::check() const {
  std::vector<std::string> problems;
  if (replicates < 1) problems.push_back("replicates must be at least 1");
  if (values.empty()) problems.push_back("the sweep has no values");
  if (algorithms.empty()) problems.push_back("no algorithms selected");
  if (k_r < 1 || k_c < 1) problems.push_back("K_r and K_c must be positive");
  if (p.rows() != k_r || p.cols() != k_c) problems.push_back("P must be K_r x K_c");
  if (!(theta_floor >= 0.0 && theta_floor < 1.0)) problems.push_back("theta_floor must lie in [0, 1)");
  if (sweep != SweepKind::kN && (n_r < std::max(1, k_r) || n_c < std::max(1, k_c)))
    problems.push_back("n_r and n_c must be at least K_r and K_c");
  if (sweep == SweepKind::kSigma2 && dist.kind != EdgeLaw::kNormal)
    problems.push_back("a sigma2_A sweep needs normal edges");
  if (problems.empty()) {
    for (double v : values) {
      const Point pt = resolve(*this, v);
      try {
        if (sweep == SweepKind::kN && (v != std::floor(v) || v < std::max(k_r, k_c)))
          throw DimensionError("n = " + format_double(v) + " is not an integer >= max(K_r, K_c)");
        if (!(pt.rho > 0.0) || !std::isfinite(pt.rho)) throw DomainError("rho must be positive and finite");
        pt.dist.check();
        // theta never exceeds sqrt(rho), so rho * P bounds every entry of Omega.
        check_support(pt.rho * p, pt.dist);
      } catch (const Error& e) {
        problems.push_back("at " + sweep_column(sweep) + " = " + format_double(v) + ": " + e.what());
      }
    }
    if (p.rows() == k_r && p.cols() == k_c) {
      if (std::fabs(p.cwiseAbs().maxCoeff() - 1.0) > kMaxEntryTolerance) problems.push_back("max |P| must be 1");
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

const CurvePoint& ExperimentReport::point(Algorithm alg, double value) const {
  for (const auto& p : points)
    if (p.algorithm == alg && p.value == value) return p;
  throw std::out_of_range("no curve point for " + to_string(alg) + " at " + format_double(value));
}

ExperimentReport run_simulation(const SimulationConfig& config) {
  config.check();
  const std::size_t n_values = config.values.size();
  const std::size_t n_reps = static_cast<std::size_t>(config.replicates);
  const std::size_t n_algs = config.algorithms.size();

  std::vector<Instance> instances(n_values);
  parallel_for(n_values, config.threads, [&](std::size_t v) { instances[v] = build_instance(config, v); });

  // records indexed [alg][value][rep]
  std::vector<ReplicateRecord> records(n_algs * n_values * n_reps);
  auto slot = [&](std::size_t a, std::size_t v, std::size_t r) -> ReplicateRecord& {
    return records[(a * n_values + v) * n_reps + r];
  };

  parallel_for(n_values * n_reps, config.threads, [&](std::size_t task) {
    const std::size_t v = task / n_reps;
    const std::size_t r = task % n_reps;
    const Instance& inst = instances[v];
    const std::uint64_t seed = config.base_seed + r;
    const Point pt = resolve(config, config.values[v]);
    const Matrix a = config.population ? inst.omega : sample_adjacency(inst.omega, pt.dist, seed);
    for (std::size_t k = 0; k < n_algs; ++k) {
      ReplicateRecord& rec = slot(k, v, r);
      rec.algorithm = config.algorithms[k];
      rec.value = config.values[v];
      rec.replicate = static_cast<int>(r);
      rec.seed = seed;
      try {
        const DetectionResult res = run_algorithm(rec.algorithm, a, config.k_r, config.k_c, seed, config.detect);
        const MetricsReport m = combined_report(res.row_labels, inst.row, res.col_labels, inst.col);
        rec.ok = true;
        rec.error_rate = m.error_rate;
        rec.nmi = m.nmi;
        rec.ari = m.ari;
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.failure = e.what();
      }
    }
  });

  ExperimentReport report;
  report.name = config.name;
  report.sweep = config.sweep;
  for (std::size_t k = 0; k < n_algs; ++k) {
    for (std::size_t v = 0; v < n_values; ++v) {
      CurvePoint cp;
      cp.algorithm = config.algorithms[k];
      cp.value = config.values[v];
      cp.first_seed = config.base_seed;
      cp.last_seed = config.base_seed + n_reps - 1;
      std::vector<double> err, nmi_v, ari_v;
      for (std::size_t r = 0; r < n_reps; ++r) {
        const ReplicateRecord& rec = slot(k, v, r);
        if (!rec.ok) {
          ++cp.failures;
          continue;
        }
        err.push_back(rec.error_rate);
        nmi_v.push_back(rec.nmi);
        ari_v.push_back(rec.ari);
      }
      cp.replicates = static_cast<int>(err.size());
      cp.mean_error = mean_of(err);
      cp.se_error = standard_error(err, cp.mean_error);
      cp.mean_nmi = mean_of(nmi_v);
      cp.se_nmi = standard_error(nmi_v, cp.mean_nmi);
      cp.mean_ari = mean_of(ari_v);
      cp.se_ari = standard_error(ari_v, cp.mean_ari);
      report.points.push_back(cp);
    }
  }
  report.records = std::move(records);
  return report;
}

SimulationConfig preset(std::string_view name) {
  SimulationConfig c;
  c.name = std::string(name);
  c.algorithms = all_algorithms();
  c.replicates = 50;
  const std::string s = lower(name);
  const auto rho10 = grid(1, 10, 1, 10.0);
  const auto rho20 = grid(1, 20, 1, 10.0);
  const auto sigma_grid = grid(1, 10, 1, 5.0);
  const auto small_n = grid(50, 500, 50, 1.0);
  const auto large_n = grid(500, 3000, 500, 1.0);

  auto setup = [&](ModelKind model, DistributionSpec dist, Matrix p, int n_r, int n_c, double rho, SweepKind sweep,
                   std::vector<double> values) {
    c.model = model;
    c.dist = dist;
    c.p = std::move(p);
    c.n_r = n_r;
    c.n_c = n_c;
    c.rho = rho;
    c.sweep = sweep;
    c.values = std::move(values);
  };
  const auto B = DistributionSpec::bernoulli();
  const auto N1 = DistributionSpec::normal(1.0);
  const auto S = DistributionSpec::signed_edges();
  const auto M = ModelKind::kBiDFM;
  const auto D = ModelKind::kBiDCDFM;

  if (s == "sim1a") setup(M, B, mixing_p1(), 200, 300, 0.5, SweepKind::kRho, rho10);
  else if (s == "sim1b") setup(D, B, mixing_p1(), 600, 900, 0.5, SweepKind::kRho, rho10);
  else if (s == "sim1c") setup(M, B, mixing_p1(), 50, 50, 0.5, SweepKind::kN, small_n);
  else if (s == "sim1d") setup(D, B, mixing_p1(), 500, 500, 0.5, SweepKind::kN, large_n);
  else if (s == "sim2a") setup(M, N1, mixing_p2(), 200, 300, 0.5, SweepKind::kRho, rho20);
  else if (s == "sim2b") setup(D, N1, mixing_p2(), 600, 900, 0.5, SweepKind::kRho, rho20);
  else if (s == "sim2c") setup(M, N1, mixing_p2(), 200, 300, 0.5, SweepKind::kSigma2, sigma_grid);
  else if (s == "sim2d") setup(D, N1, mixing_p2(), 600, 900, 3.0, SweepKind::kSigma2, sigma_grid);
  else if (s == "sim2e") setup(M, N1, mixing_p2(), 50, 50, 0.5, SweepKind::kN, small_n);
  else if (s == "sim2f") setup(D, N1, mixing_p2(), 500, 500, 1.0, SweepKind::kN, large_n);
  else if (s == "sim3a") setup(M, S, mixing_p2(), 100, 150, 0.5, SweepKind::kRho, rho10);
  else if (s == "sim3b") setup(D, S, mixing_p2(), 1000, 1500, 0.5, SweepKind::kRho, rho10);
  else if (s == "sim3c") setup(M, S, mixing_p2(), 50, 50, 0.5, SweepKind::kN, small_n);
  else if (s == "sim3d") setup(D, S, mixing_p2(), 500, 500, 1.0, SweepKind::kN, grid(500, 3000, 250, 1.0));
  else throw ParseError("unknown preset '" + std::string(name) + "'");
  c.name = s;
  return c;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"sim1a", "sim1b", "sim1c", "sim1d", "sim2a",
                                                 "sim2b", "sim2c", "sim2d", "sim2e", "sim2f",
                                                 "sim3a", "sim3b", "sim3c", "sim3d"};
  return names;
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "# bidfm-report v1 name=" << report.name << "\n";
  out << "algorithm," << sweep_column(report.sweep)
      << ",replicates,failures,mean_error_rate,se_error_rate,mean_nmi,se_nmi,mean_ari,se_ari,first_seed,last_seed\n";
  for (const auto& p : report.points) {
    out << to_string(p.algorithm) << ',' << format_double(p.value) << ',' << p.replicates << ',' << p.failures << ','
        << format_double(p.mean_error) << ',' << format_double(p.se_error) << ',' << format_double(p.mean_nmi) << ','
        << format_double(p.se_nmi) << ',' << format_double(p.mean_ari) << ',' << format_double(p.se_ari) << ','
        << p.first_seed << ',' << p.last_seed << '\n';
  }
  return out.str();
}

std::string report_long_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "# bidfm-report-long v1 name=" << report.name << "\n";
  out << "algorithm,parameter,value,replicate,seed,status,metric,score\n";
  const std::string param = sweep_column(report.sweep);
  for (const auto& r : report.records) {
    const std::string prefix = to_string(r.algorithm) + ',' + param + ',' + format_double(r.value) + ',' +
                               std::to_string(r.replicate) + ',' + std::to_string(r.seed) + ',';
    if (!r.ok) {
      out << prefix << "failed,,\n";
      continue;
    }
    out << prefix << "ok,error_rate," << format_double(r.error_rate) << '\n';
    out << prefix << "ok,nmi," << format_double(r.nmi) << '\n';
    out << prefix << "ok,ari," << format_double(r.ari) << '\n';
  }
  return out.str();
}

EigengapResult estimate_k_eigengap(const Matrix& a, int m) {
  require_finite(a, "estimate_k_eigengap");
  if (m < 1 || m > std::min(a.rows(), a.cols())) {
    throw DimensionError("estimate_k_eigengap: m must lie in [1, min(n_r, n_c)]");
  }
  const SvdFactors f = truncated_svd(a, m);
  EigengapResult out;
  out.singular_values.assign(f.singular_values.data(), f.singular_values.data() + m);
  const double top = out.singular_values.front();
  if (!(top > 0.0)) return out;
  double best = -1.0;
  for (int k = 1; k < m; ++k) {
    const double next = out.singular_values[static_cast<std::size_t>(k)];
    if (next <= 1e-12 * top) {
      out.k = k;
      return out;
    }
    const double ratio = out.singular_values[static_cast<std::size_t>(k - 1)] / next;
    if (ratio > best) {
      best = ratio;
      out.k = k;
    }
  }
  return out;
}

DegreeProfiles degree_profiles(const Matrix& a) {
  const Matrix abs = a.cwiseAbs();
  return {abs.rowwise().sum(), abs.colwise().sum().transpose()};
}

FilterMode parse_filter_mode(std::string_view name) {
  const std::string s = lower(name);
  if (s == "rows") return FilterMode::kRows;
  if (s == "cols" || s == "columns") return FilterMode::kCols;
  if (s == "rows+cols" || s == "rowsandcols" || s == "rowscols") return FilterMode::kRowsAndCols;
  if (s == "bothand") return FilterMode::kBothAnd;
  if (s == "bothor") return FilterMode::kBothOr;
  throw ParseError("unknown filter mode '" + std::string(name) + "'");
}

std::string to_string(FilterMode mode) {
  switch (mode) {
    case FilterMode::kRows: return "rows";
    case FilterMode::kCols: return "cols";
    case FilterMode::kRowsAndCols: return "rows+cols";
    case FilterMode::kBothAnd: return "both-and";
    case FilterMode::kBothOr: return "both-or";
  }
  return "?";
}

FilterResult filter_zero_degree(const Matrix& a, FilterMode mode) {
  const bool square = a.rows() == a.cols();
  if ((mode == FilterMode::kBothAnd || mode == FilterMode::kBothOr) && !square) {
    throw DimensionError("filter_zero_degree: " + to_string(mode) + " needs a square matrix");
  }
  const DegreeProfiles deg = degree_profiles(a);
  FilterResult out;
  for (Index i = 0; i < a.rows(); ++i)
    if (deg.d_r(i) == 0.0) out.zero_out.push_back(static_cast<int>(i));
  for (Index j = 0; j < a.cols(); ++j)
    if (deg.d_c(j) == 0.0) out.zero_in.push_back(static_cast<int>(j));
  if (square) {
    std::set_intersection(out.zero_out.begin(), out.zero_out.end(), out.zero_in.begin(), out.zero_in.end(),
                          std::back_inserter(out.zero_both));
    std::set_union(out.zero_out.begin(), out.zero_out.end(), out.zero_in.begin(), out.zero_in.end(),
                   std::back_inserter(out.zero_either));
  }

  auto complement = [](Index n, const std::vector<int>& removed) {
    std::vector<int> kept;
    std::size_t r = 0;
    for (int i = 0; i < static_cast<int>(n); ++i) {
      if (r < removed.size() && removed[r] == i) {
        ++r;
        continue;
      }
      kept.push_back(i);
    }
    return kept;
  };
  const std::vector<int> none;
  switch (mode) {
    case FilterMode::kRows:
      out.kept_rows = complement(a.rows(), out.zero_out);
      out.kept_cols = complement(a.cols(), none);
      break;
    case FilterMode::kCols:
      out.kept_rows = complement(a.rows(), none);
      out.kept_cols = complement(a.cols(), out.zero_in);
      break;
    case FilterMode::kRowsAndCols:
      out.kept_rows = complement(a.rows(), out.zero_out);
      out.kept_cols = complement(a.cols(), out.zero_in);
      break;
    case FilterMode::kBothAnd:
      out.kept_rows = out.kept_cols = complement(a.rows(), out.zero_both);
      break;
    case FilterMode::kBothOr:
      out.kept_rows = out.kept_cols = complement(a.rows(), out.zero_either);
      break;
  }
  out.matrix = a(out.kept_rows, out.kept_cols);
  return out;
}

PartitionSimilarity row_column_similarity(const Membership& row_labels, const Membership& col_labels) {
  if (row_labels.size() != col_labels.size()) {
    throw DimensionError("row_column_similarity: row and column partitions cover different node counts");
  }
  if (row_labels.k() != col_labels.k()) {
    throw DimensionError("row_column_similarity: row and column partitions use different K");
  }
  return {hamming_error(row_labels, col_labels), nmi(row_labels, col_labels), ari(row_labels, col_labels)};
}

}  // namespace bidfm
