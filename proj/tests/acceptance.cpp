// Prints one PASS/FAIL/SKIP line per acceptance criterion. A FAIL marked
// "known" is a requirement the method cannot meet; the exit status is
// non-zero only for failures that are not known.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "support/oracles.hpp"

#include "bidfm/bidfm.hpp"

using namespace bidfm;

namespace {

struct Outcome {
  enum Status { kPass, kFail, kSkip } status;
  std::string detail;
  std::string known;  // non-empty: an understood, unattainable requirement
};

Outcome pass_if(bool ok, std::string detail) { return {ok ? Outcome::kPass : Outcome::kFail, std::move(detail)}; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vector random_theta(std::mt19937_64& gen, int n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Vector t(n);
  for (Eigen::Index i = 0; i < n; ++i) t(i) = u(gen);
  return t;
}

Matrix random_mixing(std::mt19937_64& gen, int k_r, int k_c) {
  for (;;) {
    Matrix p = oracle::random_matrix(gen, k_r, k_c);
    p /= p.cwiseAbs().maxCoeff();
    if (oracle::jacobi_singular_values(p)[static_cast<std::size_t>(std::min(k_r, k_c) - 1)] > 0.05) return p;
  }
}

// 1. Population exact recovery. BiSC on degree-corrected populations is
// reported separately: those embedding rows lie on rays, not points.
Outcome population_recovery() {
  std::mt19937_64 gen(20240101);
  std::uniform_int_distribution<int> side(30, 120);
  int failures[2][2] = {{0, 0}, {0, 0}};  // [degree corrected][nbisc]
  for (int t = 0; t < 100; ++t) {
    const int n_r = side(gen), n_c = side(gen);
    const Matrix p = t % 2 ? mixing_p2() : mixing_p1();
    const Membership row = oracle::random_full_partition(gen, n_r, 2);
    const Membership col = oracle::random_full_partition(gen, n_c, 3);
    const bool dc = (t / 2) % 2;
    const Matrix omega = dc ? expected_adjacency(BiDCDFMParams{row, col, p, random_theta(gen, n_r),
                                                               random_theta(gen, n_c)})
                            : expected_adjacency(BiDFMParams{row, col, p, 0.5});
    const std::uint64_t seed = gen();
    const DetectionResult results[2] = {bisc(omega, 2, 3, seed), nbisc(omega, 2, 3, seed)};
    for (int alg = 0; alg < 2; ++alg) {
      failures[dc][alg] += misassigned_nodes(results[alg].row_labels, row) != 0 ||
                           misassigned_nodes(results[alg].col_labels, col) != 0;
    }
  }
  const int total = failures[0][0] + failures[0][1] + failures[1][0] + failures[1][1];
  Outcome o = pass_if(total == 0, fmt("non-exact recoveries out of 50 each: BiSC/BiDFM %d, nBiSC/BiDFM %d, "
                                 "nBiSC/BiDCDFM %d, BiSC/BiDCDFM %d",
                                 failures[0][0], failures[0][1], failures[1][1], failures[1][0]));
  if (total > 0 && total == failures[1][0]) {
    o.known = "only unnormalized BiSC on degree-corrected populations misses, where exact recovery is not expected";
  }
  return o;
}

SimulationConfig restricted(const char* name, std::vector<Algorithm> algs, std::vector<double> values) {
  SimulationConfig c = preset(name);
  c.algorithms = std::move(algs);
  if (!values.empty()) c.values = std::move(values);
  c.base_seed = 1;
  return c;
}

// 2. sim1a trend.
Outcome sim1a_trend() {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentReport r = run_simulation(restricted("sim1a", {Algorithm::kBiSC}, {}));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const CurvePoint& lo = r.point(Algorithm::kBiSC, 0.1);
  const CurvePoint& mid = r.point(Algorithm::kBiSC, 0.5);
  const CurvePoint& hi = r.point(Algorithm::kBiSC, 1.0);
  auto above = [](const CurvePoint& a, const CurvePoint& b) {
    return a.mean_error > b.mean_error || b.mean_error - a.mean_error <= std::max(a.se_error, b.se_error);
  };
  const bool ok = hi.mean_error <= 0.05 && above(lo, mid) && above(mid, hi) && lo.mean_error > hi.mean_error &&
                  secs < 300.0;
  return pass_if(ok, fmt("error at rho 0.1/0.5/1 = %.4f/%.4f/%.4f (se %.4f/%.4f/%.4f), %.1f s", lo.mean_error,
                         mid.mean_error, hi.mean_error, lo.se_error, mid.se_error, hi.se_error, secs));
}

// 3. sim2c trend.
Outcome sim2c_trend() {
  const ExperimentReport r = run_simulation(restricted("sim2c", {Algorithm::kBiSC}, {0.2, 2.0}));
  const CurvePoint& lo = r.point(Algorithm::kBiSC, 0.2);
  const CurvePoint& hi = r.point(Algorithm::kBiSC, 2.0);
  const bool ok = hi.mean_error - lo.mean_error > hi.se_error + lo.se_error;
  return pass_if(ok, fmt("error at sigma2 0.2/2 = %.4f/%.4f (se %.4f/%.4f)", lo.mean_error, hi.mean_error,
                         lo.se_error, hi.se_error));
}

// 4. sim3d ordering at n = 500.
Outcome sim3d_ordering() {
  const ExperimentReport r =
      run_simulation(restricted("sim3d", {Algorithm::kNBiSC, Algorithm::kBiSC, Algorithm::kDSCORE}, {500.0}));
  const CurvePoint& n = r.point(Algorithm::kNBiSC, 500.0);
  const CurvePoint& b = r.point(Algorithm::kBiSC, 500.0);
  const CurvePoint& d = r.point(Algorithm::kDSCORE, 500.0);
  auto below = [](const CurvePoint& x, const CurvePoint& y) { return y.mean_error - x.mean_error > x.se_error + y.se_error; };
  const bool ok = below(n, b) && below(n, d) && below(b, d) && d.failures == 0;
  return pass_if(ok, fmt("nBiSC %.4f (se %.4f), BiSC %.4f (se %.4f), D-SCORE %.4f (se %.4f)", n.mean_error,
                         n.se_error, b.mean_error, b.se_error, d.mean_error, d.se_error));
}

// 5. Metrics against brute force.
Outcome metric_oracles() {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> nd(2, 15), kd(1, 5);
  int mismatches = 0;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = nd(gen);
    const int k_truth = std::min(kd(gen), n);
    const Membership truth = oracle::random_full_partition(gen, n, k_truth);
    const Membership est = oracle::random_partition(gen, n, kd(gen));
    mismatches += misassigned_nodes(est, truth) != oracle::brute_misassigned(est, truth);
    mismatches += hamming_error(est, truth) != static_cast<double>(oracle::brute_misassigned(est, truth)) / n;
    const double dn = std::fabs(nmi(est, truth) - oracle::direct_nmi(est, truth));
    const double da = std::fabs(ari(est, truth) - oracle::direct_ari(est, truth));
    const double df = std::fabs(criterion_f(est, truth) - oracle::brute_criterion_f(est, truth));
    worst = std::max({worst, dn, da, df});
  }
  return pass_if(mismatches == 0 && worst <= 1e-12,
                 fmt("200 pairs, %d integer mismatches, max real deviation %.2e", mismatches, worst));
}

// 6. Population geometry.
Outcome geometry() {
  std::mt19937_64 gen(6);
  std::uniform_int_distribution<int> side(10, 80), kd(2, 4);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int k = kd(gen);
    const int n_r = side(gen), n_c = side(gen);
    const Membership row = oracle::random_full_partition(gen, n_r, k);
    const Membership col = oracle::random_full_partition(gen, n_c, k);
    const Matrix p = random_mixing(gen, k, k);
    const GeometryReport g = t % 2 ? population_geometry_check(BiDFMParams{row, col, p, 0.6})
                                   : population_geometry_check(
                                         BiDCDFMParams{row, col, p, random_theta(gen, n_r), random_theta(gen, n_c)});
    worst = std::max(worst, g.max_deviation());
  }
  return pass_if(worst < 1e-9, fmt("50 instances, max deviation %.2e", worst));
}

// 7. Analytic SVD of the degree-corrected population.
Outcome svd_oracle() {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> side(20, 100), kd(1, 4);
  double worst = 0.0;
  for (int t = 0; t < 25; ++t) {
    const int k_r = kd(gen), k_c = kd(gen);
    const int n_r = side(gen), n_c = side(gen);
    const BiDCDFMParams dc{oracle::random_full_partition(gen, n_r, k_r), oracle::random_full_partition(gen, n_c, k_c),
                           random_mixing(gen, k_r, k_c), random_theta(gen, n_r), random_theta(gen, n_c)};
    const int k = std::min(k_r, k_c);
    const SvdFactors a = population_svd_oracle(dc);
    const SvdFactors b = truncated_svd(expected_adjacency(dc), k);
    worst = std::max(worst, (a.singular_values - b.singular_values).cwiseAbs().maxCoeff());
  }
  return pass_if(worst <= 1e-8, fmt("25 instances, max singular value deviation %.2e", worst));
}

// 8. Spectral deviation ratio does not grow with n.
Outcome spectral_deviation_ratio() {
  auto percentile99 = [](int n_r, int n_c, std::uint64_t seed) {
    const BiDFMParams q{sample_memberships(n_r, 2, seed), sample_memberships(n_c, 3, seed + 1), mixing_p1(), 0.5};
    const Matrix omega = expected_adjacency(q);
    const double gamma = gamma_tau(DistributionSpec::bernoulli(), q).gamma;
    const double scale =
        std::sqrt(gamma * q.rho * std::max(n_r, n_c) * std::log(static_cast<double>(n_r + n_c)));
    std::vector<double> ratios;
    for (int d = 0; d < 200; ++d) {
      const Matrix a = sample_adjacency(omega, DistributionSpec::bernoulli(), seed * 1000 + static_cast<std::uint64_t>(d));
      ratios.push_back(spectral_deviation(a, omega) / scale);
    }
    std::sort(ratios.begin(), ratios.end());
    return ratios[static_cast<std::size_t>(std::ceil(0.99 * ratios.size())) - 1];
  };
  const double small = percentile99(100, 150, 8);
  const double large = percentile99(200, 300, 9);
  return pass_if(large <= 1.2 * small, fmt("99th percentile %.4f at 100x150, %.4f at 200x300", small, large));
}

// 9. Political blogs, when supplied:
//   BIDFM_POLBLOGS         directed edge list (source target)
//   BIDFM_POLBLOGS_LABELS  label file over all 1490 nodes (ids match the edge list)
Outcome political_blogs() {
  const char* edges = std::getenv("BIDFM_POLBLOGS");
  const char* labels = std::getenv("BIDFM_POLBLOGS_LABELS");
  if (!edges || !labels) return {Outcome::kSkip, "set BIDFM_POLBLOGS and BIDFM_POLBLOGS_LABELS to run"};
  const LabelFile truth = read_labels(labels);
  EdgeListOptions opts;
  opts.square = true;
  const EdgeListMatrix e = read_edge_list(edges, opts);
  std::unordered_map<std::string, Eigen::Index> position;
  for (std::size_t i = 0; i < truth.ids.size(); ++i) position[truth.ids[i]] = static_cast<Eigen::Index>(i);
  const auto n = static_cast<Eigen::Index>(truth.ids.size());
  Matrix a = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < e.row_ids.size(); ++i)
    for (std::size_t j = 0; j < e.col_ids.size(); ++j) {
      const double w = e.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (w != 0.0) a(position.at(e.row_ids[i]), position.at(e.col_ids[j])) = w;
    }
  const FilterResult f = filter_zero_degree(a, FilterMode::kBothOr);
  const bool sets = f.zero_out.size() == 500 && f.zero_in.size() == 425 && f.zero_both.size() == 266 &&
                    f.zero_either.size() == 659;
  std::vector<int> kept_truth;
  for (int i : f.kept_rows) kept_truth.push_back(truth.labels[static_cast<std::size_t>(i)]);
  const Membership t(kept_truth, 2);
  const DetectionResult r = nbisc(f.matrix, 2, 2, 0);
  const MetricsReport m = combined_report(r.row_labels, t, r.col_labels, t);
  const bool ok = sets && std::fabs(m.error_rate - 0.0529) <= 0.05 && std::fabs(m.nmi - 0.7035) <= 0.10;
  return pass_if(ok, fmt("|I_r0|=%zu |I_c0|=%zu |I_0|=%zu |I|=%zu, error %.4f, NMI %.4f", f.zero_out.size(),
                         f.zero_in.size(), f.zero_both.size(), f.zero_either.size(), m.error_rate, m.nmi));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"population exact recovery", population_recovery},
      {"sim1a BiSC trend over rho", sim1a_trend},
      {"sim2c BiSC trend over sigma2", sim2c_trend},
      {"sim3d ordering at n=500", sim3d_ordering},
      {"metrics match brute force", metric_oracles},
      {"population geometry", geometry},
      {"analytic population SVD", svd_oracle},
      {"spectral deviation ratio", spectral_deviation_ratio},
      {"political blogs", political_blogs},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = o.status == Outcome::kPass ? "PASS" : o.status == Outcome::kFail ? "FAIL" : "SKIP";
    failed += o.status == Outcome::kFail && o.known.empty();
    std::printf("%s %zu %s: %s [%.1f s]\n", tag, i + 1, criteria[i].first, o.detail.c_str(), secs);
    if (!o.known.empty()) std::printf("     known: %s\n", o.known.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
