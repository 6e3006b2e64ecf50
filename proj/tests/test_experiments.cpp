#include <random>
#include <set>

#include "doctest.h"
#include "support/oracles.hpp"

#include "bidfm/errors.hpp"
#include "bidfm/experiments.hpp"
#include "bidfm/metrics.hpp"
#include "bidfm/model.hpp"
#include "bidfm/sampling.hpp"

using namespace bidfm;

namespace {

SimulationConfig small_config() {
  SimulationConfig c = preset("sim1a");
  c.n_r = 40;
  c.n_c = 60;
  c.values = {0.3, 0.9};
  c.replicates = 3;
  c.algorithms = {Algorithm::kBiSC, Algorithm::kNBiSC};
  c.base_seed = 5;
  c.threads = 1;
  return c;
}

}  // namespace

TEST_CASE("presets") {
  const SimulationConfig s2c = preset("sim2c");
  CHECK(s2c.sweep == SweepKind::kSigma2);
  REQUIRE(s2c.values.size() == 10);
  CHECK(s2c.values.front() == doctest::Approx(0.2));
  CHECK(s2c.values.back() == doctest::Approx(2.0));
  CHECK(s2c.rho == 0.5);
  CHECK(s2c.n_r == 200);
  CHECK(s2c.n_c == 300);
  CHECK(s2c.dist.kind == EdgeLaw::kNormal);
  CHECK(s2c.p == mixing_p2());
  CHECK(s2c.replicates == 50);

  const SimulationConfig s3b = preset("sim3b");
  CHECK(s3b.n_r == 1000);
  CHECK(s3b.n_c == 1500);
  CHECK(s3b.dist.kind == EdgeLaw::kSigned);
  CHECK(s3b.sweep == SweepKind::kRho);
  CHECK(s3b.model == ModelKind::kBiDCDFM);

  const SimulationConfig s1d = preset("sim1d");
  CHECK(s1d.sweep == SweepKind::kN);
  CHECK(s1d.values == std::vector<double>{500, 1000, 1500, 2000, 2500, 3000});
  CHECK(s1d.rho == 0.5);

  const SimulationConfig s1a = preset("sim1a");
  CHECK(s1a.values.size() == 10);
  CHECK(s1a.values.back() == doctest::Approx(1.0));
  CHECK(s1a.algorithms.size() == 5);

  for (const auto& name : preset_names()) CHECK_NOTHROW(preset(name).check());
  CHECK_THROWS_AS(preset("sim4a"), ParseError);
}

TEST_CASE("config checks") {
  SimulationConfig c = small_config();
  c.replicates = 0;
  CHECK_THROWS_AS(c.check(), ValidationError);
  c = small_config();
  c.values.clear();
  CHECK_THROWS_AS(c.check(), ValidationError);
  c = small_config();
  c.p = mixing_p2();  // negative entries under Bernoulli edges
  CHECK_THROWS_AS(c.check(), ValidationError);
  CHECK_THROWS_AS(run_simulation(c), ValidationError);
}

TEST_CASE("population mode recovers the truth exactly") {
  for (const char* name : {"sim1a", "sim1b", "sim2c", "sim3a"}) {
    SimulationConfig c = preset(name);
    c.n_r = std::min(c.n_r, 120);
    c.n_c = std::min(c.n_c, 150);
    c.population = true;
    c.replicates = 1;
    c.algorithms = {Algorithm::kBiSC, Algorithm::kNBiSC};
    c.threads = 1;
    const ExperimentReport r = run_simulation(c);
    for (const auto& p : r.points) {
      if (c.model == ModelKind::kBiDCDFM && p.algorithm == Algorithm::kBiSC) continue;
      CHECK(p.replicates == 1);
      CHECK(p.mean_error == 0.0);
      CHECK(p.mean_nmi == doctest::Approx(1.0));
    }
  }
  SimulationConfig c = small_config();
  c.population = true;
  c.replicates = 1;
  c.algorithms = {Algorithm::kBiSC};
  for (const auto& p : run_simulation(c).points) CHECK(p.mean_error == 0.0);
}

TEST_CASE("report structure and determinism") {
  const SimulationConfig c = small_config();
  const ExperimentReport a = run_simulation(c);
  REQUIRE(a.points.size() == 4);
  REQUIRE(a.records.size() == 12);
  CHECK(a.points[0].algorithm == Algorithm::kBiSC);
  CHECK(a.points[1].value == 0.9);
  CHECK(a.records[0].seed == 5);
  CHECK(a.records[2].seed == 7);
  for (const auto& p : a.points) {
    CHECK(p.replicates + p.failures == 3);
    CHECK(p.first_seed == 5);
    CHECK(p.last_seed == 7);
    CHECK(p.mean_error >= 0.0);
    CHECK(p.mean_error <= 1.0);
    CHECK(p.mean_nmi >= 0.0);
    CHECK(p.mean_nmi <= 1.0 + 1e-12);
    CHECK(p.mean_ari <= 1.0 + 1e-12);
  }
  CHECK(a.point(Algorithm::kNBiSC, 0.3).algorithm == Algorithm::kNBiSC);
  CHECK_THROWS_AS(a.point(Algorithm::kDISIM, 0.3), std::out_of_range);

  const ExperimentReport b = run_simulation(c);
  CHECK(report_csv(a) == report_csv(b));
  CHECK(report_long_csv(a) == report_long_csv(b));

  SimulationConfig threaded = c;
  threaded.threads = 4;
  const ExperimentReport t = run_simulation(threaded);
  CHECK(report_csv(t) == report_csv(a));
  CHECK(report_long_csv(t) == report_long_csv(a));
}

TEST_CASE("replicate means agree with the long records") {
  const ExperimentReport r = run_simulation(small_config());
  for (std::size_t p = 0; p < r.points.size(); ++p) {
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) sum += r.records[p * 3 + static_cast<std::size_t>(k)].error_rate;
    CHECK(r.points[p].mean_error == doctest::Approx(sum / 3.0));
  }
}

TEST_CASE("a larger seed extends the same curve") {
  SimulationConfig c = small_config();
  const ExperimentReport three = run_simulation(c);
  c.replicates = 4;
  const ExperimentReport four = run_simulation(c);
  for (std::size_t p = 0; p < three.points.size(); ++p)
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(four.records[p * 4 + k].error_rate == three.records[p * 3 + k].error_rate);
}

TEST_CASE("algorithm failures are recorded, not fatal") {
  SimulationConfig c = small_config();
  c.k_r = 1;
  c.k_c = 2;
  c.p = Matrix(1, 2);
  c.p << 1.0, 0.4;
  c.algorithms = {Algorithm::kBiSC, Algorithm::kDSCORE};
  const ExperimentReport r = run_simulation(c);
  for (const auto& p : r.points) {
    if (p.algorithm == Algorithm::kDSCORE) {
      CHECK(p.failures == 3);
      CHECK(p.replicates == 0);
    } else {
      CHECK(p.failures == 0);
    }
  }
  bool saw_failed = false;
  for (const auto& rec : r.records)
    if (!rec.ok) {
      saw_failed = true;
      CHECK_FALSE(rec.failure.empty());
    }
  CHECK(saw_failed);
  CHECK(report_long_csv(r).find("failed") != std::string::npos);
}

TEST_CASE("eigengap") {
  const BiDFMParams p{sample_memberships(60, 2, 3), sample_memberships(80, 2, 4),
                      (Matrix(2, 2) << 1.0, 0.3, 0.2, 0.8).finished(), 0.6};
  const Matrix omega = expected_adjacency(p);
  const EigengapResult exact = estimate_k_eigengap(omega, 8);
  CHECK(exact.k == 2);
  CHECK(exact.singular_values.size() == 8);

  int agree = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix a = sample_adjacency(omega, DistributionSpec::normal(0.01), seed);
    agree += estimate_k_eigengap(a, 8).k == 2;
  }
  CHECK(agree >= 18);

  CHECK_THROWS_AS(estimate_k_eigengap(omega, 100), DimensionError);
}

TEST_CASE("degree profiles") {
  const DegreeProfiles ones = degree_profiles(Matrix::Ones(2, 3));
  CHECK(ones.d_r == Vector::Constant(2, 3.0));
  CHECK(ones.d_c == Vector::Constant(3, 2.0));
  Matrix s(2, 2);
  s << 1, -1, -1, 1;
  CHECK(degree_profiles(s).d_r == Vector::Constant(2, 2.0));

  std::mt19937_64 gen(9);
  const Matrix m = oracle::random_matrix(gen, 7, 5);
  const DegreeProfiles d = degree_profiles(m);
  for (int i = 0; i < 7; ++i) {
    double sum = 0.0;
    for (int j = 0; j < 5; ++j) sum += std::fabs(m(i, j));
    CHECK(d.d_r(i) == doctest::Approx(sum).epsilon(1e-14));
  }
  for (int j = 0; j < 5; ++j) {
    double sum = 0.0;
    for (int i = 0; i < 7; ++i) sum += std::fabs(m(i, j));
    CHECK(d.d_c(j) == doctest::Approx(sum).epsilon(1e-14));
  }
}

TEST_CASE("zero-degree filtering on a 3x3 toy") {
  // row 1 is empty, column 2 is empty, node 1 has no in-edges either
  Matrix a(3, 3);
  a << 0, 0, 0,
       0, 0, 0,
       1, 0, 0;
  a(0, 0) = 1;
  // degrees: rows {1, 0, 1}; cols {2, 0, 0}
  const FilterResult rows = filter_zero_degree(a, FilterMode::kRows);
  CHECK(rows.zero_out == std::vector<int>{1});
  CHECK(rows.zero_in == std::vector<int>{1, 2});
  CHECK(rows.zero_both == std::vector<int>{1});
  CHECK(rows.zero_either == std::vector<int>{1, 2});
  CHECK(rows.kept_rows == std::vector<int>{0, 2});
  CHECK(rows.matrix.rows() == 2);
  CHECK(rows.matrix.cols() == 3);

  const FilterResult cols = filter_zero_degree(a, FilterMode::kCols);
  CHECK(cols.kept_cols == std::vector<int>{0});
  const FilterResult both = filter_zero_degree(a, FilterMode::kRowsAndCols);
  CHECK(both.matrix.rows() == 2);
  CHECK(both.matrix.cols() == 1);
  const FilterResult and_mode = filter_zero_degree(a, FilterMode::kBothAnd);
  CHECK(and_mode.kept_rows == std::vector<int>{0, 2});
  CHECK(and_mode.kept_cols == std::vector<int>{0, 2});
  const FilterResult or_mode = filter_zero_degree(a, FilterMode::kBothOr);
  CHECK(or_mode.kept_rows == std::vector<int>{0});
  CHECK(or_mode.matrix(0, 0) == 1.0);

  CHECK_THROWS_AS(filter_zero_degree(Matrix::Ones(2, 3), FilterMode::kBothOr), DimensionError);
  CHECK_NOTHROW(filter_zero_degree(Matrix::Ones(2, 3), FilterMode::kRowsAndCols));
}

TEST_CASE("filtering keeps entries and is a no-op without zero degrees") {
  std::mt19937_64 gen(13);
  Matrix m = oracle::random_matrix(gen, 30, 30);
  CHECK(filter_zero_degree(m, FilterMode::kBothOr).matrix == m);
  std::bernoulli_distribution drop(0.2);
  for (int i = 0; i < 30; ++i) {
    if (drop(gen)) m.row(i).setZero();
    if (drop(gen)) m.col(i).setZero();
  }
  for (FilterMode mode : {FilterMode::kRows, FilterMode::kCols, FilterMode::kRowsAndCols, FilterMode::kBothAnd,
                          FilterMode::kBothOr}) {
    const FilterResult f = filter_zero_degree(m, mode);
    REQUIRE(f.matrix.rows() == static_cast<Eigen::Index>(f.kept_rows.size()));
    REQUIRE(f.matrix.cols() == static_cast<Eigen::Index>(f.kept_cols.size()));
    std::uniform_int_distribution<std::size_t> pr(0, f.kept_rows.size() - 1), pc(0, f.kept_cols.size() - 1);
    for (int t = 0; t < 50; ++t) {
      const std::size_t i = pr(gen), j = pc(gen);
      CHECK(f.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
            m(f.kept_rows[i], f.kept_cols[j]));
    }
  }
  CHECK(parse_filter_mode(to_string(FilterMode::kBothAnd)) == FilterMode::kBothAnd);
}

TEST_CASE("row and column similarity") {
  const Membership a({0, 0, 1, 1}, 2);
  const PartitionSimilarity same = row_column_similarity(a, a);
  CHECK(same.hamming == 0.0);
  CHECK(same.nmi == doctest::Approx(1.0));
  CHECK(same.ari == doctest::Approx(1.0));
  const PartitionSimilarity crossed = row_column_similarity(a, Membership({0, 1, 0, 1}, 2));
  CHECK(crossed.nmi == doctest::Approx(0.0));

  std::mt19937_64 gen(17);
  for (int t = 0; t < 10; ++t) {
    const Membership r = oracle::random_partition(gen, 12, 3);
    const Membership c = oracle::random_partition(gen, 12, 3);
    const PartitionSimilarity s = row_column_similarity(r, c);
    CHECK(s.hamming == hamming_error(r, c));
    CHECK(s.nmi == nmi(r, c));
    CHECK(s.ari == ari(r, c));
  }
  CHECK_THROWS_AS(row_column_similarity(a, Membership({0, 1, 2}, 3)), DimensionError);
  CHECK_THROWS_AS(row_column_similarity(a, Membership({0, 1, 2, 0}, 3)), DimensionError);
}
