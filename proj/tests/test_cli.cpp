#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"

#include "bidfm/io.hpp"

using namespace bidfm;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Workspace {
  fs::path dir;
  Workspace() {
    static int counter = 0;
    dir = fs::temp_directory_path() / ("bidfm_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    write_text_atomic(dir / name, text);
    return path(name);
  }
};

const char* kModel = R"({
  "model": "bidfm", "n_r": 60, "n_c": 90, "k_r": 2, "k_c": 3,
  "P": "P1", "rho": 0.9
})";

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("generate, detect and evaluate end to end") {
  Workspace w;
  const std::string config = w.write("model.json", kModel);
  const Result gen = run({"--seed", "3", "-o", w.path("gen"), "generate", "-c", config});
  REQUIRE(gen.code == 0);
  for (const char* f : {"omega.matrix", "A.matrix", "row_truth.labels", "col_truth.labels", "model.json"})
    CHECK(fs::exists(w.dir / "gen" / f));
  CHECK(read_matrix(w.dir / "gen" / "A.matrix").rows() == 60);

  const Result det = run({"--seed", "5", "-o", w.path("est"), "detect", "-i", w.path("gen/A.matrix"), "--alg",
                          "nbisc", "--kr", "2", "--kc", "3"});
  REQUIRE(det.code == 0);
  CHECK(det.out.find("algorithm,nBiSC") != std::string::npos);
  const LabelFile rows = read_labels(w.dir / "est" / "row.labels");
  const LabelFile cols = read_labels(w.dir / "est" / "col.labels");
  CHECK(rows.labels.size() == 60);
  CHECK(cols.labels.size() == 90);
  CHECK(cols.labels.k() == 3);

  const Result ev = run({"evaluate", "--row-est", w.path("est/row.labels"), "--row-truth",
                         w.path("gen/row_truth.labels"), "--col-est", w.path("est/col.labels"), "--col-truth",
                         w.path("gen/col_truth.labels")});
  REQUIRE(ev.code == 0);
  CHECK(count_lines(ev.out) == 2);

  const Result same = run({"evaluate", "--row-est", w.path("gen/row_truth.labels"), "--row-truth",
                           w.path("gen/row_truth.labels"), "--col-est", w.path("gen/col_truth.labels"),
                           "--col-truth", w.path("gen/col_truth.labels")});
  REQUIRE(same.code == 0);
  CHECK(same.out.substr(same.out.find('\n') + 1).rfind("0,0,0,1,1,1,1,1,1", 0) == 0);

  const Result json = run({"--format", "json", "evaluate", "--row-est", w.path("gen/row_truth.labels"),
                           "--row-truth", w.path("gen/row_truth.labels"), "--col-est",
                           w.path("gen/col_truth.labels"), "--col-truth", w.path("gen/col_truth.labels")});
  CHECK(json.out.find("\"error_rate\": 0.0") != std::string::npos);
}

TEST_CASE("generate and detect are deterministic") {
  Workspace w;
  const std::string config = w.write("model.json", kModel);
  for (const char* d : {"a", "b"}) REQUIRE(run({"--seed", "8", "-o", w.path(d), "generate", "-c", config}).code == 0);
  CHECK(read_text(w.dir / "a" / "A.matrix") == read_text(w.dir / "b" / "A.matrix"));
  CHECK(read_text(w.dir / "a" / "model.json") == read_text(w.dir / "b" / "model.json"));
  REQUIRE(run({"--seed", "9", "-o", w.path("c"), "generate", "-c", config}).code == 0);
  CHECK(read_text(w.dir / "a" / "A.matrix") != read_text(w.dir / "c" / "A.matrix"));

  // a saved model.json regenerates the same sample
  REQUIRE(run({"-o", w.path("d"), "generate", "-c", w.path("a/model.json")}).code == 0);
  CHECK(read_text(w.dir / "a" / "A.matrix") == read_text(w.dir / "d" / "A.matrix"));

  const std::vector<std::string> args = {"--seed", "2", "detect", "-i", w.path("a/A.matrix"), "--alg", "disim",
                                         "--kr", "2", "--kc", "3"};
  const Result x = run(args);
  const Result y = run(args);
  CHECK(x.code == 0);
  CHECK(x.out == y.out);
}

TEST_CASE("simulate emits one row per algorithm and swept value") {
  Workspace w;
  const std::string config = w.write("sim.json", R"({
    "preset": "sim1a", "n_r": 40, "n_c": 60, "replicates": 2, "threads": 1
  })");
  const Result r = run({"--seed", "7", "simulate", "-c", config, "--long", w.path("long.csv")});
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out) == 2 + 50);
  CHECK(r.out.rfind("# bidfm-report v1 name=sim1a\n", 0) == 0);
  CHECK(count_lines(read_text(w.dir / "long.csv")) == 2 + 50 * 2 * 3);
  const Result again = run({"--seed", "7", "simulate", "-c", config});
  CHECK(again.out == r.out);
  const Result other = run({"--seed", "8", "simulate", "-c", config});
  CHECK(other.out != r.out);

  const Result pop = run({"simulate", "--preset", "sim1a", "--replicates", "1", "--population", "--algorithms",
                          "bisc", "--threads", "1", "--format", "json"});
  REQUIRE(pop.code == 0);
  CHECK(pop.out.find("\"mean_error_rate\": 0.0") != std::string::npos);
}

TEST_CASE("estimate-k and preprocess") {
  Workspace w;
  const std::string config = w.write("model.json", kModel);
  REQUIRE(run({"-o", w.path("gen"), "generate", "-c", config, "--no-sample"}).code == 0);
  CHECK_FALSE(fs::exists(w.dir / "gen" / "A.matrix"));
  const Result ek = run({"estimate-k", "-i", w.path("gen/omega.matrix"), "--top", "5"});
  REQUIRE(ek.code == 0);
  CHECK(ek.out.rfind("# bidfm-eigengap v1 suggested_k=2\nindex,singular_value\n", 0) == 0);
  CHECK(count_lines(ek.out) == 7);

  const std::string edges = w.write("edges.tsv", "a\tb\nb\tc\nc\ta\nd\ta\n");
  const Result pre = run({"-o", w.path("pre"), "preprocess", "-i", edges, "--square", "--mode", "both-or"});
  REQUIRE(pre.code == 0);
  CHECK(pre.out.find("zero_either,1") != std::string::npos);
  CHECK(read_matrix(w.dir / "pre" / "filtered.matrix").rows() == 3);
  CHECK(read_text(w.dir / "pre" / "kept_rows.txt") == "a\nb\nc\n");
}

TEST_CASE("theory report") {
  Workspace w;
  const std::string config = w.write("model.json", kModel);
  const Result t = run({"theory", "-c", config});
  REQUIRE(t.code == 0);
  CHECK(t.out.find("assumption,holds") != std::string::npos);
  CHECK(t.out.find("gamma_bound,1") != std::string::npos);
  const std::string inputs = w.write("in.json", R"({
    "n_r": 200, "n_c": 300, "k_r": 2, "k_c": 3, "sigma_kr_p": 0.5, "rho": 0.5,
    "gamma": 1, "n_r_min": 90, "n_r_max": 110, "n_c_min": 95, "n_c_max": 105, "delta_c": 0.1
  })");
  const Result u = run({"--format", "json", "theory", "--inputs", inputs});
  REQUIRE(u.code == 0);
  CHECK(u.out.find("\"assumption\": \"indeterminate\"") != std::string::npos);
}

TEST_CASE("exit codes") {
  Workspace w;
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"detect", "--alg", "bisc"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"simulate"}).code == 1);

  const std::string broken = w.write("broken.matrix", "# bidfm-matrix v1\n2 2\n1 2\n");
  const Result bad = run({"estimate-k", "-i", broken});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line") != std::string::npos);
  const std::string invalid = w.write("invalid.json", R"({"n_r": 4, "n_c": 4, "k_r": 2, "k_c": 2,
                                                         "P": [[0.5, 0.1], [0.1, 0.5]]})");
  CHECK(run({"-o", w.path("x"), "generate", "-c", invalid}).code == 2);
  CHECK(run({"detect", "-i", broken, "--alg", "nope", "--kr", "1", "--kc", "1"}).code == 2);

  std::string dense = "# bidfm-matrix v1\n80 80\n";
  for (int i = 0; i < 80; ++i) {
    for (int j = 0; j < 80; ++j) dense += (j ? " " : "") + std::to_string(((i * 37 + j * 11) % 17) / 17.0 + (i == j));
    dense += '\n';
  }
  const std::string m = w.write("dense.matrix", dense);
  CHECK(run({"-o", w.path("ok"), "detect", "-i", m, "--alg", "bisc", "--kr", "2", "--kc", "2"}).code == 0);
  CHECK(run({"-o", w.path("no"), "detect", "-i", m, "--alg", "bisc", "--kr", "2", "--kc", "2", "--svd-tol", "1e-300"})
            .code == 3);
}
