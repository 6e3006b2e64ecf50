#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bidfm/bidfm.hpp"

namespace bidfm::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string output;
  std::string format = "csv";
};

struct LoadedMatrix {
  Matrix matrix;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
};

struct InputFlags {
  std::string path;
  bool header = false;
  bool square = false;
};

void add_input_flags(CLI::App* cmd, InputFlags& in) {
  cmd->add_option("-i,--input", in.path, "dense matrix file or edge list")->required()->check(CLI::ExistingFile);
  cmd->add_flag("--header", in.header, "edge list has a header line");
  cmd->add_flag("--square", in.square, "edge list rows and columns share one id set");
}

LoadedMatrix load_matrix(const InputFlags& in, std::ostream& err) {
  std::string first;
  {
    std::ifstream f(in.path);
    std::getline(f, first);
  }
  LoadedMatrix out;
  if (first.rfind("# bidfm-matrix", 0) == 0) {
    out.matrix = read_matrix(in.path);
    return out;
  }
  EdgeListOptions opts;
  opts.header = in.header;
  opts.square = in.square;
  EdgeListMatrix e = read_edge_list(in.path, opts);
  for (const auto& w : e.warnings) err << "warning: " << w << '\n';
  out.matrix = std::move(e.matrix);
  out.row_ids = std::move(e.row_ids);
  out.col_ids = std::move(e.col_ids);
  return out;
}

fs::path output_dir(const Globals& g) {
  fs::path dir = g.output.empty() ? fs::path(".") : fs::path(g.output);
  fs::create_directories(dir);
  return dir;
}

void emit(const Globals& g, const std::string& text, std::ostream& out) {
  if (g.output.empty()) {
    out << text;
  } else {
    write_text_atomic(g.output, text);
  }
}

std::string key_values_csv(const ojson& j) {
  std::string s = "key,value\n";
  for (const auto& [k, v] : j.items()) {
    s += k + ',';
    if (v.is_number_float()) s += format_double(v.get<double>());
    else if (v.is_string()) s += v.get<std::string>();
    else if (v.is_null()) s += "";
    else s += v.dump();
    s += '\n';
  }
  return s;
}

std::string render(const Globals& g, const ojson& j) {
  return g.format == "json" ? j.dump(2) + "\n" : key_values_csv(j);
}

ojson optional_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

// Reorders `est` to follow the node order of `truth` when both files carry
// the same ids in different orders.
Membership align(const LabelFile& est, const LabelFile& truth, const std::string& side) {
  if (est.labels.size() != truth.labels.size()) {
    throw DimensionError(side + ": estimated and true label files have different node counts");
  }
  if (est.ids == truth.ids) return est.labels;
  std::unordered_map<std::string, int> label_of;
  for (std::size_t i = 0; i < est.ids.size(); ++i) label_of[est.ids[i]] = est.labels[i];
  std::vector<int> aligned;
  aligned.reserve(truth.ids.size());
  for (const auto& id : truth.ids) {
    auto it = label_of.find(id);
    if (it == label_of.end()) throw DimensionError(side + ": node '" + id + "' missing from the estimated labels");
    aligned.push_back(it->second);
  }
  return Membership(std::move(aligned), est.labels.k());
}

std::string indices_text(const std::vector<int>& idx, const std::vector<std::string>& ids) {
  std::string s;
  for (int i : idx) {
    s += ids.empty() ? std::to_string(i + 1) : ids[static_cast<std::size_t>(i)];
    s += '\n';
  }
  return s;
}

ojson theory_report(const TheoryInputs& in, ModelKind model, double c_alpha, double c) {
  ojson j;
  j["model"] = to_string(model);
  j["n_r"] = in.n_r;
  j["n_c"] = in.n_c;
  j["k_r"] = in.k_r;
  j["k_c"] = in.k_c;
  j["sigma_kr_p"] = in.sigma_kr_p;
  j["gamma"] = in.gamma;
  j["tau"] = optional_number(in.tau);
  const AssumptionCheck a = model == ModelKind::kBiDFM ? check_assumption1(in) : check_assumption2(in);
  j["assumption"] = a.indeterminate ? "indeterminate" : (a.holds ? "holds" : "fails");
  j["assumption_ratio"] = a.indeterminate ? ojson(nullptr) : ojson(a.ratio);
  j["deviation_bound"] = model == ModelKind::kBiDFM ? deviation_bound_bidfm(in, c_alpha) : deviation_bound_bidcdfm(in, c_alpha);
  const Envelope e = model == ModelKind::kBiDFM ? error_envelope_bidfm(in, c) : error_envelope_bidcdfm(in, c);
  j["f_r"] = e.f_r;
  j["f_c"] = e.f_c;
  return j;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bipartite distribution-free model toolkit", "bidfm"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("-o,--output", g.output, "output file, or directory for multi-file commands");
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"csv", "json"}));

  // generate
  auto* gen = app.add_subcommand("generate", "build Omega and sample A from a model config");
  std::string gen_config;
  bool no_sample = false;
  gen->add_option("-c,--config", gen_config, "model config (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_flag("--no-sample", no_sample, "write Omega and the truth only");

  // detect
  auto* det = app.add_subcommand("detect", "cluster rows and columns of A");
  InputFlags det_in;
  std::string alg_name;
  int kr = 0, kc = 0, restarts = 10;
  std::optional<double> regularizer, threshold;
  add_input_flags(det, det_in);
  det->add_option("--alg", alg_name, "bisc | nbisc | disim | dscore | rdscore")->required();
  det->add_option("--kr", kr, "row clusters")->required()->check(CLI::PositiveNumber);
  det->add_option("--kc", kc, "column clusters")->required()->check(CLI::PositiveNumber);
  det->add_option("--restarts", restarts, "k-means restarts")->check(CLI::PositiveNumber);
  det->add_option("--regularizer", regularizer, "Laplacian regularizer (default: mean degree)");
  det->add_option("--threshold", threshold, "ratio clipping threshold (default: log n)");
  double svd_tol = DetectOptions{}.svd_tol;
  det->add_option("--svd-tol", svd_tol, "relative residual tolerance of the truncated SVD")
      ->check(CLI::PositiveNumber);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "score estimated labels against the truth");
  std::string row_est, row_truth, col_est, col_truth;
  ev->add_option("--row-est", row_est)->required()->check(CLI::ExistingFile);
  ev->add_option("--row-truth", row_truth)->required()->check(CLI::ExistingFile);
  ev->add_option("--col-est", col_est)->required()->check(CLI::ExistingFile);
  ev->add_option("--col-truth", col_truth)->required()->check(CLI::ExistingFile);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a simulation sweep");
  std::string preset_name, sim_config, long_path;
  std::optional<int> replicates, threads;
  std::vector<std::string> algorithms;
  bool population = false;
  auto* preset_opt = sim->add_option("--preset", preset_name, "sim1a..sim1d, sim2a..sim2f, sim3a..sim3d");
  auto* config_opt = sim->add_option("-c,--config", sim_config, "simulation config (JSON)")->check(CLI::ExistingFile);
  preset_opt->excludes(config_opt);
  sim->add_option("--replicates", replicates)->check(CLI::PositiveNumber);
  sim->add_option("--threads", threads)->check(CLI::NonNegativeNumber);
  sim->add_option("--algorithms", algorithms, "subset of bisc nbisc disim dscore rdscore");
  sim->add_flag("--population", population, "use A = Omega");
  sim->add_option("--long", long_path, "also write the long-format CSV here");

  // estimate-k
  auto* ek = app.add_subcommand("estimate-k", "leading singular values and an eigengap suggestion");
  InputFlags ek_in;
  int m = 8;
  add_input_flags(ek, ek_in);
  ek->add_option("-m,--top", m, "number of singular values")->check(CLI::PositiveNumber);

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "drop zero-degree nodes");
  InputFlags pre_in;
  std::string mode_name;
  add_input_flags(pre, pre_in);
  pre->add_option("--mode", mode_name, "rows | cols | rows+cols | both-and | both-or")->required();

  // theory
  auto* th = app.add_subcommand("theory", "assumption checks, deviation bound and error envelopes");
  std::string th_config, th_inputs, th_model = "bidfm";
  double c_alpha = 1.0, c_env = 1.0;
  auto* thc = th->add_option("-c,--config", th_config, "model config (JSON)")->check(CLI::ExistingFile);
  auto* thi = th->add_option("--inputs", th_inputs, "theory inputs (JSON)")->check(CLI::ExistingFile);
  thc->excludes(thi);
  th->add_option("--model", th_model, "model used with --inputs")->check(CLI::IsMember({"bidfm", "bidcdfm"}));
  th->add_option("--c-alpha", c_alpha, "deviation-bound constant");
  th->add_option("--envelope-c", c_env, "envelope constant");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (sim->parsed() && preset_name.empty() && sim_config.empty()) {
    err << "simulate: one of --preset or --config is required\n" << sim->help();
    return kUsage;
  }
  if (th->parsed() && th_config.empty() && th_inputs.empty()) {
    err << "theory: one of --config or --inputs is required\n" << th->help();
    return kUsage;
  }
  const std::uint64_t seed = g.seed.value_or(0);

  try {
    if (gen->parsed()) {
      const ModelSpec spec = parse_model_spec(read_text(gen_config), seed);
      const fs::path dir = output_dir(g);
      const Matrix omega = spec.omega();
      write_matrix(dir / "omega.matrix", omega);
      write_labels(dir / "row_truth.labels", spec.row_truth());
      write_labels(dir / "col_truth.labels", spec.col_truth());
      write_text_atomic(dir / "model.json", model_spec_to_json(spec));
      if (!no_sample) write_matrix(dir / "A.matrix", sample_adjacency(omega, spec.dist, spec.sample_seed));
      out << "wrote " << omega.rows() << "x" << omega.cols() << " model to " << dir.string() << '\n';
    } else if (det->parsed()) {
      const LoadedMatrix a = load_matrix(det_in, err);
      DetectOptions opts;
      opts.kmeans_restarts = restarts;
      opts.svd_tol = svd_tol;
      const Algorithm alg = parse_algorithm(alg_name);
      DetectionResult res;
      if (alg == Algorithm::kDISIM && regularizer) {
        const ShiftedMatrix s = shift_nonnegative(a.matrix);
        res = disim(s.matrix, kr, kc, regularizer, seed, opts);
        res.shift = s.shift;
      } else if (alg == Algorithm::kRDSCORE && (regularizer || threshold)) {
        const ShiftedMatrix s = shift_nonnegative(a.matrix);
        res = rdscore(s.matrix, kr, kc, regularizer, threshold, seed, opts);
        res.shift = s.shift;
      } else if (alg == Algorithm::kDSCORE && threshold) {
        res = dscore(a.matrix, kr, kc, threshold, seed, opts);
      } else {
        res = run_algorithm(alg, a.matrix, kr, kc, seed, opts);
      }
      const fs::path dir = output_dir(g);
      write_labels(dir / "row.labels", res.row_labels, a.row_ids);
      write_labels(dir / "col.labels", res.col_labels, a.col_ids);
      ojson j;
      j["algorithm"] = to_string(alg);
      j["n_r"] = a.matrix.rows();
      j["n_c"] = a.matrix.cols();
      j["k_r"] = kr;
      j["k_c"] = kc;
      j["seed"] = seed;
      for (Eigen::Index i = 0; i < res.singular_values.size(); ++i)
        j["singular_value_" + std::to_string(i + 1)] = res.singular_values(i);
      j["shift"] = res.shift;
      j["degenerate_rows"] = res.degenerate_rows.size();
      j["degenerate_cols"] = res.degenerate_cols.size();
      out << render(g, j);
    } else if (ev->parsed()) {
      const LabelFile rt = read_labels(row_truth);
      const LabelFile ct = read_labels(col_truth);
      const Membership re = align(read_labels(row_est), rt, "rows");
      const Membership ce = align(read_labels(col_est), ct, "columns");
      const MetricsReport r = combined_report(re, rt.labels, ce, ct.labels);
      if (g.format == "json") {
        ojson j = {{"error_rate_r", r.error_rate_r}, {"error_rate_c", r.error_rate_c}, {"error_rate", r.error_rate},
                   {"nmi_r", r.nmi_r},               {"nmi_c", r.nmi_c},               {"nmi", r.nmi},
                   {"ari_r", r.ari_r},               {"ari_c", r.ari_c},               {"ari", r.ari}};
        emit(g, j.dump(2) + "\n", out);
      } else {
        emit(g, metrics_csv_header() + "\n" + to_csv_row(r) + "\n", out);
      }
    } else if (sim->parsed()) {
      SimulationConfig c = preset_name.empty() ? parse_simulation_config(read_text(sim_config)) : preset(preset_name);
      if (g.seed) c.base_seed = *g.seed;
      if (replicates) c.replicates = *replicates;
      if (threads) c.threads = *threads;
      if (population) c.population = true;
      if (!algorithms.empty()) {
        c.algorithms.clear();
        for (const auto& name : algorithms) c.algorithms.push_back(parse_algorithm(name));
      }
      const ExperimentReport report = run_simulation(c);
      if (!long_path.empty()) write_text_atomic(long_path, report_long_csv(report));
      if (g.format == "json") {
        ojson pts = ojson::array();
        for (const auto& p : report.points) {
          pts.push_back({{"algorithm", to_string(p.algorithm)}, {to_string(report.sweep), p.value},
                         {"replicates", p.replicates}, {"failures", p.failures},
                         {"mean_error_rate", p.mean_error}, {"se_error_rate", p.se_error},
                         {"mean_nmi", p.mean_nmi}, {"se_nmi", p.se_nmi},
                         {"mean_ari", p.mean_ari}, {"se_ari", p.se_ari},
                         {"first_seed", p.first_seed}, {"last_seed", p.last_seed}});
        }
        emit(g, ojson{{"name", report.name}, {"points", pts}}.dump(2) + "\n", out);
      } else {
        emit(g, report_csv(report), out);
      }
    } else if (ek->parsed()) {
      const LoadedMatrix a = load_matrix(ek_in, err);
      const EigengapResult r = estimate_k_eigengap(a.matrix, m);
      if (g.format == "json") {
        emit(g, ojson{{"suggested_k", r.k}, {"singular_values", r.singular_values}}.dump(2) + "\n", out);
      } else {
        std::string s = "# bidfm-eigengap v1 suggested_k=" + std::to_string(r.k) + "\nindex,singular_value\n";
        for (std::size_t i = 0; i < r.singular_values.size(); ++i)
          s += std::to_string(i + 1) + ',' + format_double(r.singular_values[i]) + '\n';
        emit(g, s, out);
      }
    } else if (pre->parsed()) {
      const LoadedMatrix a = load_matrix(pre_in, err);
      const FilterMode mode = parse_filter_mode(mode_name);
      const FilterResult f = filter_zero_degree(a.matrix, mode);
      const fs::path dir = output_dir(g);
      write_matrix(dir / "filtered.matrix", f.matrix);
      write_text_atomic(dir / "kept_rows.txt", indices_text(f.kept_rows, a.row_ids));
      write_text_atomic(dir / "kept_cols.txt", indices_text(f.kept_cols, a.col_ids));
      ojson j;
      j["mode"] = to_string(mode);
      j["rows_in"] = a.matrix.rows();
      j["cols_in"] = a.matrix.cols();
      j["rows_out"] = f.matrix.rows();
      j["cols_out"] = f.matrix.cols();
      j["zero_out_degree"] = f.zero_out.size();
      j["zero_in_degree"] = f.zero_in.size();
      if (a.matrix.rows() == a.matrix.cols()) {
        j["zero_both"] = f.zero_both.size();
        j["zero_either"] = f.zero_either.size();
      }
      out << render(g, j);
    } else if (th->parsed()) {
      ojson j;
      if (!th_config.empty()) {
        const ModelSpec spec = parse_model_spec(read_text(th_config), seed);
        const TheoryInputs in = spec.kind == ModelKind::kBiDFM ? theory_inputs(spec.dist, spec.bidfm)
                                                               : theory_inputs(spec.dist, spec.bidcdfm);
        j = theory_report(in, spec.kind, c_alpha, c_env);
        const GammaTau gt = spec.kind == ModelKind::kBiDFM ? gamma_tau(spec.dist, spec.bidfm)
                                                           : gamma_tau(spec.dist, spec.bidcdfm);
        j["gamma_bound"] = gt.gamma_bound;
      } else {
        j = theory_report(parse_theory_inputs(read_text(th_inputs)), parse_model_kind(th_model), c_alpha, c_env);
      }
      emit(g, render(g, j), out);
    }
  } catch (const ConvergenceError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const ValidationError& e) {
    err << "invalid model:\n";
    for (const auto& v : e.violations()) err << "  " << v << '\n';
    return kDataError;
  } catch (const ParseError& e) {
    err << "error: " << e.what();
    if (e.line() > 0) err << " (line " << e.line() << ")";
    err << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace bidfm::cli
