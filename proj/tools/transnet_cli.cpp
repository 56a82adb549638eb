// Command-line front end: simulation studies, the real-data protocol, a
// one-off pipeline run, and the federation wire-format utilities.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "transnet/transnet.hpp"

namespace fs = std::filesystem;
using namespace transnet;

namespace {

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  for (const auto& tok : split(csv, ',')) out.push_back(parse_double(tok));
  return out;
}

std::vector<double> parse_sweep(const std::string& spec) {
  // Either "start:end:step" or a comma-separated list.
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw std::runtime_error("sweep must be start:end:step");
    const double start = parse_double(parts[0]);
    const double end = parse_double(parts[1]);
    const double step = parse_double(parts[2]);
    if (step <= 0.0) throw std::runtime_error("sweep step must be positive");
    std::vector<double> out;
    for (double v = start; v <= end + 1e-12; v += step) out.push_back(v);
    return out;
  }
  return parse_double_list(spec);
}

unsigned parse_methods(const std::string& csv) {
  unsigned mask = 0;
  for (const auto& tok : split(csv, ',')) {
    if (tok == "adaw") mask |= kRunAdaw;
    else if (tok == "ew") mask |= kRunEw;
    else if (tok == "dsc") mask |= kRunDsc;
    else if (tok == "ssc") mask |= kRunSsc;
    else throw std::runtime_error("unknown method '" + tok + "' (use adaw,ew,dsc,ssc)");
  }
  if (mask == 0) throw std::runtime_error("no methods selected");
  return mask;
}

void print_summary(const std::vector<MetricRecord>& records) {
  std::map<std::string, std::pair<double, int>> by_method;
  for (const auto& r : records) {
    auto& cell = by_method[r.method];
    cell.first += r.misclass;
    cell.second += 1;
  }
  for (const auto& [method, cell] : by_method) {
    std::cout << method << ": mean misclassification " << format_double(cell.first / cell.second)
              << " over " << cell.second << " records\n";
  }
}

int cmd_simulate(int experiment, int case_number, int reps, std::uint64_t seed,
                 const std::string& methods, const std::string& l_values,
                 const std::string& out_dir, bool timing) {
  ExperimentConfig config = experiment_config(experiment, case_number);
  config.reps = reps;
  config.seed = seed;

  SimulateOptions options;
  options.methods = parse_methods(methods);
  options.case_id = "exp" + std::to_string(experiment) + "-case" + std::to_string(case_number);
  options.record_timing = timing;
  if (!l_values.empty()) {
    options.l_values.clear();
    for (const auto& tok : split(l_values, ',')) options.l_values.push_back(std::stoi(tok));
  }

  const auto records = run_experiment(config, options);
  fs::create_directories(out_dir);
  write_metrics_csv((fs::path(out_dir) / "metrics.csv").string(), records);
  emit_plots(records, out_dir);
  print_summary(records);
  std::cout << "wrote " << (fs::path(out_dir) / "metrics.csv").string() << "\n";
  return 0;
}

int cmd_realdata(const std::string& layers, const std::string& labels, int target,
                 const std::string& q0_sweep, const std::string& qs, int k, int reps,
                 std::uint64_t seed, const std::string& methods, const std::string& out_dir,
                 bool timing) {
  const auto files = split(layers, ',');
  const auto dataset = load_multilayer(files, labels);
  if (dataset.report.self_loops_dropped > 0)
    std::cerr << "warning: dropped " << dataset.report.self_loops_dropped << " self-loops\n";
  if (dataset.report.duplicates_dropped > 0)
    std::cerr << "warning: merged " << dataset.report.duplicates_dropped << " duplicate edges\n";

  RealdataOptions options;
  options.q0_sweep = parse_sweep(q0_sweep);
  options.source_q = parse_double_list(qs);
  options.k = k > 0 ? k : dataset.k;
  options.reps = reps;
  options.seed = seed;
  options.methods = parse_methods(methods);
  options.record_timing = timing;

  const auto records = run_realdata(dataset, target, options);
  fs::create_directories(out_dir);
  write_metrics_csv((fs::path(out_dir) / "metrics.csv").string(), records);
  emit_plots(records, out_dir, /*x_is_q0=*/true);
  print_summary(records);
  return 0;
}

int cmd_run(const std::string& target_file, const std::string& source_files, double q0,
            const std::string& qs, int k, const std::string& lambda, const std::string& weighting,
            int n_override, std::uint64_t seed, const std::string& out_dir) {
  const auto source_list = split(source_files, ',');
  const auto source_q = parse_double_list(qs);
  if (source_q.size() != source_list.size())
    throw std::runtime_error("need one q per source file");

  // The node universe is either given or inferred from the edge lists.
  const auto target_edges = read_edge_list(target_file);
  std::vector<std::vector<std::pair<int, int>>> source_edges;
  int n = n_override;
  for (const auto& [i, j] : target_edges) n = std::max(n, std::max(i, j) + 1);
  for (const auto& f : source_list) {
    source_edges.push_back(read_edge_list(f));
    for (const auto& [i, j] : source_edges.back()) n = std::max(n, std::max(i, j) + 1);
  }

  Scenario scenario;
  scenario.k = k;
  scenario.target = edges_to_network(target_edges, n);
  scenario.target_params = PrivacyParams{q0, q0};
  for (std::size_t s = 0; s < source_list.size(); ++s) {
    scenario.sources.push_back(edges_to_network(source_edges[s], n));
    scenario.source_params.push_back(PrivacyParams{source_q[s], source_q[s]});
  }

  PipelineConfig config;
  config.k = k;
  config.seed = seed;
  config.weighting =
      weighting == "equal" ? WeightingMode::kEqual : WeightingMode::kAdaptivePractical;
  if (lambda == "cv") {
    config.lambda_cv = true;
  } else {
    config.lambda_cv = false;
    config.lambda_fixed = parse_double(lambda);
  }

  const auto result = run_transnet(scenario, config);
  std::cout << "lambda: " << format_double(result.lambda_selected) << "\n";
  if (result.weights.w.size() > 0) {
    std::cout << "weights:";
    for (Eigen::Index i = 0; i < result.weights.w.size(); ++i)
      std::cout << ' ' << format_double(result.weights.w(i));
    std::cout << "\n";
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_labels((fs::path(out_dir) / "labels.txt").string(), result.labels);
    auto log = open_output((fs::path(out_dir) / "diagnostics.log").string());
    log << result.diagnostics.text();
    if (result.weights.w.size() > 0) {
      auto wcsv = open_output((fs::path(out_dir) / "weights.csv").string());
      for (Eigen::Index i = 0; i < result.weights.w.size(); ++i)
        wcsv << (i ? "," : "") << "w_" << (i + 1);
      wcsv << '\n';
      for (Eigen::Index i = 0; i < result.weights.w.size(); ++i)
        wcsv << (i ? "," : "") << format_double(result.weights.w(i));
      wcsv << '\n';
    }
    std::cout << "wrote " << (fs::path(out_dir) / "labels.txt").string() << "\n";
  } else {
    for (int l : result.labels) std::cout << l << '\n';
  }
  return 0;
}

int cmd_summary_encode(const std::string& network_file, double q, double q_prime, int k, int l,
                       int n_override, bool debias_flag, std::string out_file) {
  const auto edges = read_edge_list(network_file);
  int n = n_override;
  for (const auto& [i, j] : edges) n = std::max(n, std::max(i, j) + 1);
  const auto net = edges_to_network(edges, n);
  auto summary = local_site_compute(net, PrivacyParams{q, q_prime}, k, debias_flag);
  summary.l = l;
  if (out_file.empty()) out_file = "summary_" + std::to_string(l) + ".tns";
  save_summary(summary, out_file);
  std::cout << "wrote " << out_file << " (" << encode(summary).size() << " bytes)\n";
  return 0;
}

int cmd_summary_decode(const std::string& in_file, const std::string& csv_out) {
  const auto summary = load_summary(in_file);
  std::cout << "n=" << summary.n << " k=" << summary.k << " l=" << summary.l
            << " q=" << format_double(summary.params.q)
            << " qprime=" << format_double(summary.params.q_prime)
            << " rho_hat=" << format_double(summary.rho_hat)
            << " version=" << summary.format_version << "\n";
  if (!csv_out.empty()) {
    auto out = open_output(csv_out);
    out << encode_csv(summary);
    std::cout << "wrote " << csv_out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TransNet: privacy-preserving transfer learning for community detection"};
  app.set_config("--config");
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run one simulation study case");
  int experiment = 1, case_number = 1, reps = 10;
  std::uint64_t seed = 42;
  std::string methods = "adaw,ew,dsc,ssc", l_values, out_dir = "out";
  bool timing = false;
  sim->add_option("--experiment", experiment, "Experiment id (1,2,3)")->required();
  sim->add_option("--case", case_number, "Case id (1,2,3)")->required();
  sim->add_option("--reps", reps, "Replications per configuration");
  sim->add_option("--seed", seed, "Master seed");
  sim->add_option("--methods", methods, "Comma list of adaw,ew,dsc,ssc");
  sim->add_option("--l-values", l_values, "Comma list of source counts (default 8,12,16,20,24)");
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_flag("--timing", timing, "Record wall time in metrics.csv (breaks byte reproducibility)");

  // realdata
  auto* real = app.add_subcommand("realdata", "Privacy-aware protocol on a multilayer dataset");
  std::string layers, labels_file, q0_sweep = "0.7:0.95:0.05", qs;
  int target = 0, k_real = 0, reps_real = 10;
  std::uint64_t seed_real = 42;
  std::string methods_real = "adaw,ew,ssc", out_real = "out";
  bool timing_real = false;
  real->add_option("--layers", layers, "Comma list of edge-list files")->required();
  real->add_option("--labels", labels_file, "Labels file (-1 or NA = unlabeled)")->required();
  real->add_option("--target", target, "Index of the target layer")->required();
  real->add_option("--q0", q0_sweep, "Target privacy sweep start:end:step or comma list");
  real->add_option("--qs", qs, "Comma list: fixed q per source layer")->required();
  real->add_option("--k", k_real, "Community count (default: distinct labels)");
  real->add_option("--reps", reps_real, "Replications per q0");
  real->add_option("--seed", seed_real, "Master seed");
  real->add_option("--methods", methods_real, "Comma list of adaw,ew,dsc,ssc");
  real->add_option("--out", out_real, "Output directory");
  real->add_flag("--timing", timing_real, "Record wall time in metrics.csv");

  // run
  auto* run = app.add_subcommand("run", "Run the pipeline on given (perturbed) networks");
  std::string target_file, source_files, qs_run, lambda = "cv", weighting = "adaptive", out_run;
  double q0_run = 1.0;
  int k_run = 2, n_override = 0;
  std::uint64_t seed_run = 42;
  run->add_option("--target", target_file, "Target edge-list file")->required();
  run->add_option("--sources", source_files, "Comma list of source edge-list files")->required();
  run->add_option("--q0", q0_run, "Privacy parameter the target was released with")->required();
  run->add_option("--qs", qs_run, "Comma list: q per source file")->required();
  run->add_option("--k", k_run, "Community count")->required();
  run->add_option("--lambda", lambda, "'cv' or a fixed value");
  run->add_option("--weighting", weighting, "equal or adaptive");
  run->add_option("--n", n_override, "Node count (default: inferred from edges)");
  run->add_option("--seed", seed_run, "Seed for k-means and cross validation");
  run->add_option("--out", out_run, "Output directory (default: labels to stdout)");

  // summary-encode / summary-decode
  auto* enc = app.add_subcommand("summary-encode", "Compute and write a source summary (.tns)");
  std::string enc_network, enc_out;
  double enc_q = 1.0, enc_qprime = -1.0;
  int enc_k = 2, enc_l = 0, enc_n = 0;
  bool enc_no_debias = false;
  enc->add_option("--network", enc_network, "Edge-list file of the released network")->required();
  enc->add_option("--q", enc_q, "Edge-preserving probability q")->required();
  enc->add_option("--qprime", enc_qprime, "Non-edge preserving probability (default: q)");
  enc->add_option("--k", enc_k, "Eigenspace dimension")->required();
  enc->add_option("--l", enc_l, "Source index carried in the header");
  enc->add_option("--n", enc_n, "Node count (default: inferred)");
  enc->add_flag("--no-debias", enc_no_debias, "Skip the bias adjustment");
  enc->add_option("--out", enc_out, "Output file (default: summary_<l>.tns)");

  auto* dec = app.add_subcommand("summary-decode", "Inspect a source summary (.tns)");
  std::string dec_in, dec_csv;
  dec->add_option("--in", dec_in, "Summary file")->required();
  dec->add_option("--csv", dec_csv, "Also write the CSV debug encoding here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(experiment, case_number, reps, seed, methods, l_values, out_dir, timing);
    if (real->parsed())
      return cmd_realdata(layers, labels_file, target, q0_sweep, qs, k_real, reps_real, seed_real,
                          methods_real, out_real, timing_real);
    if (run->parsed())
      return cmd_run(target_file, source_files, q0_run, qs_run, k_run, lambda, weighting,
                     n_override, seed_run, out_run);
    if (enc->parsed())
      return cmd_summary_encode(enc_network, enc_q, enc_qprime < 0.0 ? enc_q : enc_qprime, enc_k,
                                enc_l, enc_n, !enc_no_debias, enc_out);
    if (dec->parsed()) return cmd_summary_decode(dec_in, dec_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
