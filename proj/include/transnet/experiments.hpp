#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "transnet/dataio.hpp"
#include "transnet/metrics.hpp"
#include "transnet/netgen.hpp"
#include "transnet/pipeline.hpp"
#include "transnet/svg.hpp"

namespace transnet {

inline constexpr const char* kMethodAdaw = "TransNet-AdaW";
inline constexpr const char* kMethodEw = "TransNet-EW";
inline constexpr const char* kMethodDsc = "Distributed SC";
inline constexpr const char* kMethodSsc = "Single SC";

// One (method, configuration, replication) measurement. `seconds` is only
// populated when timing collection is requested: metrics files must be
// byte-identical across reruns, and wall time is not.
struct MetricRecord {
  std::string method;
  int l = 0;
  std::string case_id;
  int rep = 0;
  std::uint64_t seed = 0;
  double proj_dist = 0.0;
  double misclass = 0.0;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

inline constexpr const char* kMetricsCsvHeader = "method,L,case,rep,seed,proj_dist,misclass,lambda,seconds";

inline void write_metrics_csv(const std::string& path, const std::vector<MetricRecord>& records) {
  auto out = open_output(path);
  out << kMetricsCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.method << ',' << r.l << ',' << r.case_id << ',' << r.rep << ',' << r.seed << ','
        << format_double(r.proj_dist) << ',' << format_double(r.misclass) << ','
        << format_double(r.lambda) << ',' << format_double(r.seconds) << '\n';
  }
}

inline std::vector<MetricRecord> read_metrics_csv(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsCsvHeader)
    throw std::runtime_error(path + ": unexpected metrics header");
  std::vector<MetricRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 9) throw std::runtime_error(path + ": malformed metrics row");
    MetricRecord r;
    r.method = fields[0];
    r.l = std::stoi(fields[1]);
    r.case_id = fields[2];
    r.rep = std::stoi(fields[3]);
    r.seed = std::stoull(fields[4]);
    r.proj_dist = parse_double(fields[5]);
    r.misclass = parse_double(fields[6]);
    r.lambda = parse_double(fields[7]);
    r.seconds = parse_double(fields[8]);
    records.push_back(std::move(r));
  }
  return records;
}

namespace detail {

inline Matrix matrix3(double a11, double a12, double a13, double a22, double a23, double a33) {
  Matrix b(3, 3);
  b << a11, a12, a13, a12, a22, a23, a13, a23, a33;
  return b;
}

}  // namespace detail

// Parameter presets for the three simulation studies (three cases each):
// fixed target connectivity, four source groups with per-case membership
// perturbation proportions and RR levels.
inline ExperimentConfig experiment_config(int experiment, int case_number) {
  if (experiment < 1 || experiment > 3 || case_number < 1 || case_number > 3)
    throw std::invalid_argument("experiment_config: experiment and case must be in {1,2,3}");

  ExperimentConfig c;
  c.n = 120;
  c.k = 3;
  c.reps = 10;
  c.seed = 42;
  c.b0 = detail::matrix3(0.3, 0.1, 0.0, 0.3, 0.06, 0.3);
  c.b_groups[0] = detail::matrix3(0.3, 0.1, 0.1, 0.3, 0.06, 0.3);
  c.b_groups[1] = detail::matrix3(0.3, 0.1, 0.0, 0.2, 0.06, 0.2);
  c.b_groups[2] = detail::matrix3(0.3, 0.1, 0.0, 0.3, 0.1, 0.3);
  c.b_groups[3] = detail::matrix3(0.3, 0.15, 0.0, 0.3, 0.06, 0.3);

  switch (experiment) {
    case 1:  // private sources, homogeneous memberships
      c.mu = {0.0, 0.0, 0.0, 0.0};
      c.q0 = 0.95;
      if (case_number == 1) c.q = {0.95, 0.95, 0.7, 0.7};
      if (case_number == 2) c.q = {0.95, 0.95, 0.8, 0.8};
      if (case_number == 3) c.q = {0.8, 0.8, 0.8, 0.8};
      break;
    case 2:  // heterogeneous memberships, no perturbation anywhere
      c.q = {1.0, 1.0, 1.0, 1.0};
      c.q0 = 1.0;
      if (case_number == 1) c.mu = {0.02, 0.02, 0.5, 0.5};
      if (case_number == 2) c.mu = {0.02, 0.02, 0.3, 0.3};
      if (case_number == 3) c.mu = {0.3, 0.3, 0.3, 0.3};
      break;
    case 3:  // both heterogeneous and private
      c.q0 = 0.95;
      if (case_number == 1) {
        c.mu = {0.02, 0.02, 0.5, 0.5};
        c.q = {0.95, 0.95, 0.7, 0.7};
      }
      if (case_number == 2) {
        c.mu = {0.1, 0.1, 0.5, 0.5};
        c.q = {0.95, 0.95, 0.7, 0.7};
      }
      if (case_number == 3) {
        c.mu = {0.02, 0.02, 0.5, 0.5};
        c.q = {0.8, 0.8, 0.95, 0.95};
      }
      break;
  }
  return c;
}

enum MethodFlag : unsigned {
  kRunAdaw = 1u << 0,
  kRunEw = 1u << 1,
  kRunDsc = 1u << 2,
  kRunSsc = 1u << 3,
  kRunAll = kRunAdaw | kRunEw | kRunDsc | kRunSsc,
};

struct SimulateOptions {
  std::vector<int> l_values = {8, 12, 16, 20, 24};
  unsigned methods = kRunAll;
  std::string case_id = "exp";
  bool record_timing = false;  // true breaks byte-reproducibility of the CSV
  PipelineConfig pipeline;     // k/seed fields are overridden per record
};

namespace detail {

inline std::uint64_t method_stream(const char* method) {
  if (method == std::string(kMethodAdaw)) return 1;
  if (method == std::string(kMethodEw)) return 2;
  if (method == std::string(kMethodDsc)) return 3;
  return 4;
}

struct MethodOutcome {
  std::vector<int> labels;
  Eigenspace scored_space;
  double lambda = std::numeric_limits<double>::quiet_NaN();
};

inline MethodOutcome run_method(const char* method, const Scenario& scenario,
                                PipelineConfig config) {
  MethodOutcome out;
  if (method == std::string(kMethodAdaw) || method == std::string(kMethodEw)) {
    config.weighting = method == std::string(kMethodAdaw) ? WeightingMode::kAdaptivePractical
                                                          : WeightingMode::kEqual;
    auto result = run_transnet(scenario, config);
    out.labels = std::move(result.labels);
    out.scored_space = std::move(result.regularized_space);
    out.lambda = result.lambda_selected;
  } else if (method == std::string(kMethodDsc)) {
    auto result = baseline_distributed_sc(scenario, config);
    out.labels = std::move(result.labels);
    out.scored_space = std::move(result.space);
  } else {
    auto result = baseline_single_sc(scenario, config);
    out.labels = std::move(result.labels);
    out.scored_space = std::move(result.space);
  }
  return out;
}

}  // namespace detail

// Sweeps L and replications, runs the requested methods on shared scenarios
// and scores them against the generating membership. Replications are keyed
// by (config, derived seed), so any execution order yields the same records.
inline std::vector<MetricRecord> run_experiment(const ExperimentConfig& config,
                                                const SimulateOptions& options) {
  config.validate();
  std::vector<MetricRecord> records;
  const std::vector<std::pair<const char*, unsigned>> methods = {
      {kMethodAdaw, kRunAdaw}, {kMethodEw, kRunEw}, {kMethodDsc, kRunDsc}, {kMethodSsc, kRunSsc}};

  for (int l : options.l_values) {
    ExperimentConfig cfg = config;
    cfg.l = l;
    for (int rep = 0; rep < config.reps; ++rep) {
      const std::uint64_t scenario_seed = derive_seed(
          config.seed, {kStreamScenario, static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(rep)});
      const Scenario scenario = build_scenario(cfg, scenario_seed);
      const Eigenspace truth_space = membership_eigenspace(scenario.truth);

      for (const auto& [method, flag] : methods) {
        if (!(options.methods & flag)) continue;
        PipelineConfig pipeline = options.pipeline;
        pipeline.k = config.k;
        pipeline.seed = derive_seed(config.seed, {kStreamReplication, static_cast<std::uint64_t>(l),
                                                  static_cast<std::uint64_t>(rep),
                                                  detail::method_stream(method)});

        const auto start = std::chrono::steady_clock::now();
        const auto outcome = detail::run_method(method, scenario, pipeline);
        const auto stop = std::chrono::steady_clock::now();

        MetricRecord r;
        r.method = method;
        r.l = l;
        r.case_id = options.case_id;
        r.rep = rep;
        r.seed = pipeline.seed;
        r.proj_dist = projection_distance(outcome.scored_space, truth_space);
        r.misclass = misclassification_rate(outcome.labels, scenario.truth.community, config.k);
        r.lambda = outcome.lambda;
        if (options.record_timing)
          r.seconds = std::chrono::duration<double>(stop - start).count();
        records.push_back(std::move(r));
      }
    }
  }
  return records;
}

// Multi-layer real data: binary layers over one node universe sized by the
// labels file; label -1 marks nodes excluded from evaluation (kept in the
// matrices).
struct RealDataset {
  std::vector<BinaryNetwork> layers;
  std::vector<std::string> layer_names;
  std::vector<int> labels;  // -1 = unlabeled
  int n = 0;
  int k = 0;  // distinct observed labels
  EdgeListReport report;
};

inline RealDataset load_multilayer(const std::vector<std::string>& edge_files,
                                   const std::string& labels_file) {
  if (edge_files.empty()) throw std::invalid_argument("load_multilayer: no edge files");
  RealDataset d;
  d.labels = read_labels(labels_file);
  d.n = static_cast<int>(d.labels.size());
  if (d.n < 2) throw std::runtime_error(labels_file + ": need at least two nodes");

  std::set<int> distinct;
  for (int l : d.labels) {
    if (l >= 0) distinct.insert(l);
  }
  // Remap observed labels onto 0..k-1 in sorted order.
  std::map<int, int> remap;
  for (int l : distinct) remap[l] = static_cast<int>(remap.size());
  for (auto& l : d.labels) {
    if (l >= 0) l = remap[l];
  }
  d.k = static_cast<int>(distinct.size());

  for (const auto& file : edge_files) {
    EdgeListReport rep;
    d.layers.push_back(edges_to_network(read_edge_list(file), d.n, &rep));
    d.report.self_loops_dropped += rep.self_loops_dropped;
    d.report.duplicates_dropped += rep.duplicates_dropped;
    d.layer_names.push_back(std::filesystem::path(file).stem().string());
  }
  return d;
}

// Misclassification restricted to labeled nodes.
inline double labeled_misclassification(const std::vector<int>& est, const std::vector<int>& truth,
                                        int k) {
  std::vector<int> est_sub, truth_sub;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= 0) {
      est_sub.push_back(est[i]);
      truth_sub.push_back(truth[i]);
    }
  }
  if (est_sub.empty()) throw std::invalid_argument("labeled_misclassification: no labeled nodes");
  return misclassification_rate(est_sub, truth_sub, k);
}

struct RealdataOptions {
  std::vector<double> q0_sweep;
  std::vector<double> source_q;  // one per non-target layer, in layer order
  int k = 2;
  int reps = 10;
  std::uint64_t seed = 42;
  unsigned methods = kRunAdaw | kRunEw | kRunSsc;
  PipelineConfig pipeline;
  bool record_timing = false;
};

// Privacy-aware protocol on real layers: the target layer is perturbed at
// each q0 in the sweep, sources at their fixed levels, fresh draws per
// replication.
inline std::vector<MetricRecord> run_realdata(const RealDataset& dataset, int target_layer,
                                              const RealdataOptions& options) {
  const int layer_count = static_cast<int>(dataset.layers.size());
  if (target_layer < 0 || target_layer >= layer_count)
    throw std::invalid_argument("run_realdata: target layer out of range");
  if (options.source_q.size() != static_cast<std::size_t>(layer_count - 1))
    throw std::invalid_argument("run_realdata: need one source q per non-target layer");
  if (options.q0_sweep.empty()) throw std::invalid_argument("run_realdata: empty q0 sweep");
  if (options.k < 2 || options.k < dataset.k)
    throw std::invalid_argument("run_realdata: k must cover the observed labels");

  const std::vector<std::pair<const char*, unsigned>> methods = {
      {kMethodAdaw, kRunAdaw}, {kMethodEw, kRunEw}, {kMethodDsc, kRunDsc}, {kMethodSsc, kRunSsc}};
  std::vector<MetricRecord> records;

  for (std::size_t qi = 0; qi < options.q0_sweep.size(); ++qi) {
    const double q0 = options.q0_sweep[qi];
    for (int rep = 0; rep < options.reps; ++rep) {
      const std::uint64_t rep_seed = derive_seed(
          options.seed, {kStreamReplication, static_cast<std::uint64_t>(target_layer),
                         static_cast<std::uint64_t>(qi), static_cast<std::uint64_t>(rep)});

      Scenario scenario;
      scenario.k = options.k;
      scenario.target_params = PrivacyParams{q0, q0};
      scenario.target = randomized_response(dataset.layers[static_cast<std::size_t>(target_layer)],
                                            scenario.target_params, derive_seed(rep_seed, {kStreamRr, 0}));
      int src_index = 0;
      for (int layer = 0; layer < layer_count; ++layer) {
        if (layer == target_layer) continue;
        const double q = options.source_q[static_cast<std::size_t>(src_index)];
        const PrivacyParams params{q, q};
        scenario.sources.push_back(randomized_response(
            dataset.layers[static_cast<std::size_t>(layer)], params,
            derive_seed(rep_seed, {kStreamRr, static_cast<std::uint64_t>(layer + 1)})));
        scenario.source_params.push_back(params);
        ++src_index;
      }

      for (const auto& [method, flag] : methods) {
        if (!(options.methods & flag)) continue;
        PipelineConfig pipeline = options.pipeline;
        pipeline.k = options.k;
        pipeline.seed = derive_seed(rep_seed, {detail::method_stream(method)});

        const auto start = std::chrono::steady_clock::now();
        const auto outcome = detail::run_method(method, scenario, pipeline);
        const auto stop = std::chrono::steady_clock::now();

        MetricRecord r;
        r.method = method;
        r.l = layer_count - 1;
        r.case_id = dataset.layer_names[static_cast<std::size_t>(target_layer)] + ":q0=" +
                    format_double(q0);
        r.rep = rep;
        r.seed = pipeline.seed;
        r.proj_dist = std::numeric_limits<double>::quiet_NaN();
        r.misclass = labeled_misclassification(outcome.labels, dataset.labels, options.k);
        r.lambda = outcome.lambda;
        if (options.record_timing)
          r.seconds = std::chrono::duration<double>(stop - start).count();
        records.push_back(std::move(r));
      }
    }
  }
  return records;
}

namespace detail {

struct SeriesKey {
  std::string method;
  double x;
};

inline std::vector<PlotSeries> mean_series(const std::vector<MetricRecord>& records,
                                           double (*metric)(const MetricRecord&),
                                           double (*x_of)(const MetricRecord&)) {
  std::map<std::string, std::map<double, std::pair<double, int>>> acc;
  for (const auto& r : records) {
    const double v = metric(r);
    if (!std::isfinite(v)) continue;
    auto& cell = acc[r.method][x_of(r)];
    cell.first += v;
    cell.second += 1;
  }
  std::vector<PlotSeries> series;
  for (const auto& [method, by_x] : acc) {
    PlotSeries s;
    s.name = method;
    for (const auto& [x, cell] : by_x) s.points.emplace_back(x, cell.first / cell.second);
    series.push_back(std::move(s));
  }
  return series;
}

inline double x_from_l(const MetricRecord& r) { return static_cast<double>(r.l); }

inline double x_from_q0(const MetricRecord& r) {
  const auto pos = r.case_id.rfind("q0=");
  if (pos == std::string::npos) return std::numeric_limits<double>::quiet_NaN();
  return parse_double(r.case_id.substr(pos + 3));
}

}  // namespace detail

// One chart per (case, metric): mean metric per method, x = L for simulated
// sweeps or x = q0 for the real-data protocol. The CSV next to the charts is
// always emitted by the callers.
inline std::vector<std::string> emit_plots(const std::vector<MetricRecord>& records,
                                           const std::string& out_dir, bool x_is_q0 = false) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::map<std::string, std::vector<MetricRecord>> by_case;
  for (const auto& r : records) {
    std::string key = r.case_id;
    if (x_is_q0) {
      const auto pos = key.rfind(":q0=");
      if (pos != std::string::npos) key = key.substr(0, pos);
    }
    by_case[key].push_back(r);
  }

  const auto x_of = x_is_q0 ? detail::x_from_q0 : detail::x_from_l;
  const std::string x_label = x_is_q0 ? "q0" : "L";
  std::vector<std::string> written;
  for (const auto& [case_key, rs] : by_case) {
    const struct {
      const char* name;
      double (*metric)(const MetricRecord&);
    } metrics[] = {
        {"proj_dist", [](const MetricRecord& r) { return r.proj_dist; }},
        {"misclass", [](const MetricRecord& r) { return r.misclass; }},
    };
    for (const auto& m : metrics) {
      auto series = detail::mean_series(rs, m.metric, x_of);
      if (series.empty()) continue;
      std::string safe = case_key;
      for (auto& ch : safe) {
        if (ch == ':' || ch == '/' || ch == ' ') ch = '_';
      }
      const std::string path = (fs::path(out_dir) / ("plot_" + safe + "_" + m.name + ".svg")).string();
      write_line_chart(path, case_key + " - " + m.name, x_label, m.name, series);
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace transnet
