// hankelwave CLI: simulate | filter | train | classify | evaluate
//
// All parameters come from one JSON config (see PipelineConfig) plus flag
// overrides. Exit codes: 0 success, 2 configuration error, 3 data error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>

#include "hankelwave/classify.hpp"
#include "hankelwave/errors.hpp"
#include "hankelwave/ingest.hpp"
#include "hankelwave/pipeline.hpp"
#include "hankelwave/serialization.hpp"
#include "hankelwave/trainer.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace hankelwave;

PipelineConfig load_config(const std::string& path, const std::string& kind) {
  if (!path.empty()) return PipelineConfig::load(path);
  PipelineConfig c;
  if (kind == "posture") {
    c.feature_mode = FeatureMode::kRawChannels;
    c.raw_channels = {0, 1, 2, 3, 4};
    c.osc.lambda1 = 0.1;
    c.osc.lambda2 = 0.3;
    c.osc.max_iter = 200;
  } else {
    c.feature_mode = FeatureMode::kFusedBraking;
    c.osc.lambda1 = 0.1;
    c.osc.lambda2 = 0.1;
    c.osc.max_iter = 200;
  }
  c.crc_lambda = 0.5;
  return c;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

int cmd_simulate(const std::string& kind, const std::string& scenario_path,
                 std::uint64_t seed, double fs, const std::string& out_path) {
  LabeledTrace lt;
  if (kind == "braking") {
    lt = synthesize_braking_trace(load_scenario(scenario_path), seed, fs);
  } else if (kind == "posture") {
    std::ifstream in(scenario_path);
    if (!in) throw IoError("cannot open scenario file: " + scenario_path);
    nlohmann::json j;
    in >> j;
    PostureOptions opts;
    opts.fs = fs;
    std::vector<int> script = j.at("script").get<std::vector<int>>();
    if (j.contains("dwell_s"))
      opts.dwell_s = j["dwell_s"].get<std::vector<double>>();
    lt = synthesize_posture_trace(script, seed, opts);
  } else {
    throw ParameterError("unknown simulation kind '" + kind + "'");
  }
  save_labeled_trace(lt, out_path);
  std::cout << "wrote " << lt.trace.size() << " samples to " << out_path
            << "\n";
  return 0;
}

int cmd_filter(const PipelineConfig& config, const std::string& in_path,
               const std::string& out_path) {
  SignalTrace trace = load_trace(in_path, config.fs);
  Matrix features = extract_features(trace, config);
  std::vector<int> labels(trace.size(), kWarmupLabel);
  emit_plot_data(trace, features, labels, out_path);
  std::cout << "wrote features for " << trace.size() << " samples to "
            << out_path << "\n";
  return 0;
}

int cmd_train(PipelineConfig config, const std::string& kind,
              const std::vector<std::string>& run_paths,
              const std::string& budgets_csv, const std::string& out_path) {
  ClusterSchedule schedule;
  TrainerConfig tc;
  tc.w = config.w;
  tc.stride = config.stride;
  tc.osc = config.osc;
  tc.crc_lambda = config.crc_lambda;
  tc.per_class = config.per_class;
  std::vector<std::string> channel_names;
  if (kind == "braking") {
    schedule.kind = ClusterSchedule::Kind::kBrakingNested;
    tc.per_class_override = {32, 48, 12};
    channel_names = {"fused_pitch", "pitch_rate"};
    if (config.class_names.empty())
      config.class_names = {"cruise", "normal", "sudden"};
  } else if (kind == "posture") {
    schedule.kind = ClusterSchedule::Kind::kPostureGesture;
    tc.per_class_override.assign(5, 12);
    tc.per_class_override.insert(tc.per_class_override.end(), 8, 20);
    for (int ch : config.raw_channels)
      channel_names.push_back("c" + std::to_string(ch));
  } else {
    throw ParameterError("unknown training kind '" + kind + "'");
  }
  if (!budgets_csv.empty()) tc.per_class_override = parse_int_list(budgets_csv);

  std::vector<Matrix> runs;
  for (const auto& p : run_paths)
    runs.push_back(extract_features(load_trace(p, config.fs), config));
  LabeledDictionary dict =
      distill_dictionary(runs, schedule, tc, channel_names);

  nlohmann::json prov;
  prov["kind"] = kind;
  prov["runs"] = run_paths;
  prov["config"] = nlohmann::json::parse(config.to_json());
  save_dictionary(dict, out_path, prov.dump(2));
  std::cout << "wrote dictionary (" << dict.A.cols() << " atoms, "
            << dict.num_classes() << " classes) to " << out_path << "\n";
  return 0;
}

int cmd_classify(const PipelineConfig& config, const std::string& dict_path,
                 const std::string& in_path, const std::string& out_path) {
  LabeledDictionary dict = load_dictionary(dict_path);
  ProjectionOperator op = crc_precompute(dict, config.crc_lambda);
  SignalTrace trace = load_trace(in_path, config.fs);

  // Stream and also emit the per-window result rows.
  Matrix features = extract_features(trace, config);
  Matrix scaled = apply_channel_scales(features, dict.channel_scale);
  std::vector<double> times(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) times[i] = trace.samples[i].t;
  TrainingMatrix tm = slide_windows(scaled, times, config.w, 1);
  normalize_columns(tm);

  std::ofstream out(out_path);
  if (!out) throw IoError("cannot write results: " + out_path);
  out << "t_end,label";
  for (int i = 0; i < dict.num_classes(); ++i) out << ",r_" << i;
  out << ",margin,converged\n";
  for (int j = 0; j < tm.cols(); ++j) {
    const auto res = crc_classify(op, dict, tm.X.col(j));
    out << tm.column_times[j] << "," << res.label;
    for (int i = 0; i < dict.num_classes(); ++i) out << "," << res.residuals(i);
    out << "," << res.margin << "," << (res.converged ? 1 : 0) << "\n";
  }
  std::cout << "classified " << tm.cols() << " windows -> " << out_path
            << "\n";
  return 0;
}

int cmd_evaluate(const PipelineConfig& config, const std::string& dict_path,
                 const std::string& in_path, int band) {
  LabeledDictionary dict = load_dictionary(dict_path);
  ProjectionOperator op = crc_precompute(dict, config.crc_lambda);
  LabeledTrace lt = load_labeled_trace(in_path, config.fs);
  std::vector<int> pred = run_stream(lt.trace, dict, op, config);
  if (band < 0) band = config.w / 2;
  EvaluationReport rep = evaluate(pred, lt.labels, dict.num_classes(), band);

  nlohmann::json j;
  j["total_decisions"] = rep.total_decisions;
  j["strict_accuracy"] = rep.strict_accuracy;
  j["lenient_accuracy"] = rep.lenient_accuracy;
  j["precision"] = rep.precision;
  j["recall"] = rep.recall;
  std::vector<std::vector<int>> cm;
  for (int r = 0; r < rep.confusion.rows(); ++r) {
    std::vector<int> row;
    for (int c = 0; c < rep.confusion.cols(); ++c)
      row.push_back(rep.confusion(r, c));
    cm.push_back(row);
  }
  j["confusion"] = cm;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("HANKELWAVE_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) {
      Eigen::setNbThreads(n);
#ifdef _OPENMP
      omp_set_num_threads(n);
#endif
    }
  }

  CLI::App app{"hankelwave: maneuver-state labeling from raw sensor streams"};
  app.require_subcommand(1);

  std::string config_path, kind = "braking", scenario, in_path, out_path,
              dict_path, budgets;
  std::uint64_t seed = 0;
  double fs = 20.0;
  int band = -1;
  std::vector<std::string> run_paths;

  auto* sim = app.add_subcommand("simulate", "synthesize a labeled trace");
  sim->add_option("--kind", kind, "braking|posture");
  sim->add_option("--scenario", scenario, "scenario JSON")->required();
  sim->add_option("--seed", seed, "random seed");
  sim->add_option("--fs", fs, "sampling rate (Hz)");
  sim->add_option("--out", out_path, "output CSV")->required();

  auto* fil = app.add_subcommand("filter", "fuse a trace into features");
  fil->add_option("--config", config_path, "pipeline config JSON");
  fil->add_option("--kind", kind, "preset when no config given");
  fil->add_option("--in", in_path, "input trace CSV")->required();
  fil->add_option("--out", out_path, "output CSV")->required();

  auto* tra = app.add_subcommand("train", "distill a class dictionary");
  tra->add_option("--config", config_path, "pipeline config JSON");
  tra->add_option("--kind", kind, "braking|posture");
  tra->add_option("--run", run_paths, "training trace CSV (repeatable)")
      ->required();
  tra->add_option("--budgets", budgets, "per-class FPS budgets, comma list");
  tra->add_option("--out", out_path, "output dictionary file")->required();

  auto* cla = app.add_subcommand("classify", "label a trace against a dictionary");
  cla->add_option("--config", config_path, "pipeline config JSON");
  cla->add_option("--kind", kind, "preset when no config given");
  cla->add_option("--dict", dict_path, "dictionary file")->required();
  cla->add_option("--in", in_path, "input trace CSV")->required();
  cla->add_option("--out", out_path, "results CSV")->required();

  auto* eva = app.add_subcommand("evaluate", "score predictions on a labeled trace");
  eva->add_option("--config", config_path, "pipeline config JSON");
  eva->add_option("--kind", kind, "preset when no config given");
  eva->add_option("--dict", dict_path, "dictionary file")->required();
  eva->add_option("--in", in_path, "labeled trace CSV")->required();
  eva->add_option("--band", band, "lenient boundary band (samples)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(kind, scenario, seed, fs, out_path);
    const PipelineConfig config = load_config(config_path, kind);
    if (fil->parsed()) return cmd_filter(config, in_path, out_path);
    if (tra->parsed())
      return cmd_train(config, kind, run_paths, budgets, out_path);
    if (cla->parsed())
      return cmd_classify(config, dict_path, in_path, out_path);
    if (eva->parsed()) return cmd_evaluate(config, dict_path, in_path, band);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
