#include "hankelwave/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "hankelwave/errors.hpp"

namespace hankelwave {

void PipelineConfig::validate() const {
  if (version != 1)
    throw ConfigError("unsupported config version " + std::to_string(version));
  if (!(fs > 0.0)) throw ParameterError("config: fs must be positive");
  if (w < 2) throw ParameterError("config: w must be >= 2");
  if (stride < 1) throw ParameterError("config: stride must be >= 1");
  if (feature_mode == FeatureMode::kRawChannels) {
    if (raw_channels.empty())
      throw ParameterError("config: raw_channels empty in raw mode");
    for (int ch : raw_channels)
      if (ch < 0 || ch > 5)
        throw ParameterError("config: raw channel index out of range");
  } else {
    if (!(butter_cutoff > 0.0) || !(butter_cutoff < fs / 2.0))
      throw ParameterError("config: butter_cutoff must be in (0, fs/2)");
    FilterGains g = gains;
    g.fs = fs;
    g.validate();
  }
  osc.validate();
  if (!(crc_lambda > 0.0))
    throw ParameterError("config: crc_lambda must be positive");
  if (per_class < 1) throw ParameterError("config: per_class must be >= 1");
}

std::string PipelineConfig::to_json() const {
  nlohmann::json j;
  j["version"] = version;
  j["fs"] = fs;
  j["w"] = w;
  j["stride"] = stride;
  j["feature_mode"] = feature_mode == FeatureMode::kFusedBraking
                          ? "fused_braking"
                          : "raw_channels";
  j["raw_channels"] = raw_channels;
  j["gains"] = {{"Kp", gains.Kp}, {"Ki", gains.Ki}};
  j["butter_cutoff"] = butter_cutoff;
  j["osc"] = {{"lambda1", osc.lambda1}, {"lambda2", osc.lambda2},
              {"rho", osc.rho},         {"tol", osc.tol},
              {"max_iter", osc.max_iter}};
  j["crc_lambda"] = crc_lambda;
  j["per_class"] = per_class;
  j["class_names"] = class_names;
  return j.dump(2);
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config JSON parse error: ") + e.what());
  }
  PipelineConfig c;
  try {
    c.version = j.value("version", 1);
    c.fs = j.value("fs", c.fs);
    c.w = j.value("w", c.w);
    c.stride = j.value("stride", c.stride);
    const std::string mode = j.value("feature_mode", "fused_braking");
    if (mode == "fused_braking")
      c.feature_mode = FeatureMode::kFusedBraking;
    else if (mode == "raw_channels")
      c.feature_mode = FeatureMode::kRawChannels;
    else
      throw ConfigError("unknown feature_mode '" + mode + "'");
    c.raw_channels = j.value("raw_channels", c.raw_channels);
    if (j.contains("gains")) {
      c.gains.Kp = j["gains"].value("Kp", c.gains.Kp);
      c.gains.Ki = j["gains"].value("Ki", c.gains.Ki);
    }
    c.butter_cutoff = j.value("butter_cutoff", c.butter_cutoff);
    if (j.contains("osc")) {
      const auto& o = j["osc"];
      c.osc.lambda1 = o.value("lambda1", c.osc.lambda1);
      c.osc.lambda2 = o.value("lambda2", c.osc.lambda2);
      c.osc.rho = o.value("rho", c.osc.rho);
      c.osc.tol = o.value("tol", c.osc.tol);
      c.osc.max_iter = o.value("max_iter", c.osc.max_iter);
    }
    c.crc_lambda = j.value("crc_lambda", c.crc_lambda);
    c.per_class = j.value("per_class", c.per_class);
    c.class_names = j.value("class_names", c.class_names);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config JSON schema error: ") + e.what());
  }
  c.gains.fs = c.fs;
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

void PipelineConfig::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file: " + path);
  out << to_json() << "\n";
}

Matrix extract_features(const SignalTrace& trace, const PipelineConfig& config) {
  if (std::abs(trace.fs - config.fs) > 1e-9)
    throw ConfigError("trace sampling rate does not match config");
  if (config.feature_mode == FeatureMode::kFusedBraking) {
    FilterGains g = config.gains;
    g.fs = config.fs;
    return fuse_braking_features(trace, g, config.butter_cutoff);
  }
  const int n = static_cast<int>(trace.size());
  Matrix out(config.raw_channels.size(), n);
  for (int i = 0; i < n; ++i) {
    const auto& s = trace.samples[i];
    for (std::size_t r = 0; r < config.raw_channels.size(); ++r) {
      const int ch = config.raw_channels[r];
      out(r, i) = ch < 3 ? s.accel(ch) : s.gyro(ch - 3);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// StreamRunner
// ---------------------------------------------------------------------------

StreamRunner::StreamRunner(const LabeledDictionary& dict,
                           const ProjectionOperator& op,
                           const PipelineConfig& config)
    : dict_(dict),
      op_(op),
      config_(config),
      fuser_([&config] {
        FilterGains g = config.gains;
        g.fs = config.fs;
        // Raw mode never steps the fuser but it must construct validly.
        return ComplementaryFilter(
            g, config.feature_mode == FeatureMode::kFusedBraking
                   ? config.butter_cutoff
                   : config.fs / 4.0);
      }()) {
  config_.validate();
  const int c = config_.feature_mode == FeatureMode::kFusedBraking
                    ? 2
                    : static_cast<int>(config_.raw_channels.size());
  if (dict_.w != config_.w)
    throw ConfigError("dictionary window width does not match config");
  if (dict_.c != c)
    throw ConfigError("dictionary channel count does not match config");
  if (dict_.channel_scale.size() != c)
    throw ConfigError("dictionary standardization constants malformed");
  if (op_.fingerprint != dict_.fingerprint())
    throw ConfigError("projection operator does not match dictionary");
}

void StreamRunner::reset() {
  fuser_.reset();
  window_.clear();
  samples_seen_ = 0;
}

std::vector<int> StreamRunner::feed(const SignalTrace& chunk) {
  if (std::abs(chunk.fs - config_.fs) > 1e-9)
    throw ConfigError("chunk sampling rate does not match config");
  const int c = dict_.c;
  std::vector<int> labels;
  labels.reserve(chunk.size());
  for (const auto& s : chunk.samples) {
    Vector feat(c);
    if (config_.feature_mode == FeatureMode::kFusedBraking) {
      const auto est = fuser_.step(s);
      feat(0) = est.pitch;
      feat(1) = s.gyro.y();
    } else {
      for (int r = 0; r < c; ++r) {
        const int ch = config_.raw_channels[r];
        feat(r) = ch < 3 ? s.accel(ch) : s.gyro(ch - 3);
      }
    }
    feat = feat.cwiseQuotient(dict_.channel_scale);
    window_.push_back(feat);
    if (static_cast<int>(window_.size()) > config_.w) window_.pop_front();
    ++samples_seen_;
    if (static_cast<int>(window_.size()) < config_.w) {
      labels.push_back(kWarmupLabel);
      continue;
    }
    Vector y(static_cast<long>(config_.w) * c);
    for (int ch = 0; ch < c; ++ch)
      for (int i = 0; i < config_.w; ++i)
        y(static_cast<long>(ch) * config_.w + i) = window_[i](ch);
    const double nrm = y.norm();
    if (nrm == 0.0)
      throw DegenerateInputError("run_stream: zero feature window");
    y /= nrm;
    labels.push_back(crc_classify(op_, dict_, y).label);
  }
  return labels;
}

std::vector<int> run_stream(const SignalTrace& trace,
                            const LabeledDictionary& dict,
                            const ProjectionOperator& op,
                            const PipelineConfig& config) {
  StreamRunner runner(dict, op, config);
  return runner.feed(trace);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

EvaluationReport evaluate(const std::vector<int>& predicted,
                          const std::vector<int>& truth, int num_classes,
                          int band) {
  if (predicted.size() != truth.size())
    throw ShapeError("evaluate: length mismatch");
  if (num_classes < 1) throw ParameterError("evaluate: bad class count");
  const int n = static_cast<int>(truth.size());

  std::vector<int> transitions;
  for (int i = 0; i + 1 < n; ++i)
    if (truth[i] != truth[i + 1]) transitions.push_back(i);

  EvaluationReport rep;
  rep.confusion = Eigen::MatrixXi::Zero(num_classes, num_classes);
  long strict_ok = 0, lenient_ok = 0;
  for (int i = 0; i < n; ++i) {
    const int p = predicted[i];
    if (p == kWarmupLabel) continue;
    if (p < 0 || p >= num_classes || truth[i] < 0 || truth[i] >= num_classes)
      throw ShapeError("evaluate: label out of range at sample " +
                       std::to_string(i));
    ++rep.total_decisions;
    rep.confusion(truth[i], p) += 1;
    if (p == truth[i]) {
      ++strict_ok;
      ++lenient_ok;
      continue;
    }
    bool forgiven = false;
    for (int tr : transitions) {
      if (std::abs(i - tr) <= band &&
          (p == truth[tr] || p == truth[tr + 1])) {
        forgiven = true;
        break;
      }
    }
    if (forgiven) ++lenient_ok;
  }
  if (rep.total_decisions > 0) {
    rep.strict_accuracy = static_cast<double>(strict_ok) / rep.total_decisions;
    rep.lenient_accuracy =
        static_cast<double>(lenient_ok) / rep.total_decisions;
  }

  rep.precision.assign(num_classes, 0.0);
  rep.recall.assign(num_classes, 0.0);
  for (int cls = 0; cls < num_classes; ++cls) {
    const long col = rep.confusion.col(cls).sum();
    const long row = rep.confusion.row(cls).sum();
    if (col > 0)
      rep.precision[cls] = static_cast<double>(rep.confusion(cls, cls)) / col;
    if (row > 0)
      rep.recall[cls] = static_cast<double>(rep.confusion(cls, cls)) / row;
  }

  // Contiguous strict-mismatch runs.
  int i = 0;
  while (i < n) {
    if (predicted[i] == kWarmupLabel || predicted[i] == truth[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < n && predicted[j] == predicted[i] && truth[j] == truth[i]) ++j;
    rep.misclassified_runs.push_back({i, j, truth[i], predicted[i]});
    i = j;
  }
  return rep;
}

void emit_plot_data(const SignalTrace& trace, const Matrix& features,
                    const std::vector<int>& labels, const std::string& path) {
  const int n = static_cast<int>(trace.size());
  if (features.cols() != n || static_cast<int>(labels.size()) != n)
    throw ShapeError("emit_plot_data: length mismatch");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write plot data: " + path);
  out << "t,ax,ay,az,gx,gy,gz";
  for (long r = 0; r < features.rows(); ++r) out << ",f" << r;
  out << ",label\n";
  char buf[64];
  for (int i = 0; i < n; ++i) {
    const auto& s = trace.samples[i];
    std::snprintf(buf, sizeof(buf), "%.9f", s.t);
    out << buf;
    const double vals[6] = {s.accel.x(), s.accel.y(), s.accel.z(),
                            s.gyro.x(),  s.gyro.y(),  s.gyro.z()};
    for (double v : vals) {
      std::snprintf(buf, sizeof(buf), ",%.9f", v);
      out << buf;
    }
    for (long r = 0; r < features.rows(); ++r) {
      std::snprintf(buf, sizeof(buf), ",%.9f", features(r, i));
      out << buf;
    }
    out << "," << labels[i] << "\n";
  }
}

}  // namespace hankelwave
