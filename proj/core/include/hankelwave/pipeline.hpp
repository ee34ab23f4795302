#pragma once

#include <deque>
#include <string>
#include <vector>

#include "hankelwave/classify.hpp"
#include "hankelwave/fusion.hpp"
#include "hankelwave/trainer.hpp"
#include "hankelwave/types.hpp"

namespace hankelwave {

// ---------------------------------------------------------------------------
// Versioned pipeline configuration (JSON round-trippable)
// ---------------------------------------------------------------------------

enum class FeatureMode {
  kFusedBraking,  // {fused pitch, raw pitch rate} from 6-axis IMU input
  kRawChannels,   // selected raw trace channels (posture corpus)
};

struct PipelineConfig {
  int version = 1;
  double fs = 20.0;
  int w = 20;
  int stride = 1;
  FeatureMode feature_mode = FeatureMode::kFusedBraking;
  std::vector<int> raw_channels;  // for kRawChannels
  FilterGains gains;
  double butter_cutoff = 3.0;
  OscParams osc{0.1, 0.1, 1.0, 1e-4, 200};
  double crc_lambda = 0.5;
  int per_class = 30;
  std::vector<std::string> class_names;

  void validate() const;  // throws ConfigError

  std::string to_json() const;
  static PipelineConfig from_json(const std::string& text);
  static PipelineConfig load(const std::string& path);
  void save(const std::string& path) const;
};

// Feature extraction used by both training and streaming (batch form).
Matrix extract_features(const SignalTrace& trace, const PipelineConfig& config);

// ---------------------------------------------------------------------------
// Real-time loop: per-sample fusion -> ring buffer -> classification.
// One instance per stream; feeding a trace in chunks yields exactly the
// labels of feeding it whole.
// ---------------------------------------------------------------------------

class StreamRunner {
 public:
  StreamRunner(const LabeledDictionary& dict, const ProjectionOperator& op,
               const PipelineConfig& config);  // throws ConfigError on mismatch

  // Processes a chunk; returns one label per sample (kWarmupLabel until the
  // first full window is available).
  std::vector<int> feed(const SignalTrace& chunk);
  void reset();

 private:
  const LabeledDictionary& dict_;
  const ProjectionOperator& op_;
  PipelineConfig config_;
  ComplementaryFilter fuser_;
  std::deque<Vector> window_;  // last w feature columns
  long samples_seen_ = 0;
};

// Whole-trace convenience wrapper.
std::vector<int> run_stream(const SignalTrace& trace,
                            const LabeledDictionary& dict,
                            const ProjectionOperator& op,
                            const PipelineConfig& config);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct MisclassifiedRun {
  int begin = 0;  // sample index, inclusive
  int end = 0;    // past the end
  int truth = 0;
  int predicted = 0;
};

struct EvaluationReport {
  Eigen::MatrixXi confusion;  // k x k, rows = truth
  double strict_accuracy = 0.0;
  double lenient_accuracy = 0.0;
  int total_decisions = 0;
  std::vector<double> precision, recall;
  std::vector<MisclassifiedRun> misclassified_runs;  // strict scoring
};

// Scores non-warm-up samples. Lenient rule: a mismatch at sample i is
// forgiven when some true-label transition tr satisfies |i - tr| <= band and
// the prediction is one of the two labels adjacent to tr. The default band
// is w/2 at the default window (w = 20). Throws ShapeError on mismatch.
EvaluationReport evaluate(const std::vector<int>& predicted,
                          const std::vector<int>& truth, int num_classes,
                          int band = 10);

// Tidy CSV (t, raw channels, features, label) for plotting.
void emit_plot_data(const SignalTrace& trace, const Matrix& features,
                    const std::vector<int>& labels, const std::string& path);

}  // namespace hankelwave
