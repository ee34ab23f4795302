#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "hankelwave/classify.hpp"
#include "hankelwave/errors.hpp"
#include "hankelwave/ingest.hpp"
#include "hankelwave/pipeline.hpp"
#include "hankelwave/trainer.hpp"

using namespace hankelwave;

namespace {

PipelineConfig posture_config() {
  PipelineConfig c;
  c.feature_mode = FeatureMode::kRawChannels;
  c.raw_channels = {0, 1, 2, 3, 4};
  c.osc = OscParams{0.1, 0.3, 1.0, 1e-4, 200};
  return c;
}

// Small posture dictionary trained on short runs; shared by the streaming
// tests (training is the slow part).
struct SmallModel {
  LabeledDictionary dict;
  ProjectionOperator op;
  PipelineConfig config = posture_config();

  SmallModel() {
    std::vector<Matrix> runs;
    PostureOptions opts;
    for (int p = 0; p < 5; ++p) {
      opts.dwell_s = {6.0};
      runs.push_back(
          extract_features(synthesize_posture_trace({p}, 100 + p, opts).trace,
                           config));
    }
    for (const auto& [a, b] : gesture_pairs()) {
      opts.dwell_s = {3.2, 2.4, 3.2, 2.4, 3.2};
      runs.push_back(extract_features(
          synthesize_posture_trace({a, b, a, b, a}, 200 + gesture_id(a, b), opts)
              .trace,
          config));
    }
    TrainerConfig tc;
    tc.osc = config.osc;
    tc.per_class_override.assign(5, 12);
    tc.per_class_override.insert(tc.per_class_override.end(), 8, 20);
    ClusterSchedule sched;
    sched.kind = ClusterSchedule::Kind::kPostureGesture;
    dict = distill_dictionary(runs, sched, tc);
    op = crc_precompute(dict, config.crc_lambda);
  }
};

const SmallModel& small_model() {
  static SmallModel m;
  return m;
}

}  // namespace

TEST_CASE("PipelineConfig: JSON round trip") {
  PipelineConfig c = posture_config();
  c.w = 24;
  c.crc_lambda = 0.25;
  c.class_names = {"x", "y"};
  const PipelineConfig back = PipelineConfig::from_json(c.to_json());
  CHECK(back.w == 24);
  CHECK(back.crc_lambda == doctest::Approx(0.25));
  CHECK(back.feature_mode == FeatureMode::kRawChannels);
  CHECK(back.raw_channels == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(back.osc.lambda2 == doctest::Approx(0.3));
  CHECK(back.class_names == std::vector<std::string>{"x", "y"});
}

TEST_CASE("PipelineConfig: file round trip and IO errors") {
  PipelineConfig c;
  const std::string path = "/tmp/hw_test_config.json";
  c.save(path);
  const PipelineConfig back = PipelineConfig::load(path);
  CHECK(back.fs == doctest::Approx(20.0));
  std::remove(path.c_str());
  CHECK_THROWS_AS(PipelineConfig::load("/tmp/hw_no_such_config.json"), IoError);
  CHECK_THROWS_AS(PipelineConfig::from_json("{not json"), ConfigError);
}

TEST_CASE("PipelineConfig: validation") {
  PipelineConfig c;
  c.version = 99;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = PipelineConfig{};
  c.w = 1;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = PipelineConfig{};
  c.feature_mode = FeatureMode::kRawChannels;  // raw_channels empty
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = PipelineConfig{};
  c.butter_cutoff = 15.0;  // above Nyquist at fs=20
  CHECK_THROWS_AS(c.validate(), ParameterError);
}

TEST_CASE("extract_features: shapes per mode") {
  const auto braking = synthesize_braking_trace({{0, 4.0}}, 1);
  PipelineConfig cb;  // default: fused braking features
  const Matrix fb = extract_features(braking.trace, cb);
  CHECK(fb.rows() == 2);
  CHECK(fb.cols() == long(braking.trace.size()));

  const auto posture = synthesize_posture_trace({0, 1}, 1);
  const Matrix fp = extract_features(posture.trace, posture_config());
  CHECK(fp.rows() == 5);
  CHECK(fp.cols() == long(posture.trace.size()));

  PipelineConfig wrong_fs = posture_config();
  wrong_fs.fs = 50.0;
  CHECK_THROWS_AS(extract_features(posture.trace, wrong_fs), ConfigError);
}

TEST_CASE("run_stream: one label per sample, warm-up prefix") {
  const auto& m = small_model();
  const auto lt = synthesize_posture_trace({0, 1, 0}, 31);
  const auto labels = run_stream(lt.trace, m.dict, m.op, m.config);
  REQUIRE(labels.size() == lt.trace.size());
  for (int i = 0; i < m.config.w - 1; ++i) CHECK(labels[i] == kWarmupLabel);
  CHECK(labels[m.config.w - 1] != kWarmupLabel);
  // Mid-dwell samples carry the dwell posture (dwell 1 spans 100..159).
  CHECK(labels[40] == 0);
  CHECK(labels[130] == 1);
}

TEST_CASE("StreamRunner: chunked equals whole-trace") {
  const auto& m = small_model();
  const auto lt = synthesize_posture_trace({2, 3, 4}, 57);
  const auto whole = run_stream(lt.trace, m.dict, m.op, m.config);

  for (std::size_t chunk : {1u, 7u, 64u}) {
    StreamRunner runner(m.dict, m.op, m.config);
    std::vector<int> got;
    for (std::size_t at = 0; at < lt.trace.size(); at += chunk) {
      SignalTrace part;
      part.fs = lt.trace.fs;
      for (std::size_t i = at; i < std::min(at + chunk, lt.trace.size()); ++i)
        part.samples.push_back(lt.trace.samples[i]);
      const auto lab = runner.feed(part);
      got.insert(got.end(), lab.begin(), lab.end());
    }
    CHECK(got == whole);
  }
}

TEST_CASE("StreamRunner: dictionary/config mismatch is a ConfigError") {
  const auto& m = small_model();
  PipelineConfig wrong = m.config;
  wrong.w = 24;
  CHECK_THROWS_AS(StreamRunner(m.dict, m.op, wrong), ConfigError);
  PipelineConfig braking;  // 2-channel fused mode vs 5-channel dictionary
  CHECK_THROWS_AS(StreamRunner(m.dict, m.op, braking), ConfigError);
}

TEST_CASE("evaluate: strict and lenient scoring") {
  // Truth switches 0->1 at sample 10; prediction lags by 2 samples and has
  // one isolated far-from-boundary error at sample 20.
  std::vector<int> truth(30, 0), pred(30, 0);
  for (int i = 10; i < 30; ++i) truth[i] = 1;
  for (int i = 12; i < 30; ++i) pred[i] = 1;
  pred[20] = 0;
  pred[0] = kWarmupLabel;  // excluded from scoring
  const auto rep = evaluate(pred, truth, 2, 3);
  CHECK(rep.total_decisions == 29);
  // Strict errors: samples 10, 11 (lag) and 20.
  CHECK(rep.strict_accuracy == doctest::Approx(26.0 / 29.0));
  // The lag sits within band 3 of the transition and predicts an adjacent
  // label, so only sample 20 counts against the lenient score.
  CHECK(rep.lenient_accuracy == doctest::Approx(28.0 / 29.0));
  CHECK(rep.confusion(1, 0) == 3);
  REQUIRE(rep.misclassified_runs.size() == 2);
  CHECK(rep.misclassified_runs[0].begin == 10);
  CHECK(rep.misclassified_runs[0].end == 12);
  CHECK(rep.misclassified_runs[1].begin == 20);
}

TEST_CASE("evaluate: validation") {
  CHECK_THROWS_AS(evaluate({0, 1}, {0}, 2), ShapeError);
  CHECK_THROWS_AS(evaluate({0, 1}, {0, 1}, 0), ParameterError);
  CHECK_THROWS_AS(evaluate({0, 5}, {0, 1}, 2), ShapeError);
}

TEST_CASE("emit_plot_data: tidy CSV with header") {
  const auto lt = synthesize_braking_trace({{0, 2.0}}, 3);
  PipelineConfig c;
  const Matrix f = extract_features(lt.trace, c);
  const std::string path = "/tmp/hw_test_plot.csv";
  emit_plot_data(lt.trace, f, lt.labels, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.find("t,") == 0);
  CHECK(header.find("label") != std::string::npos);
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == int(lt.trace.size()));
  std::remove(path.c_str());
}
