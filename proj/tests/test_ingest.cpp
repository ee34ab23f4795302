#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "hankelwave/errors.hpp"
#include "hankelwave/ingest.hpp"

using namespace hankelwave;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/hw_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& text) {
    std::ofstream out(path);
    out << text;
  }
};

}  // namespace

TEST_CASE("trace CSV round trip") {
  SignalTrace t;
  t.fs = 20.0;
  for (int i = 0; i < 40; ++i) {
    ImuSample s;
    s.t = i / 20.0;
    s.accel = Vector3{0.1 * i, -0.2, 9.81};
    s.gyro = Vector3{0.01, 0.5 * std::sin(i * 0.3), 0};
    t.samples.push_back(s);
  }
  TempFile f("roundtrip.csv");
  save_trace(t, f.path);
  const SignalTrace back = load_trace(f.path, 20.0);
  REQUIRE(back.size() == t.size());
  CHECK(back.fs == doctest::Approx(20.0));
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(back.samples[i].t == doctest::Approx(t.samples[i].t));
    CHECK((back.samples[i].accel - t.samples[i].accel).norm() ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK((back.samples[i].gyro - t.samples[i].gyro).norm() ==
          doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("labeled trace CSV round trip") {
  LabeledTrace lt;
  lt.trace.fs = 20.0;
  for (int i = 0; i < 25; ++i) {
    ImuSample s;
    s.t = i / 20.0;
    s.accel = Vector3{0, 0, 9.81};
    lt.trace.samples.push_back(s);
    lt.labels.push_back(i < 10 ? 0 : 1);
  }
  TempFile f("labeled.csv");
  save_labeled_trace(lt, f.path);
  const LabeledTrace back = load_labeled_trace(f.path, 20.0);
  CHECK(back.labels == lt.labels);
}

TEST_CASE("load_trace: format and timing errors") {
  TempFile bad("bad.csv");
  bad.write("t,ax,ay,az,gx,gy,gz\n0.0,1,2\n");
  CHECK_THROWS_AS(load_trace(bad.path, 20.0), FormatError);

  TempFile empty("empty.csv");
  empty.write("t,ax,ay,az,gx,gy,gz\n");
  CHECK_THROWS_AS(load_trace(empty.path, 20.0), FormatError);

  TempFile gap("gap.csv");
  gap.write(
      "t,ax,ay,az,gx,gy,gz\n"
      "0.00,0,0,9.81,0,0,0\n"
      "0.05,0,0,9.81,0,0,0\n"
      "0.30,0,0,9.81,0,0,0\n");  // 0.25 s gap at fs=20
  CHECK_THROWS_AS(load_trace(gap.path, 20.0), TimingError);

  CHECK_THROWS_AS(load_trace("/tmp/hw_does_not_exist.csv", 20.0), IoError);
}

TEST_CASE("scenario JSON round trip") {
  const std::vector<ScenarioSegment> script{{0, 6.0}, {1, 2.5}, {0, 4.0}};
  TempFile f("scenario.json");
  save_scenario(script, f.path);
  const auto back = load_scenario(f.path);
  REQUIRE(back.size() == 3);
  CHECK(back[1].state == 1);
  CHECK(back[1].duration_s == doctest::Approx(2.5));
}

TEST_CASE("synthesize_braking_trace: labels, length, determinism") {
  const std::vector<ScenarioSegment> script{{0, 6.0}, {1, 2.5}, {0, 4.0}};
  const auto a = synthesize_braking_trace(script, 42);
  const auto b = synthesize_braking_trace(script, 42);
  const auto c = synthesize_braking_trace(script, 43);
  CHECK(a.trace.size() == std::size_t(std::lround(12.5 * 20)));
  CHECK(a.labels.size() == a.trace.size());
  // Same seed -> bit-identical; different seed -> different noise.
  bool identical = true, differs = false;
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    identical &= a.trace.samples[i].accel == b.trace.samples[i].accel;
    differs |= a.trace.samples[i].accel != c.trace.samples[i].accel;
  }
  CHECK(identical);
  CHECK(differs);
  // Label stream follows the script.
  CHECK(a.labels.front() == 0);
  CHECK(a.labels[int(7.0 * 20)] == 1);
  CHECK(a.labels.back() == 0);
}

TEST_CASE("synthesize_braking_trace: cruise gravity is recovered") {
  const auto lt = synthesize_braking_trace({{0, 10.0}}, 1, 20.0,
                                           BrakingNoise{false, 0, 0, 0});
  // Noise off, flat cruise -> az ~ g, ax ~ small road texture only.
  for (const auto& s : lt.trace.samples) {
    CHECK(std::abs(s.accel.z() - 9.81) < 0.05);
    CHECK(std::abs(s.accel.x()) < 0.5);
  }
}

TEST_CASE("synthesize_braking_trace: scenario validation") {
  CHECK_THROWS_AS(synthesize_braking_trace({{5, 1.0}}, 0), ScenarioError);
  CHECK_THROWS_AS(synthesize_braking_trace({{0, -1.0}}, 0), ScenarioError);
  CHECK_THROWS_AS(synthesize_braking_trace({}, 0), ScenarioError);
}

TEST_CASE("posture direction tables are unit-norm and well separated") {
  for (int p = 0; p < 5; ++p) {
    double n = 0;
    for (int k = 0; k < 5; ++k)
      n += kPostureDirections[p][k] * kPostureDirections[p][k];
    CHECK(std::sqrt(n) == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int g = 0; g < 8; ++g) {
    double n = 0;
    for (int k = 0; k < 5; ++k)
      n += kGestureDirections[g][k] * kGestureDirections[g][k];
    CHECK(std::sqrt(n) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Mutual coherence across all 13 directions stays below 0.5.
  double coh = 0.0;
  auto dir = [](int i, int k) {
    return i < 5 ? kPostureDirections[i][k] : kGestureDirections[i - 5][k];
  };
  for (int i = 0; i < 13; ++i)
    for (int j = i + 1; j < 13; ++j) {
      double d = 0;
      for (int k = 0; k < 5; ++k) d += dir(i, k) * dir(j, k);
      coh = std::max(coh, std::abs(d));
    }
  CHECK(coh < 0.5);
}

TEST_CASE("gesture_id: trained pairs and documented fallbacks") {
  CHECK(gesture_id(0, 1) == 5);
  CHECK(gesture_id(1, 0) == 5);  // unordered
  CHECK(gesture_id(1, 2) == 6);
  CHECK(gesture_id(2, 3) == 7);
  CHECK(gesture_id(3, 4) == 8);
  CHECK(gesture_id(4, 0) == 9);
  CHECK(gesture_id(0, 2) == 10);
  CHECK(gesture_id(2, 4) == 11);
  CHECK(gesture_id(1, 3) == 12);
  // Unmapped pairs fall back to the nearest trained gesture.
  CHECK(gesture_id(0, 3) == 10);
  CHECK(gesture_id(1, 4) == 12);
  CHECK_THROWS_AS(gesture_id(0, 0), ScenarioError);
  CHECK_THROWS_AS(gesture_id(0, 7), ScenarioError);
  CHECK(gesture_pairs().size() == 8);
}

TEST_CASE("synthesize_posture_trace: structure and labels") {
  PostureOptions opts;
  opts.dwell_s = {3.0, 2.5};
  const auto lt = synthesize_posture_trace({0, 1}, 7, opts);
  // 3.0 s + 2.0 s gesture + 2.5 s at fs = 20.
  CHECK(lt.trace.size() == std::size_t(150));
  CHECK(lt.labels.front() == 0);
  CHECK(lt.labels.back() == 1);
  // Middle of the transition carries the gesture label.
  CHECK(lt.labels[60 + 20] == 5);
  // The five active channels live in (ax, ay, az, gx, gy); gz is silent.
  for (const auto& s : lt.trace.samples) CHECK(s.gyro.z() == 0.0);
  // Plateau mean matches the scaled posture direction on channel 0.
  double mean0 = 0.0;
  for (int i = 10; i < 50; ++i) mean0 += lt.trace.samples[i].accel.x();
  mean0 /= 40.0;
  CHECK(mean0 == doctest::Approx(kPostureAmplitude * kPostureDirections[0][0])
                     .epsilon(0.05));
}

TEST_CASE("synthesize_posture_trace: validation and determinism") {
  CHECK_THROWS_AS(synthesize_posture_trace({0, 0}, 1), ScenarioError);
  CHECK_THROWS_AS(synthesize_posture_trace({0, 6}, 1), ScenarioError);
  CHECK_THROWS_AS(synthesize_posture_trace({}, 1), ScenarioError);
  const auto a = synthesize_posture_trace({2, 3, 2}, 5);
  const auto b = synthesize_posture_trace({2, 3, 2}, 5);
  REQUIRE(a.trace.size() == b.trace.size());
  bool identical = true;
  for (std::size_t i = 0; i < a.trace.size(); ++i)
    identical &= a.trace.samples[i].accel == b.trace.samples[i].accel &&
                 a.trace.samples[i].gyro == b.trace.samples[i].gyro;
  CHECK(identical);
}
