#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hankelwave/types.hpp"

namespace hankelwave {

// ---------------------------------------------------------------------------
// Trace I/O (CSV: t, ax, ay, az, gx, gy, gz [, label])
// ---------------------------------------------------------------------------

// Loads a CSV trace and validates uniform spacing against fs (1% tolerance).
// Throws FormatError (bad rows, empty file) or TimingError (non-uniform).
SignalTrace load_trace(const std::string& path, double fs);

void save_trace(const SignalTrace& trace, const std::string& path);

// Same CSV with a trailing integer `label` column.
LabeledTrace load_labeled_trace(const std::string& path, double fs);
void save_labeled_trace(const LabeledTrace& lt, const std::string& path);

// Scenario scripts as a JSON list of {"state": int, "duration_s": double}.
std::vector<ScenarioSegment> load_scenario(const std::string& path);
void save_scenario(const std::vector<ScenarioSegment>& script,
                   const std::string& path);

// ---------------------------------------------------------------------------
// Braking synthesis (cruise=0, normal brake=1, sudden brake=2)
// ---------------------------------------------------------------------------

struct BrakingNoise {
  bool enabled = true;
  double accel_sigma = 0.3;   // m/s^2
  double gyro_sigma = 0.02;   // rad/s
  double bias_range = 0.01;   // rad/s, constant bias drawn once per trace
};

// Deterministic synthetic Segway-style braking trace. Pitch excursions:
// normal braking is a smooth rise/hold/pumped-release profile; a
// (normal, sudden, normal) triple in the script becomes one compound
// sudden-stop event (lead shoulder, deep core, undershoot recovery), so
// sudden stops are embedded in traffic flow the way field data shows them.
// Gravity is projected through the instantaneous pitch so accel-derived
// angles recover the scripted tilt.
// Throws ScenarioError on unknown state ids or non-positive durations.
LabeledTrace synthesize_braking_trace(const std::vector<ScenarioSegment>& script,
                                      std::uint64_t seed, double fs = 20.0,
                                      const BrakingNoise& noise = {});

// ---------------------------------------------------------------------------
// Posture / gesture synthesis (postures 0..4, gestures 5..12)
// ---------------------------------------------------------------------------

struct PostureOptions {
  double fs = 20.0;
  double noise_sigma = 0.05;
  double gesture_s = 2.0;          // transition duration
  double ramp_fraction = 0.125;    // raised-cosine blend at each end
  std::vector<double> dwell_s;     // per-posture dwell; empty -> 3.0 s each
};

// Five fixed posture directions in R^5 held piecewise-constant, joined by
// smooth transition trajectories labeled as gestures: each transition ramps
// into a gesture-specific plateau direction and back out. 13 classes total.
// The five posture channels are stored in (ax, ay, az, gx, gy); gz is 0.
// Throws ScenarioError on repeated consecutive postures or ids outside 0..4.
LabeledTrace synthesize_posture_trace(const std::vector<int>& script,
                                      std::uint64_t seed,
                                      const PostureOptions& opts = {});

// Gesture class id for an unordered posture pair. Eight trained gestures:
//   {0,1}->5 {1,2}->6 {2,3}->7 {3,4}->8 {4,0}->9 {0,2}->10 {2,4}->11 {1,3}->12
// The two remaining pairs map onto the nearest trained gesture:
//   {0,3}->10, {1,4}->12.
int gesture_id(int a, int b);

// The eight trained (from, to) pairs in gesture-id order 5..12.
const std::vector<std::pair<int, int>>& gesture_pairs();

// Fixed direction tables (rows unit-norm before the 1.5 amplitude scale).
extern const double kPostureDirections[5][5];
extern const double kGestureDirections[8][5];
inline constexpr double kPostureAmplitude = 1.5;

}  // namespace hankelwave
