#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace hankelwave {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Vector3 = Eigen::Vector3d;

// One time-stamped 6-axis IMU frame (Eq. 1 accelerations, gyro rates).
struct ImuSample {
  double t = 0.0;          // seconds
  Vector3 accel{0, 0, 0};  // m/s^2
  Vector3 gyro{0, 0, 0};   // rad/s
};

// A uniformly sampled multi-channel sensor stream.
struct SignalTrace {
  std::vector<ImuSample> samples;
  double fs = 0.0;  // Hz
  std::array<std::string, 6> channel_names{"ax", "ay", "az",
                                           "gx", "gy", "gz"};

  std::size_t size() const { return samples.size(); }
};

// Warm-up label emitted before the first full window is available.
inline constexpr int kWarmupLabel = -1;

// A trace plus per-sample ground-truth class ids (contiguous from 0).
struct LabeledTrace {
  SignalTrace trace;
  std::vector<int> labels;
};

// One scripted scenario segment: hold `state` for `duration_s` seconds.
struct ScenarioSegment {
  int state = 0;
  double duration_s = 0.0;
};

}  // namespace hankelwave
