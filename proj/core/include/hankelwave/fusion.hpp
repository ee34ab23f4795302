#pragma once

#include <array>
#include <utility>

#include "hankelwave/types.hpp"

namespace hankelwave {

// ---------------------------------------------------------------------------
// Complementary filter (PI form): gyro branch s/(s^2+Kp*s+Ki) on the rate,
// accel branch (Kp*s+Ki)/(s^2+Kp*s+Ki) on the accel-derived angle; the two
// branches sum to the all-pass 1.
// ---------------------------------------------------------------------------

struct FilterGains {
  double Kp = 7.5924;  // 1/s
  double Ki = 20.7015; // 1/s^2
  double fs = 20.0;    // Hz

  void validate() const;  // throws ParameterError
};

// Second-order digital branches sharing one denominator, coefficients in
// powers of the unit delay d (index 0 = current sample).
struct DigitalFilterCoefficients {
  std::array<double, 3> b_gyro{};   // acts on the gyro rate (rad/s)
  std::array<double, 3> b_accel{};  // acts on the accel-derived angle (rad)
  std::array<double, 3> a{};        // a[0] == 1
  double fs = 0.0;
};

// Bilinear transform s <- 2*fs*(1-d)/(1+d) of both branches (no prewarp),
// denominator normalized to leading coefficient 1.
DigitalFilterCoefficients discretize(const FilterGains& gains);

// (roll, pitch) from a single accel sample:
//   roll = atan2(a_y, a_z); pitch = atan2(-a_x, sqrt(a_y^2 + a_z^2)).
// Throws DegenerateInputError when |accel| < 0.1 m/s^2 (free fall).
std::pair<double, double> accel_to_angles(const Vector3& accel);

// Delay-line memory for one fused angle channel (both branches, direct
// form I). Warm-start rule: on the first sample, accel-branch past inputs
// and outputs are set to the first accel angle, gyro-branch past inputs to
// the first gyro rate, gyro-branch past outputs to zero — this removes the
// multi-second startup transient of a zero-initialized filter.
struct FilterState {
  double ax1 = 0, ax2 = 0;  // accel-branch past inputs
  double ay1 = 0, ay2 = 0;  // accel-branch past outputs
  double gx1 = 0, gx2 = 0;  // gyro-branch past inputs
  double gy1 = 0, gy2 = 0;  // gyro-branch past outputs
  bool warm = false;
};

// One recursion of the difference equation. Returns the fused angle wrapped
// to (-pi, pi] and advances the state. Throws DataError on non-finite input
// (state left unchanged).
double filter_step(FilterState& state, const DigitalFilterCoefficients& c,
                   double gyro_rate, double accel_angle);

// ---------------------------------------------------------------------------
// Butterworth low-pass (3rd order, bilinear with frequency prewarping)
// ---------------------------------------------------------------------------

struct IirCoefficients {
  std::array<double, 4> b{};
  std::array<double, 4> a{};  // a[0] == 1
};

// Digital 3rd-order Butterworth low-pass design. Throws ParameterError
// unless 0 < cutoff < fs/2.
IirCoefficients butterworth_design(double cutoff_hz, double fs);

// Causal order-3 IIR with the warm-start rule (past inputs = past outputs =
// first sample, i.e. the filter starts settled at the first sample's DC).
class IirFilter {
 public:
  explicit IirFilter(const IirCoefficients& c) : c_(c) {}
  double step(double x);
  void reset() { warm_ = false; }

 private:
  IirCoefficients c_;
  std::array<double, 3> px_{}, py_{};
  bool warm_ = false;
};

// Filters a whole sequence (convenience wrapper over IirFilter).
std::vector<double> butterworth_lowpass(const std::vector<double>& x,
                                        double cutoff_hz, double fs);

// ---------------------------------------------------------------------------
// Rotation alignment
// ---------------------------------------------------------------------------

// Undo the device tilt (roll about x, then pitch about y) and subtract
// gravity (0, 0, 9.81): at stand-still the result is near zero.
Vector3 rotate_to_body(const Vector3& accel, double roll, double pitch);

// ---------------------------------------------------------------------------
// Streaming fuser: per-sample Butterworth prefilter on the three accel
// channels, accel-to-angle conversion, complementary filtering of roll and
// pitch. One instance per stream; strictly sequential.
// ---------------------------------------------------------------------------

struct OrientationEstimate {
  double roll = 0.0;   // rad
  double pitch = 0.0;  // rad
};

class ComplementaryFilter {
 public:
  ComplementaryFilter(const FilterGains& gains, double butter_cutoff_hz);

  // Advance by one sample; gyro x/y rates drive roll/pitch respectively.
  OrientationEstimate step(const ImuSample& s);
  void reset();

 private:
  DigitalFilterCoefficients coeffs_;
  IirCoefficients butter_;
  std::array<IirFilter, 3> accel_lp_;
  FilterState roll_state_, pitch_state_;
};

// Batch helper: features for the braking pipeline, rows = {fused pitch,
// raw pitch rate (gy)}, one column per sample.
Matrix fuse_braking_features(const SignalTrace& trace, const FilterGains& gains,
                             double butter_cutoff_hz);

}  // namespace hankelwave
