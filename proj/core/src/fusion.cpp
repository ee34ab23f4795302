#include "hankelwave/fusion.hpp"

#include <cmath>

#include "hankelwave/errors.hpp"

namespace hankelwave {

namespace {

double wrap_angle(double x) {
  // (-pi, pi]
  x = std::fmod(x + M_PI, 2.0 * M_PI);
  if (x <= 0.0) x += 2.0 * M_PI;
  return x - M_PI;
}

}  // namespace

void FilterGains::validate() const {
  if (!(Kp > 0.0) || !(Ki > 0.0) || !(fs > 0.0))
    throw ParameterError("FilterGains: Kp, Ki, fs must all be positive");
  // s^2 + Kp s + Ki with Kp, Ki > 0 is always Hurwitz; nothing more to check.
}

DigitalFilterCoefficients discretize(const FilterGains& gains) {
  gains.validate();
  const double K = 2.0 * gains.fs;
  // H(s) = (n2 s^2 + n1 s + n0) / (s^2 + Kp s + Ki), s <- K(1-d)/(1+d).
  // Multiplying through by (1+d)^2:
  //   (1-d)^2 = 1 - 2d + d^2, (1-d)(1+d) = 1 - d^2, (1+d)^2 = 1 + 2d + d^2.
  auto branch = [&](double n2, double n1, double n0) {
    std::array<double, 3> b{};
    b[0] = n2 * K * K + n1 * K + n0;
    b[1] = -2.0 * n2 * K * K + 2.0 * n0;
    b[2] = n2 * K * K - n1 * K + n0;
    return b;
  };
  DigitalFilterCoefficients c;
  c.fs = gains.fs;
  c.b_gyro = branch(0.0, 1.0, 0.0);
  c.b_accel = branch(0.0, gains.Kp, gains.Ki);
  std::array<double, 3> a = branch(1.0, gains.Kp, gains.Ki);
  const double a0 = a[0];
  for (auto& v : c.b_gyro) v /= a0;
  for (auto& v : c.b_accel) v /= a0;
  for (auto& v : a) v /= a0;
  c.a = a;
  return c;
}

std::pair<double, double> accel_to_angles(const Vector3& accel) {
  const double n = accel.norm();
  if (!std::isfinite(n)) throw DataError("accel_to_angles: non-finite input");
  if (n < 0.1)
    throw DegenerateInputError(
        "accel_to_angles: |accel| < 0.1 m/s^2 (free fall, angles unobservable)");
  const double roll = std::atan2(accel.y(), accel.z());
  const double pitch =
      std::atan2(-accel.x(), std::hypot(accel.y(), accel.z()));
  return {roll, pitch};
}

double filter_step(FilterState& st, const DigitalFilterCoefficients& c,
                   double gyro_rate, double accel_angle) {
  if (!std::isfinite(gyro_rate) || !std::isfinite(accel_angle))
    throw DataError("filter_step: non-finite input");
  if (!st.warm) {
    st.ax1 = st.ax2 = accel_angle;
    st.ay1 = st.ay2 = accel_angle;
    st.gx1 = st.gx2 = gyro_rate;
    st.gy1 = st.gy2 = 0.0;
    st.warm = true;
  }
  const double ya = c.b_accel[0] * accel_angle + c.b_accel[1] * st.ax1 +
                    c.b_accel[2] * st.ax2 - c.a[1] * st.ay1 - c.a[2] * st.ay2;
  const double yg = c.b_gyro[0] * gyro_rate + c.b_gyro[1] * st.gx1 +
                    c.b_gyro[2] * st.gx2 - c.a[1] * st.gy1 - c.a[2] * st.gy2;
  st.ax2 = st.ax1;
  st.ax1 = accel_angle;
  st.ay2 = st.ay1;
  st.ay1 = ya;
  st.gx2 = st.gx1;
  st.gx1 = gyro_rate;
  st.gy2 = st.gy1;
  st.gy1 = yg;
  return wrap_angle(ya + yg);
}

IirCoefficients butterworth_design(double cutoff_hz, double fs) {
  if (!(fs > 0.0)) throw ParameterError("butterworth_design: fs must be positive");
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < fs / 2.0))
    throw ParameterError("butterworth_design: cutoff must be in (0, fs/2)");
  // Analog prototype s^3 + 2 wc s^2 + 2 wc^2 s + wc^3 at the prewarped
  // cutoff, then bilinear s <- K(1-d)/(1+d), K = 2 fs.
  const double wc = 2.0 * fs * std::tan(M_PI * cutoff_hz / fs);
  const double K = 2.0 * fs;
  // Expansion basis, multiplied through by (1+d)^3:
  //   (1-d)^3          = 1 - 3d + 3d^2 - d^3
  //   (1-d)^2 (1+d)    = 1 -  d -  d^2 + d^3
  //   (1-d)(1+d)^2     = 1 +  d -  d^2 - d^3
  //   (1+d)^3          = 1 + 3d + 3d^2 + d^3
  const double c3 = K * K * K;
  const double c2 = 2.0 * wc * K * K;
  const double c1 = 2.0 * wc * wc * K;
  const double c0 = wc * wc * wc;
  IirCoefficients out;
  std::array<double, 4> a{};
  a[0] = c3 + c2 + c1 + c0;
  a[1] = -3.0 * c3 - c2 + c1 + 3.0 * c0;
  a[2] = 3.0 * c3 - c2 - c1 + 3.0 * c0;
  a[3] = -c3 + c2 - c1 + c0;
  std::array<double, 4> b{c0, 3.0 * c0, 3.0 * c0, c0};
  for (int i = 0; i < 4; ++i) {
    out.b[i] = b[i] / a[0];
    out.a[i] = a[i] / a[0];
  }
  return out;
}

double IirFilter::step(double x) {
  if (!std::isfinite(x)) throw DataError("IirFilter: non-finite input");
  if (!warm_) {
    px_.fill(x);
    py_.fill(x);  // settled at the first sample's DC (unity-gain low-pass)
    warm_ = true;
  }
  const double y = c_.b[0] * x + c_.b[1] * px_[0] + c_.b[2] * px_[1] +
                   c_.b[3] * px_[2] - c_.a[1] * py_[0] - c_.a[2] * py_[1] -
                   c_.a[3] * py_[2];
  px_[2] = px_[1];
  px_[1] = px_[0];
  px_[0] = x;
  py_[2] = py_[1];
  py_[1] = py_[0];
  py_[0] = y;
  return y;
}

std::vector<double> butterworth_lowpass(const std::vector<double>& x,
                                        double cutoff_hz, double fs) {
  IirFilter f(butterworth_design(cutoff_hz, fs));
  std::vector<double> y;
  y.reserve(x.size());
  for (double v : x) y.push_back(f.step(v));
  return y;
}

Vector3 rotate_to_body(const Vector3& accel, double roll, double pitch) {
  if (!accel.allFinite() || !std::isfinite(roll) || !std::isfinite(pitch))
    throw DataError("rotate_to_body: non-finite input");
  const double cr = std::cos(roll), sr = std::sin(roll);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  // Undo roll about x, then pitch about y.
  const Vector3 r(accel.x(), cr * accel.y() - sr * accel.z(),
                  sr * accel.y() + cr * accel.z());
  const Vector3 p(cp * r.x() + sp * r.z(), r.y(), -sp * r.x() + cp * r.z());
  return p - Vector3(0.0, 0.0, 9.81);
}

ComplementaryFilter::ComplementaryFilter(const FilterGains& gains,
                                         double butter_cutoff_hz)
    : coeffs_(discretize(gains)),
      butter_(butterworth_design(butter_cutoff_hz, gains.fs)),
      accel_lp_{IirFilter(butter_), IirFilter(butter_), IirFilter(butter_)} {}

OrientationEstimate ComplementaryFilter::step(const ImuSample& s) {
  Vector3 filt(accel_lp_[0].step(s.accel.x()), accel_lp_[1].step(s.accel.y()),
               accel_lp_[2].step(s.accel.z()));
  auto [roll_a, pitch_a] = accel_to_angles(filt);
  OrientationEstimate est;
  est.roll = filter_step(roll_state_, coeffs_, s.gyro.x(), roll_a);
  est.pitch = filter_step(pitch_state_, coeffs_, s.gyro.y(), pitch_a);
  return est;
}

void ComplementaryFilter::reset() {
  for (auto& f : accel_lp_) f.reset();
  roll_state_ = FilterState{};
  pitch_state_ = FilterState{};
}

Matrix fuse_braking_features(const SignalTrace& trace, const FilterGains& gains,
                             double butter_cutoff_hz) {
  FilterGains g = gains;
  g.fs = trace.fs;
  ComplementaryFilter f(g, butter_cutoff_hz);
  const int n = static_cast<int>(trace.size());
  Matrix out(2, n);
  for (int i = 0; i < n; ++i) {
    const auto est = f.step(trace.samples[i]);
    out(0, i) = est.pitch;
    out(1, i) = trace.samples[i].gyro.y();
  }
  return out;
}

}  // namespace hankelwave
