#include "hankelwave/hankel.hpp"

#include <cmath>

#include "hankelwave/errors.hpp"

namespace hankelwave {

TrainingMatrix slide_windows(const Matrix& features,
                             const std::vector<double>& times, int w,
                             int stride,
                             const std::vector<std::string>& channel_names) {
  if (w < 2) throw ParameterError("slide_windows: w must be >= 2");
  if (stride < 1) throw ParameterError("slide_windows: stride must be >= 1");
  const int c = static_cast<int>(features.rows());
  const int n = static_cast<int>(features.cols());
  if (c < 1) throw ShapeError("slide_windows: no feature channels");
  if (n < w)
    throw InsufficientDataError("slide_windows: trace length " +
                                std::to_string(n) + " shorter than window " +
                                std::to_string(w));
  if (!times.empty() && static_cast<int>(times.size()) != n)
    throw ShapeError("slide_windows: times length does not match features");

  const int cols = (n - w) / stride + 1;
  TrainingMatrix tm;
  tm.w = w;
  tm.c = c;
  tm.stride = stride;
  tm.channel_names = channel_names;
  tm.X.resize(static_cast<long>(w) * c, cols);
  tm.column_times.resize(cols);
  for (int j = 0; j < cols; ++j) {
    const int s0 = j * stride;
    // Channel-major flattening: each channel's w samples contiguous.
    for (int ch = 0; ch < c; ++ch)
      for (int i = 0; i < w; ++i)
        tm.X(static_cast<long>(ch) * w + i, j) = features(ch, s0 + i);
    const int last = s0 + w - 1;
    tm.column_times[j] = times.empty() ? static_cast<double>(last) : times[last];
  }
  return tm;
}

Vector normalize_columns(Matrix& X) {
  Vector scales(X.cols());
  for (long j = 0; j < X.cols(); ++j) {
    const double nrm = X.col(j).norm();
    if (nrm == 0.0)
      throw DegenerateInputError("normalize_columns: zero column at index " +
                                 std::to_string(j));
    X.col(j) /= nrm;
    scales(j) = nrm;
  }
  return scales;
}

Vector normalize_columns(TrainingMatrix& tm) { return normalize_columns(tm.X); }

Vector channel_scales(const std::vector<Matrix>& features) {
  if (features.empty()) throw ShapeError("channel_scales: no feature matrices");
  const long c = features.front().rows();
  long n = 0;
  for (const auto& f : features) {
    if (f.rows() != c)
      throw ShapeError("channel_scales: inconsistent channel counts");
    n += f.cols();
  }
  if (n < 2) throw InsufficientDataError("channel_scales: too few samples");
  Vector mean = Vector::Zero(c), sq = Vector::Zero(c);
  for (const auto& f : features) mean += f.rowwise().sum();
  mean /= static_cast<double>(n);
  for (const auto& f : features)
    sq += (f.colwise() - mean).array().square().matrix().rowwise().sum();
  Vector sd = (sq / static_cast<double>(n)).array().sqrt();
  for (long i = 0; i < c; ++i)
    if (sd(i) == 0.0)
      throw DegenerateInputError("channel_scales: constant channel " +
                                 std::to_string(i));
  return sd;
}

Matrix apply_channel_scales(const Matrix& features, const Vector& scales) {
  if (features.rows() != scales.size())
    throw ShapeError("apply_channel_scales: channel count mismatch");
  return scales.cwiseInverse().asDiagonal() * features;
}

}  // namespace hankelwave
