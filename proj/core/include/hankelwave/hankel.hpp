#pragma once

#include <string>
#include <vector>

#include "hankelwave/types.hpp"

namespace hankelwave {

// Block-Hankel training matrix: each column is one sliding window of w
// samples x c channels, flattened channel-major (each channel's w samples
// contiguous), so adjacent stride-1 columns overlap in w-1 samples per
// channel.
struct TrainingMatrix {
  Matrix X;                               // (w*c) x cols
  std::vector<double> column_times;       // t_end per column
  int w = 0;
  int c = 0;
  int stride = 1;
  std::vector<std::string> channel_names;

  int cols() const { return static_cast<int>(X.cols()); }
};

// Column j covers samples [j*stride, j*stride + w); column count =
// floor((len - w)/stride) + 1. `times` may be empty (then t_end = index of
// last sample / 1). Throws InsufficientDataError when the trace is shorter
// than w, ParameterError on bad w/stride.
TrainingMatrix slide_windows(const Matrix& features,
                             const std::vector<double>& times, int w,
                             int stride = 1,
                             const std::vector<std::string>& channel_names = {});

// Unit-normalizes every column in place; returns the original norms.
// Throws DegenerateInputError naming the first zero column.
Vector normalize_columns(Matrix& X);
Vector normalize_columns(TrainingMatrix& tm);

// Per-channel scale (std) computed over one or more feature matrices, used
// to standardize before flattening. No mean subtraction: CRC decisions are
// scale-invariant, and removing DC would make +DC and -DC windows collide.
Vector channel_scales(const std::vector<Matrix>& features);

// Divides each channel row by its scale.
Matrix apply_channel_scales(const Matrix& features, const Vector& scales);

}  // namespace hankelwave
