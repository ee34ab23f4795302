#pragma once

#include <string>

#include "hankelwave/hankel.hpp"
#include "hankelwave/trainer.hpp"

namespace hankelwave {

// Dense binary container for a TrainingMatrix:
//   magic "HWTM", u32 version, u32 rows, u32 cols, u32 w, u32 c, u32 stride,
//   u32 n_names, [u32 len + bytes]*n_names, f64 column_times[cols],
//   f64 X column-major.
void save_training_matrix(const TrainingMatrix& tm, const std::string& path);
TrainingMatrix load_training_matrix(const std::string& path);

// Self-describing binary dictionary:
//   magic "HWLD", u32 version, u32 rows, u32 cols, u32 n_blocks,
//   [i32 class_id, u32 begin, u32 end]*n_blocks, u32 n_classes,
//   [u32 len + bytes]*n_classes (class names), u32 w, u32 c, u32 stride,
//   u32 n_channel_names, [u32 len + bytes]*, f64 channel_scale[c],
//   f64 A column-major.
// A JSON sidecar (<path>.json) records training provenance.
void save_dictionary(const LabeledDictionary& dict, const std::string& path,
                     const std::string& provenance_json = "{}");
LabeledDictionary load_dictionary(const std::string& path);

}  // namespace hankelwave
