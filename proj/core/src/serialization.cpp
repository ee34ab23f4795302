#include "hankelwave/serialization.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "hankelwave/errors.hpp"

namespace hankelwave {

namespace {

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_i32(std::ofstream& out, std::int32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_f64s(std::ofstream& out, const double* p, std::size_t n) {
  out.write(reinterpret_cast<const char*>(p), sizeof(double) * n);
}
void put_string(std::ofstream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw FormatError("truncated binary container");
  return v;
}
std::int32_t get_i32(std::ifstream& in) {
  std::int32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw FormatError("truncated binary container");
  return v;
}
void get_f64s(std::ifstream& in, double* p, std::size_t n) {
  in.read(reinterpret_cast<char*>(p), sizeof(double) * n);
  if (!in) throw FormatError("truncated binary container");
}
std::string get_string(std::ifstream& in) {
  const std::uint32_t len = get_u32(in);
  if (len > (1u << 20)) throw FormatError("implausible string length");
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw FormatError("truncated binary container");
  return s;
}

void check_magic(std::ifstream& in, const char expect[4],
                 const std::string& path) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, expect, 4) != 0)
    throw FormatError("bad magic in " + path);
}

}  // namespace

void save_training_matrix(const TrainingMatrix& tm, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write training matrix: " + path);
  out.write("HWTM", 4);
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(tm.X.rows()));
  put_u32(out, static_cast<std::uint32_t>(tm.X.cols()));
  put_u32(out, static_cast<std::uint32_t>(tm.w));
  put_u32(out, static_cast<std::uint32_t>(tm.c));
  put_u32(out, static_cast<std::uint32_t>(tm.stride));
  put_u32(out, static_cast<std::uint32_t>(tm.channel_names.size()));
  for (const auto& name : tm.channel_names) put_string(out, name);
  put_f64s(out, tm.column_times.data(), tm.column_times.size());
  put_f64s(out, tm.X.data(), static_cast<std::size_t>(tm.X.size()));
  if (!out) throw IoError("write failure: " + path);
}

TrainingMatrix load_training_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open training matrix: " + path);
  check_magic(in, "HWTM", path);
  const std::uint32_t version = get_u32(in);
  if (version != 1)
    throw FormatError("unsupported training-matrix version " +
                      std::to_string(version));
  TrainingMatrix tm;
  const std::uint32_t rows = get_u32(in), cols = get_u32(in);
  tm.w = static_cast<int>(get_u32(in));
  tm.c = static_cast<int>(get_u32(in));
  tm.stride = static_cast<int>(get_u32(in));
  const std::uint32_t n_names = get_u32(in);
  for (std::uint32_t i = 0; i < n_names; ++i)
    tm.channel_names.push_back(get_string(in));
  tm.column_times.resize(cols);
  get_f64s(in, tm.column_times.data(), cols);
  tm.X.resize(rows, cols);
  get_f64s(in, tm.X.data(), static_cast<std::size_t>(rows) * cols);
  if (static_cast<long>(tm.w) * tm.c != static_cast<long>(rows))
    throw FormatError("inconsistent header in " + path);
  return tm;
}

void save_dictionary(const LabeledDictionary& dict, const std::string& path,
                     const std::string& provenance_json) {
  dict.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dictionary: " + path);
  out.write("HWLD", 4);
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(dict.A.rows()));
  put_u32(out, static_cast<std::uint32_t>(dict.A.cols()));
  put_u32(out, static_cast<std::uint32_t>(dict.blocks.size()));
  for (const auto& b : dict.blocks) {
    put_i32(out, b.class_id);
    put_u32(out, static_cast<std::uint32_t>(b.begin));
    put_u32(out, static_cast<std::uint32_t>(b.end));
  }
  put_u32(out, static_cast<std::uint32_t>(dict.class_names.size()));
  for (const auto& name : dict.class_names) put_string(out, name);
  put_u32(out, static_cast<std::uint32_t>(dict.w));
  put_u32(out, static_cast<std::uint32_t>(dict.c));
  put_u32(out, static_cast<std::uint32_t>(dict.stride));
  put_u32(out, static_cast<std::uint32_t>(dict.channel_names.size()));
  for (const auto& name : dict.channel_names) put_string(out, name);
  put_f64s(out, dict.channel_scale.data(),
           static_cast<std::size_t>(dict.channel_scale.size()));
  put_f64s(out, dict.A.data(), static_cast<std::size_t>(dict.A.size()));
  if (!out) throw IoError("write failure: " + path);

  std::ofstream side(path + ".json");
  if (!side) throw IoError("cannot write dictionary sidecar: " + path + ".json");
  side << provenance_json << "\n";
}

LabeledDictionary load_dictionary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dictionary: " + path);
  check_magic(in, "HWLD", path);
  const std::uint32_t version = get_u32(in);
  if (version != 1)
    throw FormatError("unsupported dictionary version " +
                      std::to_string(version));
  LabeledDictionary dict;
  const std::uint32_t rows = get_u32(in), cols = get_u32(in);
  const std::uint32_t n_blocks = get_u32(in);
  for (std::uint32_t i = 0; i < n_blocks; ++i) {
    DictionaryBlock b;
    b.class_id = get_i32(in);
    b.begin = static_cast<int>(get_u32(in));
    b.end = static_cast<int>(get_u32(in));
    dict.blocks.push_back(b);
  }
  const std::uint32_t n_classes = get_u32(in);
  for (std::uint32_t i = 0; i < n_classes; ++i)
    dict.class_names.push_back(get_string(in));
  dict.w = static_cast<int>(get_u32(in));
  dict.c = static_cast<int>(get_u32(in));
  dict.stride = static_cast<int>(get_u32(in));
  const std::uint32_t n_names = get_u32(in);
  for (std::uint32_t i = 0; i < n_names; ++i)
    dict.channel_names.push_back(get_string(in));
  dict.channel_scale.resize(dict.c);
  get_f64s(in, dict.channel_scale.data(), dict.c);
  dict.A.resize(rows, cols);
  get_f64s(in, dict.A.data(), static_cast<std::size_t>(rows) * cols);
  dict.class_of.reserve(cols);
  dict.class_of.assign(cols, 0);
  for (const auto& b : dict.blocks)
    for (int j = b.begin; j < b.end; ++j) dict.class_of[j] = b.class_id;
  dict.validate();
  return dict;
}

}  // namespace hankelwave
