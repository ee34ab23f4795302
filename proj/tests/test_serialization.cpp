#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "hankelwave/errors.hpp"
#include "hankelwave/rng.hpp"
#include "hankelwave/serialization.hpp"

using namespace hankelwave;

namespace {

struct TempPath {
  std::string path;
  explicit TempPath(const std::string& name) : path("/tmp/hw_test_" + name) {}
  ~TempPath() {
    std::remove(path.c_str());
    std::remove((path + ".json").c_str());
  }
};

LabeledDictionary sample_dictionary() {
  Rng rng(3);
  LabeledDictionary d;
  d.A.resize(8, 6);
  for (long j = 0; j < 6; ++j) {
    for (long i = 0; i < 8; ++i) d.A(i, j) = rng.gaussian();
    d.A.col(j) /= d.A.col(j).norm();
  }
  d.blocks = {{0, 0, 3}, {1, 3, 6}};
  d.class_of = {0, 0, 0, 1, 1, 1};
  d.class_names = {"alpha", "beta"};
  d.w = 4;
  d.c = 2;
  d.stride = 1;
  d.channel_names = {"u", "v"};
  d.channel_scale = (Vector(2) << 0.5, 2.0).finished();
  return d;
}

}  // namespace

TEST_CASE("training matrix binary round trip") {
  TrainingMatrix tm;
  tm.w = 3;
  tm.c = 2;
  tm.stride = 2;
  tm.channel_names = {"a", "b"};
  tm.X.resize(6, 4);
  Rng rng(1);
  for (long j = 0; j < 4; ++j)
    for (long i = 0; i < 6; ++i) tm.X(i, j) = rng.gaussian();
  tm.column_times = {0.1, 0.2, 0.3, 0.4};

  TempPath f("tm.bin");
  save_training_matrix(tm, f.path);
  const TrainingMatrix back = load_training_matrix(f.path);
  CHECK(back.w == 3);
  CHECK(back.c == 2);
  CHECK(back.stride == 2);
  CHECK(back.channel_names == tm.channel_names);
  CHECK(back.column_times == tm.column_times);
  CHECK((back.X - tm.X).norm() == doctest::Approx(0.0));
}

TEST_CASE("dictionary binary round trip preserves the fingerprint") {
  const LabeledDictionary d = sample_dictionary();
  TempPath f("dict.bin");
  save_dictionary(d, f.path, "{\"note\":\"unit test\"}");
  const LabeledDictionary back = load_dictionary(f.path);
  CHECK(back.fingerprint() == d.fingerprint());
  CHECK(back.class_names == d.class_names);
  CHECK(back.class_of == d.class_of);
  CHECK(back.w == d.w);
  CHECK(back.c == d.c);
  CHECK((back.channel_scale - d.channel_scale).norm() == doctest::Approx(0.0));
  CHECK((back.A - d.A).norm() == doctest::Approx(0.0));
  CHECK(back.channel_names == d.channel_names);

  // Provenance sidecar exists and carries the note.
  std::ifstream side(f.path + ".json");
  REQUIRE(bool(side));
  std::string text((std::istreambuf_iterator<char>(side)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("unit test") != std::string::npos);
}

TEST_CASE("serialization: corrupt and missing files") {
  CHECK_THROWS_AS(load_dictionary("/tmp/hw_no_such_dict.bin"), IoError);
  CHECK_THROWS_AS(load_training_matrix("/tmp/hw_no_such_tm.bin"), IoError);

  TempPath f("corrupt.bin");
  {
    std::ofstream out(f.path, std::ios::binary);
    out << "NOPE this is not a dictionary";
  }
  CHECK_THROWS_AS(load_dictionary(f.path), FormatError);
  CHECK_THROWS_AS(load_training_matrix(f.path), FormatError);
}

TEST_CASE("dictionary truncation is detected") {
  const LabeledDictionary d = sample_dictionary();
  TempPath f("trunc.bin");
  save_dictionary(d, f.path);
  // Chop the tail off.
  std::ifstream in(f.path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  in.close();
  {
    std::ofstream out(f.path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), long(bytes.size()) / 2);
  }
  CHECK_THROWS_AS(load_dictionary(f.path), FormatError);
}
