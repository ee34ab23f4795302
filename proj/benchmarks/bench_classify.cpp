// CRC vs l1-SRC throughput on a synthetic dictionary of the default size.
#include <benchmark/benchmark.h>

#include "hankelwave/classify.hpp"
#include "hankelwave/rng.hpp"
#include "hankelwave/trainer.hpp"

namespace {

using namespace hankelwave;

LabeledDictionary make_dictionary(int rows, int per_class, int classes) {
  Rng rng(7);
  LabeledDictionary dict;
  dict.w = rows / 2;
  dict.c = 2;
  dict.stride = 1;
  dict.channel_scale = Vector::Ones(2);
  dict.A.resize(rows, per_class * classes);
  for (long j = 0; j < dict.A.cols(); ++j)
    for (long i = 0; i < rows; ++i) dict.A(i, j) = rng.gaussian();
  normalize_columns(dict.A);
  for (int cls = 0; cls < classes; ++cls) {
    dict.blocks.push_back({cls, cls * per_class, (cls + 1) * per_class});
    dict.class_names.push_back("class" + std::to_string(cls));
    for (int j = 0; j < per_class; ++j) dict.class_of.push_back(cls);
  }
  return dict;
}

Vector make_query(int rows, std::uint64_t seed) {
  Rng rng(seed);
  Vector y(rows);
  for (int i = 0; i < rows; ++i) y(i) = rng.gaussian();
  return y / y.norm();
}

void BM_CrcClassify(benchmark::State& state) {
  auto dict = make_dictionary(40, 30, 3);
  auto op = crc_precompute(dict, 0.5);
  auto y = make_query(40, 11);
  for (auto _ : state) benchmark::DoNotOptimize(crc_classify(op, dict, y));
}
BENCHMARK(BM_CrcClassify);

void BM_SrcClassify(benchmark::State& state) {
  auto dict = make_dictionary(40, 30, 3);
  auto y = make_query(40, 11);
  for (auto _ : state)
    benchmark::DoNotOptimize(src_classify(dict, y, 1e-3, {500, 1e-6}));
}
BENCHMARK(BM_SrcClassify);

}  // namespace

BENCHMARK_MAIN();
