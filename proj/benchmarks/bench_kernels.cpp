#include <benchmark/benchmark.h>

#include <random>

#include "palim/corpus.hpp"
#include "palim/distance.hpp"
#include "palim/fractal.hpp"
#include "palim/keypoints.hpp"
#include "palim/pixelmatch.hpp"
#include "palim/retrieval.hpp"

using namespace palim;

namespace {

GrayImage page(int side, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  PageStyle style;
  style.width = style.height = side;
  return text_page(style, rng);
}

void BM_Edm(benchmark::State& state) {
  const auto b = binarize(page(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(edm(b));
  state.SetItemsProcessed(state.iterations() * b.width() * b.height());
}
BENCHMARK(BM_Edm)->Arg(128)->Arg(512);

void BM_EdmError(benchmark::State& state) {
  const auto a = render_text("quod", 4);
  const auto b = render_text("quad", 4);
  for (auto _ : state) benchmark::DoNotOptimize(edm_error(a, b));
}
BENCHMARK(BM_EdmError);

void BM_BoxCounting(benchmark::State& state) {
  const auto b = binarize(page(512));
  const auto sizes = default_box_sizes(512, 512);
  for (auto _ : state) benchmark::DoNotOptimize(fd_box_counting(b, sizes));
}
BENCHMARK(BM_BoxCounting);

void BM_FdSignature(benchmark::State& state) {
  const auto g = page(512);
  for (auto _ : state) benchmark::DoNotOptimize(fd_signature(g));
}
BENCHMARK(BM_FdSignature)->Unit(benchmark::kMillisecond);

void BM_Sift(benchmark::State& state) {
  const auto g = page(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(g));
}
BENCHMARK(BM_Sift)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Harris(benchmark::State& state) {
  const auto g = page(512);
  for (auto _ : state) benchmark::DoNotOptimize(harris(g));
}
BENCHMARK(BM_Harris)->Unit(benchmark::kMillisecond);

void BM_Match(benchmark::State& state) {
  const auto a = extract_features(page(512, 1));
  const auto b = extract_features(page(512, 2));
  for (auto _ : state) benchmark::DoNotOptimize(match_descriptors(a.descriptors, b.descriptors));
}
BENCHMARK(BM_Match)->Unit(benchmark::kMillisecond);

void BM_IndexRecord(benchmark::State& state) {
  const auto g = page(512);
  const IndexConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(make_record("p", "", g, config));
}
BENCHMARK(BM_IndexRecord)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
