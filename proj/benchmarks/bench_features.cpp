#include <benchmark/benchmark.h>

#include "msplace/features.hpp"
#include "msplace/image.hpp"
#include "msplace/random.hpp"

namespace {

using namespace msplace;

ImageFrame random_frame(int w, int h) {
  Rng rng(3);
  ImageFrame f = ImageFrame::filled(w, h, 0);
  for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return f;
}

void BM_Hog(benchmark::State& state) {
  const ImageFrame f = random_frame(kStandardWidth, kStandardHeight);
  for (auto _ : state) benchmark::DoNotOptimize(hog(f).data());
}
BENCHMARK(BM_Hog)->Unit(benchmark::kMicrosecond);

void BM_Lbp(benchmark::State& state) {
  const ImageFrame f = random_frame(kStandardWidth, kStandardHeight);
  for (auto _ : state) benchmark::DoNotOptimize(lbp(f).data());
}
BENCHMARK(BM_Lbp)->Unit(benchmark::kMicrosecond);

void BM_Gist(benchmark::State& state) {
  const ImageFrame f = random_frame(kStandardWidth, kStandardHeight);
  for (auto _ : state) benchmark::DoNotOptimize(gist(f).data());
}
BENCHMARK(BM_Gist)->Unit(benchmark::kMicrosecond);

void BM_Downsample(benchmark::State& state) {
  const ImageFrame f = random_frame(3760, 980);
  for (auto _ : state) benchmark::DoNotOptimize(downsample(f, kStandardWidth, kStandardHeight).pixels.data());
}
BENCHMARK(BM_Downsample)->Unit(benchmark::kMillisecond);

}  // namespace
