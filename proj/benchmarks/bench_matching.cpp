#include <benchmark/benchmark.h>

#include "msplace/eval.hpp"
#include "msplace/features.hpp"
#include "msplace/matching.hpp"
#include "msplace/random.hpp"

namespace {

using namespace msplace;

FeatureMatrix random_columns(const ModalityLayout& layout, int n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(layout.total_dim(), n);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = rng.normal();
  std::vector<std::string> ids;
  for (int j = 0; j < n; ++j) ids.push_back("img" + std::to_string(j));
  return FeatureMatrix(layout, std::move(m), ids);
}

void BM_Match(benchmark::State& state) {
  const ModalityLayout layout = descriptor_layout({}, kStandardWidth, kStandardHeight);
  const auto n = static_cast<int>(state.range(0));
  const FeatureMatrix q = random_columns(layout, n, 1);
  const FeatureMatrix t = random_columns(layout, n, 2);
  const ModalityWeights w = equal_weights(layout);
  for (auto _ : state) benchmark::DoNotOptimize(match(q, t, w, 0.5).scores.data());
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Match)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_PrCurve(benchmark::State& state) {
  const auto n = static_cast<Index>(state.range(0));
  Rng rng(4);
  Matrix s(n, n);
  GroundTruth gt;
  gt.same_place = BoolMatrix(n, n);
  for (Index k = 0; k < s.size(); ++k) {
    s.data()[k] = rng.uniform();
    gt.same_place.data()[k] = rng.bernoulli(0.05);
  }
  gt.same_place(0, 0) = true;
  const auto th = default_thresholds();
  for (auto _ : state) benchmark::DoNotOptimize(pr_curve(s, gt, th).auc);
}
BENCHMARK(BM_PrCurve)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
