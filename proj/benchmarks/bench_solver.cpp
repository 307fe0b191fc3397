#include <benchmark/benchmark.h>

#include "msplace/features.hpp"
#include "msplace/random.hpp"
#include "msplace/solver.hpp"

namespace {

using namespace msplace;

struct Problem {
  FeatureMatrix a;
  ScenarioLabels b;
};

// Full-size descriptor layout with n images spread over three scenarios.
Problem make_problem(int n) {
  const ModalityLayout layout = descriptor_layout({}, kStandardWidth, kStandardHeight);
  Rng rng(5);
  Matrix a(layout.total_dim(), n);
  for (Index k = 0; k < a.size(); ++k) a.data()[k] = rng.normal();
  std::vector<std::string> ids;
  std::vector<std::size_t> scen;
  for (int j = 0; j < n; ++j) {
    ids.push_back("img" + std::to_string(j));
    scen.push_back(static_cast<std::size_t>(j % 3));
  }
  return {FeatureMatrix(layout, std::move(a), ids), ScenarioLabels::from_indices(scen, {"a", "b", "c"})};
}

void BM_SolveIrls(benchmark::State& state) {
  const Problem p = make_problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve(p.a, p.b, Hyperparams{}).iterations);
}
BENCHMARK(BM_SolveIrls)->Arg(30)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_GroupProx(benchmark::State& state) {
  const Problem p = make_problem(3);
  Rng rng(6);
  Matrix w(p.a.layout().total_dim(), 3);
  for (Index k = 0; k < w.size(); ++k) w.data()[k] = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(group_prox(p.a.layout(), w, 0.5, Hyperparams{}).data());
}
BENCHMARK(BM_GroupProx)->Unit(benchmark::kMicrosecond);

}  // namespace
