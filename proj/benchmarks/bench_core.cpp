#include "stabkit/boosting.hpp"
#include "stabkit/bounds.hpp"
#include "stabkit/simlab.hpp"
#include "stabkit/stabsel.hpp"

#include <benchmark/benchmark.h>

namespace {

stabkit::Dataset logistic_data(int n, int p, std::uint64_t seed) {
  const auto X = stabkit::simlab::gen_design(n, p, {}, seed);
  const auto r = stabkit::simlab::gen_response(X, 2, seed + 1);
  std::vector<std::string> names;
  for (int j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
  return stabkit::Dataset(X, r.y, names, stabkit::Family::binomial);
}

void BM_BoostStep(benchmark::State& state) {
  const auto data = logistic_data(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 1);
  const stabkit::boosting::CenteredDesign design(data.X());
  auto model = stabkit::boosting::start(data, {});
  for (auto _ : state) {
    stabkit::boosting::boost_step_inplace(model, data, design);
    benchmark::DoNotOptimize(model.fitted.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BoostStep)->Args({50, 100})->Args({100, 1000})->Args({500, 1000});

void BM_FitUntilQ(benchmark::State& state) {
  const auto data = logistic_data(50, 100, 2);
  const stabkit::boosting::BoostConfig config{0.1, 200000, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(stabkit::boosting::fit_until_q(data, config).m_done);
}
BENCHMARK(BM_FitUntilQ)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_StabSelRun(benchmark::State& state) {
  const auto data = logistic_data(100, 100, 3);
  stabkit::stabsel::StabSelConfig config;
  config.q = 8;
  config.scheme = stabkit::stabsel::SamplingScheme::complementary_pairs(50);
  config.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(stabkit::stabsel::run(data, config).pi_hat.sum());
}
BENCHMARK(BM_StabSelRun)->Unit(benchmark::kMillisecond);

void BM_MinD(benchmark::State& state) {
  const int B = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stabkit::bounds::min_D(0.76, 0.1, B, -0.25));
}
BENCHMARK(BM_MinD)->Arg(50)->Arg(100)->Arg(500)->Unit(benchmark::kMicrosecond);

void BM_SolveCutoff(benchmark::State& state) {
  stabkit::bounds::ParamRequest req;
  req.p = 57;
  req.q = 10;
  req.pfer_max = 1.0;
  req.assumption = static_cast<stabkit::bounds::Assumption>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(stabkit::bounds::solve_params(req).pi_thr);
}
BENCHMARK(BM_SolveCutoff)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
