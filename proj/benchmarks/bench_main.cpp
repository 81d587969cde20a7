#include <benchmark/benchmark.h>

#include <numeric>

#include "herdgibbs/gibbs.hpp"
#include "herdgibbs/herded.hpp"
#include "herdgibbs/ising.hpp"
#include "herdgibbs/oracle.hpp"

namespace {

using namespace herdgibbs;

void BM_HerdScalar(benchmark::State& state) {
  const auto steps = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(herd_scalar(0.61803398, 0.1, steps));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_HerdScalar)->Arg(1 << 10)->Arg(1 << 16);

GridProblem bench_problem(std::uint32_t side) {
  GridProblem p;
  p.height = p.width = side;
  p.sigma = 4.0;
  p.truth = binarize(make_synthetic_shape(side, side));
  p.y = corrupt(p.truth, p.sigma, 1234);
  return p;
}

void BM_FullConditionalGrid(benchmark::State& state) {
  const GridProblem p = bench_problem(32);
  const Model m = build_grid_model(p);
  Assignment x(m.num_vars(), 1);
  VariableId i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(full_conditional(m, i, x));
    i = (i + 1) % m.num_vars();
  }
}
BENCHMARK(BM_FullConditionalGrid);

void herded_sweeps(benchmark::State& state, WeightMode mode) {
  const GridProblem p = bench_problem(32);
  const Model m = build_grid_model(p);
  std::vector<VariableId> order(m.num_vars());
  std::iota(order.begin(), order.end(), 0);
  SamplerOptions opts;
  opts.mode = mode;
  for (auto _ : state) {
    HerdedSampler s(m, Assignment(m.num_vars(), 1), order, opts);
    benchmark::DoNotOptimize(s.run(10));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 10 *
                          m.num_vars());
}

void BM_HerdedSweepFull(benchmark::State& state) {
  herded_sweeps(state, WeightMode::kFull);
}
BENCHMARK(BM_HerdedSweepFull);

void BM_HerdedSweepShared(benchmark::State& state) {
  herded_sweeps(state, WeightMode::kShared);
}
BENCHMARK(BM_HerdedSweepShared);

void BM_GibbsSweep(benchmark::State& state) {
  const GridProblem p = bench_problem(32);
  const Model m = build_grid_model(p);
  GibbsConfig cfg;
  cfg.seed = 7;
  cfg.sweeps = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gibbs_run(m, Assignment(m.num_vars(), 1), cfg));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 10 *
                          m.num_vars());
}
BENCHMARK(BM_GibbsSweep);

void BM_EnumerateJoint(benchmark::State& state) {
  const GridProblem p = bench_problem(static_cast<std::uint32_t>(state.range(0)));
  const Model m = build_grid_model(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_joint(m));
  }
}
BENCHMARK(BM_EnumerateJoint)->Arg(3)->Arg(4);

void BM_SweepKernel(benchmark::State& state) {
  const GridProblem p = bench_problem(3);
  const Model m = build_grid_model(p);
  std::vector<VariableId> order(m.num_vars());
  std::iota(order.begin(), order.end(), 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep_kernel(m, order));
  }
}
BENCHMARK(BM_SweepKernel);

}  // namespace

BENCHMARK_MAIN();
