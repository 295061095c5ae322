#include <benchmark/benchmark.h>

#include <vector>

#include "qbound/channel.hpp"
#include "qbound/dp.hpp"

namespace {

struct Fixture {
  qbound::BeliefDp dp;
  std::vector<double> values;
  std::vector<std::vector<double>> actions;
  std::vector<double> next;
  explicit Fixture(std::size_t resolution)
      : dp(qbound::builtin_dec(0.5), resolution),
        values(dp.grid().size(), 0.0),
        actions(dp.grid().size()),
        next(dp.grid().size(), 0.0) {}
};

void BM_SweepSerial(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  qbound::ActionSearchOptions opts;
  for (auto _ : state) {
    f.dp.sweep_serial(f.values, f.next, f.actions, opts);
    benchmark::DoNotOptimize(f.next.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.values.size()));
}

void BM_SweepParallel(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  qbound::ActionSearchOptions opts;
  for (auto _ : state) {
    f.dp.sweep_parallel(f.values, f.next, f.actions, opts);
    benchmark::DoNotOptimize(f.next.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(f.values.size()));
}

void BM_ValueIteration(benchmark::State& state) {
  qbound::ValueIterationOptions opts;
  opts.resolution = 50;
  opts.parallel = state.range(0) != 0;
  const auto ch = qbound::builtin_bec_no11(0.3);
  for (auto _ : state) benchmark::DoNotOptimize(qbound::value_iteration(ch, opts).rate);
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(50)->Arg(100);
BENCHMARK(BM_SweepParallel)->Arg(50)->Arg(100);
BENCHMARK(BM_ValueIteration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
