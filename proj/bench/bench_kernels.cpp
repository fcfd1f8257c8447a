// Serial reference kernels against their OpenMP counterparts.
#include <map>

#include <benchmark/benchmark.h>

#include "cera/kernels.hpp"
#include "cera/markov.hpp"
#include "cera/simulator.hpp"

namespace {

const cera::TransitionModel& model_for(int preambles) {
  static std::map<int, cera::TransitionModel> cache;
  auto it = cache.find(preambles);
  if (it == cache.end()) {
    it = cache.emplace(preambles, cera::build_transition_model(
                                      cera::CodebookSpec::uniform(cera::Mode::Expanded, 4, preambles))).first;
  }
  return it->second;
}

template <cera::Execution Exec>
void BM_ChainStep(benchmark::State& state) {
  const auto& model = model_for(static_cast<int>(state.range(0)));
  // Dense input: the initial vector is mostly zeros, which the row-push kernel skips.
  std::vector<double> in(model.size(), 1.0 / static_cast<double>(model.size()));
  std::vector<double> out(model.size());
  for (auto _ : state) {
    cera::kernels::step(Exec, model, in, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["states"] = static_cast<double>(model.size());
}
BENCHMARK_TEMPLATE(BM_ChainStep, cera::Execution::Serial)->Arg(4)->Arg(16)->Arg(31);
BENCHMARK_TEMPLATE(BM_ChainStep, cera::Execution::Parallel)->Arg(4)->Arg(16)->Arg(31);

template <cera::Execution Exec>
void BM_MonteCarloBatch(benchmark::State& state) {
  const cera::ScenarioConfig config{cera::CodebookSpec::uniform(cera::Mode::Expanded, 2, 2),
                                    static_cast<std::uint64_t>(state.range(0)), 20'000, 7};
  for (auto _ : state) {
    auto stats = cera::run_batch(config, Exec);
    benchmark::DoNotOptimize(stats.perceived.mean);
  }
}
BENCHMARK_TEMPLATE(BM_MonteCarloBatch, cera::Execution::Serial)->Arg(10)->Arg(50);
BENCHMARK_TEMPLATE(BM_MonteCarloBatch, cera::Execution::Parallel)->Arg(10)->Arg(50);

void BM_PerceivedSweepLumpedVsFull(benchmark::State& state) {
  const auto spec = cera::CodebookSpec::uniform(cera::Mode::Expanded, 4, 4);
  const auto model = state.range(0) ? cera::build_lumped_model(spec) : cera::build_transition_model(spec);
  for (auto _ : state) benchmark::DoNotOptimize(cera::perceived_count(model, 2000));
  state.SetLabel(state.range(0) ? "lumped" : "full");
}
BENCHMARK(BM_PerceivedSweepLumpedVsFull)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
