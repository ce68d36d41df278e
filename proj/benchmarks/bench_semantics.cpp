#include <benchmark/benchmark.h>

#include <random>

#include "dstit/semantics.hpp"
#include "support/random.hpp"

using namespace dstit;

namespace {

// Frame with exactly `worlds` worlds: agent i's cells are the residues mod (i + 2), which are
// independent for pairwise coprime moduli.
DsModel fixed_frame(std::mt19937_64& rng, int agents, std::size_t worlds) {
  DsModel m;
  m.agents = agents;
  for (std::size_t w = 0; w < worlds; ++w) m.worlds.push_back("w" + std::to_string(w));
  m.rel.resize(agents);
  m.ideal.resize(agents);
  for (int i = 0; i < agents; ++i) {
    const std::size_t mod = i == 0 ? 2 : i == 1 ? 3 : 5;
    for (World a = 0; a < worlds; ++a)
      for (World b = 0; b < worlds; ++b)
        if (a % mod == b % mod) m.rel[i].insert({a, b});
    for (World w = 0; w < worlds; w += mod) m.ideal[i].insert(w);
  }
  for (const char* v : {"p", "q"})
    for (World w = 0; w < worlds; ++w)
      if (rng() % 2) m.val[v].insert(w);
  return m;
}

void BM_ModelCheck(benchmark::State& state) {
  std::mt19937_64 rng(3);
  Formula f = rnd::random_formula(rng, 20, 2);
  DsModel m = fixed_frame(rng, 2, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(truth_set(m, f));
}
BENCHMARK(BM_ModelCheck)->RangeMultiplier(4)->Range(30, 480);

void BM_ValidateFrame(benchmark::State& state) {
  std::mt19937_64 rng(4);
  DsModel m = fixed_frame(rng, 3, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(validate_frame(m).ok());
}
BENCHMARK(BM_ValidateFrame)->RangeMultiplier(4)->Range(30, 480)->Unit(benchmark::kMicrosecond);

// A valid formula, so the bounded search has to exhaust every frame up to the bound.
void BM_Oracle(benchmark::State& state) {
  std::mt19937_64 rng(5);
  Formula f = rnd::random_valid(rng, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(find_countermodel_bounded(f, 1, 0, static_cast<std::size_t>(state.range(0))).has_value());
}
BENCHMARK(BM_Oracle)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

}  // namespace
