#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "dstit/certificate.hpp"
#include "dstit/search.hpp"
#include "dstit/tasks.hpp"
#include "support/random.hpp"

using namespace dstit;

namespace {

void prove_one(benchmark::State& state, const char* text, int n, int k) {
  Formula phi = parse(text, n);
  for (auto _ : state) {
    Verdict v = prove(phi, n, k);
    benchmark::DoNotOptimize(v.valid);
    state.counters["labels"] = static_cast<double>(v.stats.maxLabels);
    state.counters["steps"] = static_cast<double>(v.stats.steps);
  }
}

void BM_OughtImpliesCan(benchmark::State& s) { prove_one(s, "O[0] p -> dia [0] p", 1, 0); }
void BM_WeakDuty(benchmark::State& s) {
  prove_one(s, "(O[0] n & dia [0] ~n & dia [0] f & box (f -> n)) -> O[0] f", 1, 0);
}
void BM_StrongDuty(benchmark::State& s) {
  prove_one(s, "(O[0] n & dia [0] ~n & dia [0] f & box (n -> f)) -> O[0] f", 1, 0);
}
void BM_LoopFormula(benchmark::State& s) { prove_one(s, "dia [0] p | dia [1] q", 2, 2); }
void BM_Independence(benchmark::State& s) { prove_one(s, "(dia [0] p & dia [1] q) -> dia ([0] p & [1] q)", 2, 0); }
void BM_ThreeAgents(benchmark::State& s) { prove_one(s, "P[2] [0] [2] P[2] <0> p", 3, 0); }

BENCHMARK(BM_OughtImpliesCan)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_WeakDuty)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_StrongDuty)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LoopFormula)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Independence)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThreeAgents)->Unit(benchmark::kMillisecond);

// Random formulas of the given complexity, n and k from the arguments.
void BM_RandomCorpus(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const auto size = static_cast<std::size_t>(state.range(2));
  std::mt19937_64 rng(7);
  std::vector<Formula> corpus;
  for (int j = 0; j < 50; ++j) corpus.push_back(rnd::random_formula(rng, size, n));
  std::size_t valid = 0;
  for (auto _ : state)
    for (const Formula& f : corpus) valid += prove(f, n, k).valid;
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * corpus.size()));
  state.counters["valid"] = static_cast<double>(valid) / static_cast<double>(state.iterations());
}
BENCHMARK(BM_RandomCorpus)
    ->ArgsProduct({{1, 2}, {0, 2}, {6, 10}})
    ->ArgNames({"n", "k", "size"})
    ->Unit(benchmark::kMillisecond);

void BM_CheckProof(benchmark::State& state) {
  Formula phi = parse("(O[0] n & dia [0] ~n & dia [0] f & box (n -> f)) -> O[0] f", 1);
  Verdict v = prove(phi, 1, 0);
  Sequent goal = goal_sequent(phi);
  for (auto _ : state) benchmark::DoNotOptimize(check_derivation(*v.proof, goal, {1, 0, false}).ok);
}
BENCHMARK(BM_CheckProof)->Unit(benchmark::kMicrosecond);

void BM_JointFulfillment(benchmark::State& state) {
  KnowledgeBase kb = parse_kb(
      "agents: 1\nchoices: 0\nnorm: O[0] n\nnorm: O[0] p\nfact: dia [0] n\nfact: dia [0] ~n\n"
      "fact: dia [0] p\nfact: dia [0] ~p\nfact: box ([0] n -> ![0] p)\n");
  for (auto _ : state) benchmark::DoNotOptimize(joint_fulfillment_check(kb).answer);
}
BENCHMARK(BM_JointFulfillment)->Unit(benchmark::kMillisecond);

}  // namespace
