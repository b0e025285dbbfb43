#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "qevo/canonical.hpp"
#include "qevo/crippen.hpp"
#include "qevo/ensemble.hpp"
#include "qevo/qed.hpp"
#include "qevo/quantum_sampler.hpp"
#include "qevo/reference_space.hpp"
#include "qevo/rng.hpp"
#include "qevo/sa_score.hpp"
#include "qevo/selfies_decoder.hpp"

namespace {

using namespace qevo;

const codec::TokenVocabulary& vocab3() {
  static const auto v = codec::TokenVocabulary::preset("table_2_3");
  return v;
}

std::vector<std::string> random_bitstrings(int n, int width, std::uint64_t seed) {
  Philox rng(seed);
  std::vector<std::string> out(n, std::string(width, '0'));
  for (auto& s : out)
    for (auto& c : s) c = rng.below(2) ? '1' : '0';
  return out;
}

void BM_DecodeBitstring(benchmark::State& state) {
  auto inputs = random_bitstrings(1024, 3 * int(state.range(0)), 1);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(selfies::decode_bitstring(inputs[i++ % inputs.size()], vocab3()));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DecodeBitstring)->Arg(6)->Arg(9);

void BM_Canonicalize(benchmark::State& state) {
  std::vector<chem::MoleculeGraph> graphs;
  for (const auto& b : random_bitstrings(1024, 27, 2)) graphs.push_back(selfies::decode_bitstring(b, vocab3()));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(chem::canonicalize(graphs[i++ % graphs.size()]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Canonicalize);

std::vector<chem::MoleculeGraph> valid_graphs(std::uint64_t seed) {
  std::vector<chem::MoleculeGraph> graphs;
  for (const auto& b : random_bitstrings(1024, 27, seed)) {
    auto g = selfies::decode_bitstring(b, vocab3());
    if (g.valid()) graphs.push_back(std::move(g));
  }
  return graphs;
}

void BM_CrippenLogp(benchmark::State& state) {
  auto graphs = valid_graphs(3);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(chem::crippen_logp(graphs[i++ % graphs.size()]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CrippenLogp);

void BM_Qed(benchmark::State& state) {
  auto graphs = valid_graphs(4);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(chem::qed(graphs[i++ % graphs.size()]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Qed);

void BM_SaScore(benchmark::State& state) {
  auto graphs = valid_graphs(5);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(chem::sa_score(graphs[i++ % graphs.size()]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SaScore);

void BM_SampleRealAmplitudes(benchmark::State& state) {
  sim::AnsatzSpec spec{sim::Family::RA, int(state.range(0))};
  auto theta = sim::random_init(spec, 4);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim::sample(spec, theta, 1024, ++seed));
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_SampleRealAmplitudes)->Arg(18)->Arg(27)->Unit(benchmark::kMillisecond);

void BM_SampleByteCells(benchmark::State& state) {
  sim::AnsatzSpec spec{sim::Family::BY, int(state.range(0))};
  auto theta = sim::random_init(spec, 5);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim::sample(spec, theta, 1024, ++seed));
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_SampleByteCells)->Arg(28)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_RaStatevector(benchmark::State& state) {
  sim::AnsatzSpec spec{sim::Family::RA, int(state.range(0))};
  auto theta = sim::random_init(spec, 6);
  for (auto _ : state) benchmark::DoNotOptimize(sim::ra_statevector(spec, theta));
}
BENCHMARK(BM_RaStatevector)->Arg(12)->Arg(18)->Unit(benchmark::kMillisecond);

void BM_TotalLoss(benchmark::State& state) {
  ScoreCache cache(vocab3(), Scorer(ScorerSpec::parse("plogp")));
  sim::AnsatzSpec spec{sim::Family::RA, 18};
  auto hist = sim::sample(spec, sim::uniform_init(spec), 1024, 7);
  total_loss(hist, {}, cache);
  for (auto _ : state) benchmark::DoNotOptimize(total_loss(hist, {-3.0, 0.1}, cache));
}
BENCHMARK(BM_TotalLoss)->Unit(benchmark::kMicrosecond);

void BM_EnumerateSixTokens(benchmark::State& state) {
  Scorer s(ScorerSpec::parse("plogp"));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate(vocab3(), 6, s));
}
BENCHMARK(BM_EnumerateSixTokens)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
