#include <benchmark/benchmark.h>

#include "clid/baselines.hpp"
#include "clid/coordination.hpp"
#include "clid/report.hpp"
#include "clid/stats.hpp"
#include "clid/synthetic.hpp"
#include "clid/transport.hpp"

namespace {

clid::TransportProblem random_problem(std::size_t m, std::size_t n, std::uint64_t seed) {
  clid::synthetic::Rng rng(seed);
  auto weights = [&](std::size_t k) {
    std::vector<double> w(k);
    double total = 0;
    for (auto& x : w) total += (x = 1.0 + static_cast<double>(rng.below(9)));
    for (auto& x : w) x /= total;
    return w;
  };
  clid::TransportProblem p{weights(m), weights(n), clid::CostMatrix(m, n)};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) p.cost(i, j) = 10.0 * rng.uniform();
  return p;
}

void BM_SolveEmd(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = random_problem(n, n, 17);
  for (auto _ : state) benchmark::DoNotOptimize(clid::solve_emd(p).objective);
}
BENCHMARK(BM_SolveEmd)->Arg(4)->Arg(10)->Arg(30)->Arg(60);

void BM_Wmd300d(benchmark::State& state) {
  const auto store = clid::synthetic::embeddings(2000, 300, 3);
  clid::synthetic::Rng rng(4);
  auto bag = [&] {
    std::vector<std::string> t;
    for (int i = 0; i < state.range(0); ++i) t.push_back(store.token_at(rng.below(2000)));
    return clid::build_bag(t, store);
  };
  const auto a = bag();
  const auto b = bag();
  for (auto _ : state) benchmark::DoNotOptimize(clid::wmd(a, b, store));
}
BENCHMARK(BM_Wmd300d)->Arg(8)->Arg(20)->Arg(50);

void BM_MeasureSession(benchmark::State& state) {
  const auto store = clid::synthetic::embeddings(200, 10, 5);
  clid::synthetic::Rng rng(6);
  clid::synthetic::EchoConfig cfg;
  cfg.echo_probability = 0.5;
  cfg.turns = static_cast<std::size_t>(state.range(0));
  const auto s = clid::synthetic::echo_session("b", cfg, rng);
  for (auto _ : state) benchmark::DoNotOptimize(clid::measure_session(s, store));
}
BENCHMARK(BM_MeasureSession)->Arg(20)->Arg(40)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ToyCorpusReport(benchmark::State& state) {
  clid::MeasureConfig cfg;
  cfg.corpus = std::string(CLID_TEST_DATA_DIR) + "/toy_corpus.jsonl";
  cfg.embeddings = std::string(CLID_TEST_DATA_DIR) + "/toy_embeddings.txt";
  cfg.speaker_a = "therapist";
  cfg.speaker_b = "client";
  for (auto _ : state) benchmark::DoNotOptimize(clid::render_csv(clid::run_measure(cfg)));
}
BENCHMARK(BM_ToyCorpusReport)->Unit(benchmark::kMillisecond);

void BM_WilcoxonExact(benchmark::State& state) {
  std::vector<double> ranks(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < ranks.size(); ++i) ranks[i] = static_cast<double>(i + 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clid::wilcoxon_exact_p(ranks, 20.0, clid::Alternative::TwoSided));
  }
}
BENCHMARK(BM_WilcoxonExact)->Arg(12)->Arg(25);

}  // namespace

BENCHMARK_MAIN();
