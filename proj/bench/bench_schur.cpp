// Schur-complement assembly: dense serial reference vs the sparsity-aware
// OpenMP kernel, on the dual relaxations of the quarter-arc problems.
#include <benchmark/benchmark.h>

#include <random>

#include "pmi/problem_io.hpp"
#include "pmi/schur.hpp"

namespace {

pmi::SdpInstance relaxation(int k) {
  const auto pf = pmi::problem_from_json(pmi::read_json_file(std::string(PMI_BENCH_DATA_DIR) + "/arc_nonconvex.json"));
  return pmi::build_relaxation(pf.problem, k).dual;
}

std::vector<pmi::Mat> scalings(const pmi::SdpInstance& p) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<pmi::Mat> w;
  for (const auto& b : p.blocks) {
    pmi::Mat g(b.side, b.side);
    for (int i = 0; i < b.side; ++i)
      for (int j = 0; j < b.side; ++j) g(i, j) = u(rng);
    w.push_back(g * g.transpose() + pmi::Mat::Identity(b.side, b.side));
  }
  return w;
}

void BM_SchurReference(benchmark::State& state) {
  const auto p = relaxation(static_cast<int>(state.range(0)));
  const auto w = scalings(p);
  for (auto _ : state) benchmark::DoNotOptimize(pmi::schur_reference(p, w));
  state.counters["vars"] = p.nfree;
}

void BM_SchurParallel(benchmark::State& state) {
  const auto p = relaxation(static_cast<int>(state.range(0)));
  const auto w = scalings(p);
  const auto support = pmi::BlockSupport::build(p);
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(pmi::schur_parallel(p, support, w, threads));
  state.counters["vars"] = p.nfree;
}

}  // namespace

BENCHMARK(BM_SchurReference)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SchurParallel)
    ->ArgsProduct({{2, 3}, {1, 2, 4, 8}})
    ->ArgNames({"k", "threads"})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
