#include <benchmark/benchmark.h>

#include "pcpred/cliques.hpp"
#include "pcpred/evaluation.hpp"
#include "pcpred/factorization.hpp"
#include "pcpred/rng.hpp"

namespace {

using namespace pcpred;

PCMatrix workload(std::size_t n, std::size_t m, double missing) {
  Rng rng(1);
  std::vector<double> u(n), v(m), cells(n * m);
  for (auto& x : u) x = rng.uniform(0.5, 5);
  for (auto& x : v) x = rng.uniform(0.5, 5);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) cells[i * m + j] = u[i] * v[j] * rng.uniform(0.8, 1.25);
  std::vector<RowKey> rk;
  std::vector<std::string> ck;
  for (std::size_t i = 0; i < n; ++i) rk.push_back({"p" + std::to_string(i), "a"});
  for (std::size_t j = 0; j < m; ++j) ck.push_back("m" + std::to_string(j));
  return mask_random(PCMatrix(rk, ck, cells), {missing, 2}).masked;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_BuildGraph(benchmark::State& state) {
  const auto m = workload(60, 400, 0.3);
  const CliqueConfig cfg;
  for (auto _ : state) {
    if (state.range(0))
      benchmark::DoNotOptimize(build_graph(m, cfg, Exec::Parallel));
    else
      benchmark::DoNotOptimize(build_graph_serial(m, cfg));
  }
}

void BM_ALS(benchmark::State& state) {
  const auto m = workload(400, 300, 0.5);
  ALSConfig cfg;
  cfg.k = 4;
  cfg.max_iters = 20;
  cfg.tol = 1e-15;
  for (auto _ : state) benchmark::DoNotOptimize(als_fit(m, cfg, exec_of(state)));
}

void BM_LeaveOneOutRidge(benchmark::State& state) {
  const auto m = workload(20, 40, 0.2);
  EvalConfig cfg;
  cfg.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(leave_one_out(m, Algorithm::Ridge, cfg));
}

}  // namespace

BENCHMARK(BM_BuildGraph)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ALS)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeaveOneOutRidge)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
