// Serial vs OpenMP dense simulation, and construct vs alternate checking.

#include <benchmark/benchmark.h>

#include "pqcv/checker.hpp"
#include "pqcv/oracle.hpp"

using namespace pqcv;

namespace {

PQC ansatz(int n, int reps, Family f = Family::EfficientSU2) {
  BenchSpec s;
  s.family = f;
  s.n_qubits = n;
  s.reps = reps;
  return generate(s).circuit;
}

void BM_SimulateSerial(benchmark::State& st) {
  const PQC c = ansatz(static_cast<int>(st.range(0)), 2);
  Rng rng(1);
  const auto angles = random_angles(rng, c.params.size());
  for (auto _ : st) benchmark::DoNotOptimize(simulate_serial(c, angles));
}

void BM_SimulateOpenMP(benchmark::State& st) {
  const PQC c = ansatz(static_cast<int>(st.range(0)), 2);
  Rng rng(1);
  const auto angles = random_angles(rng, c.params.size());
  for (auto _ : st) benchmark::DoNotOptimize(simulate(c, angles));
}

void BM_CheckConstruct(benchmark::State& st) {
  const PQC c = ansatz(static_cast<int>(st.range(0)), 2, Family::RealAmplitudes);
  const PQC d = rewrite_equivalent(c, 3, 20);
  CheckConfig cfg;
  cfg.strategy = Strategy::Construct;
  for (auto _ : st) benchmark::DoNotOptimize(check(c, d, cfg).verdict);
}

void BM_CheckAlternate(benchmark::State& st) {
  const PQC c = ansatz(static_cast<int>(st.range(0)), 2, Family::RealAmplitudes);
  const PQC d = rewrite_equivalent(c, 3, 20);
  CheckConfig cfg;
  cfg.strategy = Strategy::Alternate;
  for (auto _ : st) benchmark::DoNotOptimize(check(c, d, cfg).verdict);
}

}  // namespace

BENCHMARK(BM_SimulateSerial)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateOpenMP)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckConstruct)->DenseRange(3, 6, 1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckAlternate)->DenseRange(3, 6, 1)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
