// Serial reference vs OpenMP for the three heavy kernels. Arg 0 runs the
// serial path, arg 1 the parallel one; both produce identical numbers.

#include <benchmark/benchmark.h>

#include "trg/montecarlo.hpp"
#include "trg/oracle.hpp"

namespace {

const trg::Kernel kLambda = trg::Kernel::constant(2, 1.0);
const trg::TypeLaw kMu = trg::TypeLaw::uniform(2);
const trg::ConnectionSchedule kSchedule = trg::ConnectionSchedule::near_critical();

void BM_MonteCarlo(benchmark::State& state) {
  const auto m = trg::product_measure(kLambda, kMu);
  const trg::Event ev = trg::Ball{m.scaled(1.2), 0.05};
  trg::SamplerOptions o;
  o.samples = 20000;
  o.seed = 3;
  o.workers = 8;
  o.parallel = state.range(0) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(trg::mc_event_probability(200, ev, kMu, kLambda, kSchedule, o).value);
}

void BM_Oracle(benchmark::State& state) {
  const auto lambda = trg::Kernel::constant(3, 1.0);
  const auto mu = trg::TypeLaw::uniform(3);
  const auto m = trg::product_measure(lambda, mu);
  // half-spaces do not factor over classes, so this walks the full lattice
  const trg::Event ev = trg::HalfSpace{trg::TestFunction::constant(3, 1.0), 1.3 * m.total_mass()};
  trg::OracleOptions o;
  o.conditional = false;
  o.parallel = state.range(0) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(trg::event_log_probability(12, ev, lambda, mu, kSchedule, o));
}

void BM_NaiveEnumerate(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(trg::naive_enumerate(6, kLambda, kMu, kSchedule, 1e8, parallel).graphs);
}

}  // namespace

BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Oracle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NaiveEnumerate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
