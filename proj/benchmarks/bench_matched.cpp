#include <benchmark/benchmark.h>

#include "mpkit/idempotent.hpp"
#include "mpkit/matched.hpp"
#include "mpkit/random.hpp"
#include "mpkit/spectral.hpp"
#include "mpkit/verifier.hpp"

using namespace mpkit;

namespace {

BlockIdempotent fixture(benchmark::State& state) {
  const Index n = state.range(0);
  return random_idempotent(n, n / 2, 10.0, 7);
}

template <Formula F>
void BM_Formula(benchmark::State& state) {
  const BlockIdempotent b = fixture(state);
  for (auto _ : state) benchmark::DoNotOptimize(matched_by(F, b.idempotent, {}, &b.block));
}

void BM_AbsOp(benchmark::State& state) {
  const BlockIdempotent b = fixture(state);
  for (auto _ : state) benchmark::DoNotOptimize(abs_op(b.idempotent.matrix()));
}

void BM_Pinv(benchmark::State& state) {
  const BlockIdempotent b = fixture(state);
  for (auto _ : state) benchmark::DoNotOptimize(pinv(b.idempotent.matrix()));
}

void BM_VerifyAll(benchmark::State& state) {
  const BlockIdempotent b = fixture(state);
  for (auto _ : state) benchmark::DoNotOptimize(verify_all(b.idempotent, {}, {}, b.block));
}

}  // namespace

BENCHMARK(BM_Formula<Formula::original>)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Formula<Formula::simplified_qstar>)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Formula<Formula::simplified_q>)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Formula<Formula::symmetric>)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Formula<Formula::block>)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AbsOp)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Pinv)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_VerifyAll)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
