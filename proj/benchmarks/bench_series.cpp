#include <benchmark/benchmark.h>

#include "qtheta/dsl.hpp"
#include "qtheta/theta.hpp"

using namespace qtheta;

static void BM_theta_product_order(benchmark::State& state) {
    const auto order = state.range(0);
    for (auto _ : state) {
        Series s = gf({Kind::t, {1, 3, 5}}, order);
        benchmark::DoNotOptimize(s);
    }
    state.SetComplexityN(order);
}
BENCHMARK(BM_theta_product_order)
    ->Arg(1 << 12)
    ->Arg(1 << 14)
    ->Arg(1 << 16)
    ->Arg(100000)
    ->Unit(benchmark::kMillisecond)
    ->Complexity();

static void BM_dense_mul(benchmark::State& state) {
    const auto order = state.range(0);
    // Two dense operands: the worst case for the convolution kernel.
    const Series a = mul(theta_psi(order), theta_psi(order, 2));
    const Series b = mul(theta_psi(order, 3), theta_psi(order));
    for (auto _ : state) {
        Series s = mul(a, b);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_dense_mul)->Arg(1 << 10)->Arg(1 << 12)->Unit(benchmark::kMillisecond);

static void BM_extract_progression(benchmark::State& state) {
    const Series s = gf({Kind::N, {1, 3, 3}}, state.range(0));
    for (auto _ : state) {
        Series lane = extract_progression(s, 8, 3);
        benchmark::DoNotOptimize(lane);
    }
}
BENCHMARK(BM_extract_progression)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

static void BM_eval_identity_side(benchmark::State& state) {
    const ThetaExpr e = parse_expr(
        "phi(q^16)*phi(q^48) + 4*q^16*psi(q^32)*psi(q^96) + 2*q*phi(q^48)*psi(q^8) + "
        "2*q^3*phi(q^16)*psi(q^24) + 6*q^4*psi(q^8)*psi(q^24) + 4*q^13*psi(q^8)*psi(q^96) + "
        "4*q^7*psi(q^24)*psi(q^32)");
    LeafCache cache;
    for (auto _ : state) {
        Series s = eval(e, state.range(0), &cache);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_eval_identity_side)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_oracle_count(benchmark::State& state) {
    const SeqSpec spec{Kind::t, {2, 3, 3}};
    std::int64_t n = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(oracle_count(spec, n));
}
BENCHMARK(BM_oracle_count)->Arg(1000)->Arg(16000);

BENCHMARK_MAIN();
