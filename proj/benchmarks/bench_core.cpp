#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "riskbandit/cpd.hpp"
#include "riskbandit/env.hpp"
#include "riskbandit/policies.hpp"
#include "riskbandit/risk.hpp"
#include "riskbandit/rng.hpp"

using namespace riskbandit;

namespace {

std::vector<int> stationary_bits(std::size_t n, double p, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::vector<int> bits(n);
    for (auto& b : bits) b = draw_u01(g) < p ? 1 : 0;
    return bits;
}

void BM_DetectorStream(benchmark::State& state) {
    const auto bits = stationary_bits(static_cast<std::size_t>(state.range(0)), 0.5, 1);
    for (auto _ : state) {
        RbocpdBank bank(0.05);
        long restarts = 0;
        for (int z : bits) restarts += bank.step(z).restart;
        benchmark::DoNotOptimize(restarts);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DetectorStream)->RangeMultiplier(2)->Range(256, 8192)->Complexity();

void BM_GlrStream(benchmark::State& state) {
    const auto bits = stationary_bits(static_cast<std::size_t>(state.range(0)), 0.5, 2);
    for (auto _ : state) {
        GlrDetector det(0.05);
        long restarts = 0;
        for (int z : bits) restarts += det.step(z).restart;
        benchmark::DoNotOptimize(restarts);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GlrStream)->RangeMultiplier(2)->Range(256, 2048)->Complexity();

void BM_EmpiricalCvar(benchmark::State& state) {
    std::mt19937_64 g(3);
    std::vector<double> v(static_cast<std::size_t>(state.range(0)));
    for (auto& x : v) x = draw_u01(g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(empirical_cvar(v, 0.45));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EmpiricalCvar)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_PolicySteps(benchmark::State& state) {
    const long T = state.range(0);
    const auto inst = generate_instance({5, T, 2, 0.2, 0, false}, 7);
    PolicyConfig cfg;
    cfg.measure = {RiskKind::CVaR, 0.45};
    cfg.bonus_scale = 0.004;
    cfg.beta = default_beta(5, 2, T);
    for (auto _ : state) {
        Policy policy(PolicyKind::RbocpdRiskLcb, 5, cfg, 11);
        for (long t = 1; t <= T; ++t) {
            const long arm = policy.choose(t);
            policy.observe(t, arm, coupled_reward(9, arm, t, inst.mean_at(arm, t)));
        }
        benchmark::DoNotOptimize(policy.total_restarts());
    }
    state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_PolicySteps)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
