#include <benchmark/benchmark.h>

#include "mpwm/analog.hpp"
#include "mpwm/metrics.hpp"
#include "mpwm/modwave.hpp"
#include "mpwm/spectral.hpp"

using namespace mpwm;

static void BM_MpwmWave(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto cfg = ModulatorConfig::mpwm(n, n / 3);
    std::uint32_t d = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mpwm_wave(cfg, {d, 0}));
        d = (d + 1) & (cfg.period_cycles() - 1);
    }
    state.SetItemsProcessed(state.iterations() * cfg.period_cycles());
}
BENCHMARK(BM_MpwmWave)->Arg(8)->Arg(12)->Arg(16);

static void BM_MpwmDecoder(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto cfg = ModulatorConfig::mpwm(n, n / 3);
    for (auto _ : state) benchmark::DoNotOptimize(mpwm_wave_decoder(cfg, {cfg.period_cycles() / 3, 0}));
    state.SetItemsProcessed(state.iterations() * cfg.period_cycles());
}
BENCHMARK(BM_MpwmDecoder)->Arg(8)->Arg(12);

static void BM_DftPeriod(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto wave = generate(ModulatorConfig::mpwm(n, 3), (1u << n) / 3);
    for (auto _ : state) benchmark::DoNotOptimize(dft_period(wave));
}
BENCHMARK(BM_DftPeriod)->Arg(8)->Arg(12)->Arg(16);

static void BM_SuperposeCoeffs(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto wave = generate(ModulatorConfig::mpwm(n, 3), (1u << n) / 3);
    for (auto _ : state) benchmark::DoNotOptimize(superpose_coeffs(wave));
}
BENCHMARK(BM_SuperposeCoeffs)->Arg(6)->Arg(8)->Arg(10);

static void BM_SteadyRipple(benchmark::State& state) {
    const auto cfg = ModulatorConfig::pwm(12);
    const FilterModel fm{0.01 / cfg.period()};
    for (auto _ : state) benchmark::DoNotOptimize(steady_ripple(cfg, {2048, 0}, fm));
}
BENCHMARK(BM_SteadyRipple);

static void BM_WorstRipple(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto cfg = ModulatorConfig::mpwm(n, 3);
    const FilterModel fm{0.04 / cfg.period()};
    for (auto _ : state) benchmark::DoNotOptimize(worst_ripple(cfg, fm));
}
BENCHMARK(BM_WorstRipple)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_FilterResponse(benchmark::State& state) {
    const auto cfg = ModulatorConfig::mpwm(10, 3);
    const auto trace = repeat_periods(to_analog(generate(cfg, 300u), EdgeModel{1e-9, 0, 1e-9, 1e-9, 1.0}, 16), 8);
    const FilterModel fm{0.05 / cfg.period()};
    for (auto _ : state) benchmark::DoNotOptimize(filter_response(trace, fm));
    state.SetItemsProcessed(state.iterations() * trace.samples.size());
}
BENCHMARK(BM_FilterResponse);

static void BM_Inl(benchmark::State& state) {
    const auto cfg = ModulatorConfig::mpwm(12, 3);
    const EdgeModel em{1e-9, 0, 0, 0, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(inl(cfg, em));
}
BENCHMARK(BM_Inl)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
