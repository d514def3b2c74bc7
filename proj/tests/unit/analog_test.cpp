#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "mpwm/analog.hpp"

using namespace mpwm;

namespace {

constexpr double pi = std::numbers::pi;

// One period of sin(2 pi f t) as exact cell averages.
AnalogTrace sine_period(double f, std::size_t samples) {
    AnalogTrace tr;
    tr.sample_rate = f * static_cast<double>(samples);
    tr.period_samples = samples;
    tr.samples.resize(samples);
    const double w = 2.0 * pi * f;
    const double h = 1.0 / tr.sample_rate;
    for (std::size_t i = 0; i < samples; ++i) {
        const double a = static_cast<double>(i) * h;
        tr.samples[i] = (std::cos(w * a) - std::cos(w * (a + h))) / (w * h);
    }
    return tr;
}

// Magnitude of the first Fourier bin of a one-period sample sequence.
double first_bin(const std::vector<double>& v) {
    std::complex<double> acc{0.0, 0.0};
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) acc += v[i] * std::polar(1.0, -2.0 * pi * static_cast<double>(i) / n);
    return 2.0 * std::abs(acc) / n;
}

// Last time the filtered unit step leaves the band, found by direct simulation.
double simulated_settling(double f_c, double band, double dt, std::size_t samples) {
    AnalogTrace step;
    step.sample_rate = 1.0 / dt;
    step.period_samples = samples;
    step.samples.assign(samples, 1.0);
    const auto y = filter_response(step, FilterModel{f_c});
    double last = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        if (std::abs(y.samples[i] - 1.0) > band) last = y.time(i + 1);
    }
    return last;
}

}  // namespace

TEST(ToAnalog, IdealEdgesMeanIsDutyFraction) {
    for (std::uint32_t d : {0u, 1u, 37u, 128u, 255u}) {
        const auto cfg = ModulatorConfig::mpwm(8, 3);
        const auto tr = to_analog(generate(cfg, d), EdgeModel::ideal(2.5), 16);
        EXPECT_NEAR(dc_average(tr), 2.5 * d / 256.0, 1e-15) << d;
    }
}

TEST(ToAnalog, AllLowIsZero) {
    const auto tr = to_analog(generate(ModulatorConfig::pwm(6), 0u), EdgeModel{1e-9, 0.0, 2e-9, 2e-9, 1.0}, 16);
    for (double v : tr.samples) EXPECT_EQ(v, 0.0);
}

TEST(ToAnalog, WidthErrorShiftsPulseAreaByDeltaW) {
    const auto cfg = ModulatorConfig::pwm(8, 100e6);
    const auto wave = generate(cfg, 1u);
    const EdgeModel slow{1.5e-9, 0.5e-9, 2e-9, 3e-9, 1.2};
    const double area_ideal = dc_average(to_analog(wave, EdgeModel::ideal(1.2), 64)) * cfg.period();
    const double area = dc_average(to_analog(wave, slow, 64)) * cfg.period();
    EXPECT_NEAR(area - area_ideal, 1.2 * 1e-9, 1e-21);
}

TEST(ToAnalog, TraceMeanMatchesClosedForm) {
    const EdgeModel em{0.7e-9, 0.2e-9, 1.6e-9, 2.4e-9, 1.0};
    for (auto cfg : {ModulatorConfig::mpwm(8, 3), ModulatorConfig::pcm(8), ModulatorConfig::fons(8)}) {
        for (std::uint32_t d : {1u, 2u, 77u, 128u, 250u}) {
            const double trace_mean = dc_average(to_analog(generate(cfg, d), em, 32));
            EXPECT_NEAR(trace_mean, dc_average(cfg, {d, 0}, em), 1e-13) << to_string(cfg.kind) << " D=" << d;
        }
    }
}

TEST(ToAnalog, HrEdgesOnTheFineGrid) {
    const auto cfg = ModulatorConfig::hrmpwm(6, 2, 4);
    const auto edges = hr_mpwm_wave(cfg, {21, 5});
    const double mean = dc_average(to_analog(edges, EdgeModel::ideal(), 64));
    EXPECT_NEAR(mean, (21.0 + 5.0 / 16.0) / 64.0, 1e-15);
    EXPECT_DOUBLE_EQ(dc_average(edges, EdgeModel::ideal()), (21.0 + 5.0 / 16.0) / 64.0);
}

TEST(ToAnalog, RejectsUnresolvableInputs) {
    const auto wave = generate(ModulatorConfig::pwm(6, 100e6), 5u);
    EXPECT_THROW(to_analog(wave, EdgeModel::ideal(), 3), ParameterError);
    // A 0.1 ns ramp is shorter than one 10 ns / 4 sample interval.
    EXPECT_THROW(to_analog(wave, EdgeModel{0, 0, 0.1e-9, 0.1e-9, 1.0}, 4), ParameterError);
    // Ramps far longer than a one-cycle pulse overlap.
    EXPECT_THROW(to_analog(generate(ModulatorConfig::pcm(6, 100e6), 5u), EdgeModel{0, 0, 40e-9, 40e-9, 1.0}, 64),
                 ParameterError);
}

TEST(DcAverage, Examples) {
    EXPECT_DOUBLE_EQ(dc_average(ModulatorConfig::mpwm(12, 3), {2048, 0}, EdgeModel::ideal(3.3)), 1.65);
    const EdgeModel dw{1e-9, 0.0, 0.0, 0.0, 1.0};
    const double lsb = 1.0 / 4096.0;
    const double mpwm = dc_average(ModulatorConfig::mpwm(12, 3, 100e6), {100, 0}, dw);
    EXPECT_NEAR((mpwm - 100 * lsb) / lsb, 0.8, 1e-12);
    const double pcm = dc_average(ModulatorConfig::pcm(12, 100e6), {2048, 0}, dw);
    EXPECT_NEAR((pcm - 2048 * lsb) / lsb, 204.8, 1e-9);
}

TEST(DcAverage, RejectsPartialPeriods) {
    auto tr = to_analog(generate(ModulatorConfig::pwm(4), 3u), EdgeModel::ideal(), 4);
    tr.samples.pop_back();
    EXPECT_THROW(dc_average(tr), ParameterError);
}

TEST(FilterResponse, ConstantInputPassesUnchanged) {
    AnalogTrace c;
    c.sample_rate = 1e6;
    c.period_samples = 1000;
    c.samples.assign(1000, 0.37);
    const auto y = filter_response(c, FilterModel{1e3}, FilterStart::periodic);
    for (double v : y.samples) EXPECT_NEAR(v, 0.37, 1e-14);
}

TEST(FilterResponse, SinusoidAtCutoffIsDownByRootTwo) {
    const double f_c = 1234.5;
    const auto x = sine_period(f_c, 4096);
    const auto y = filter_response(x, FilterModel{f_c}, FilterStart::periodic);
    EXPECT_NEAR(first_bin(y.samples) / first_bin(x.samples), 1.0 / std::numbers::sqrt2, 1e-6);
}

TEST(FilterResponse, SquareWaveHundredTimesCutoffLosesEightyDecibels) {
    const double f_c = 1e3;
    const auto x = to_analog(generate(ModulatorConfig::pwm(6, 100.0 * f_c * 64.0), 32u), EdgeModel::ideal(), 8);
    const auto y = filter_response(x, FilterModel{f_c}, FilterStart::periodic);
    const double ratio = first_bin(y.samples) / first_bin(x.samples);
    EXPECT_LE(20.0 * std::log10(ratio), -80.0);
}

TEST(FilterResponse, PeriodicStartIsItsOwnSteadyState) {
    const auto x = to_analog(generate(ModulatorConfig::mpwm(6, 2), 19u), EdgeModel::ideal(), 8);
    const FilterModel fm{x.sample_rate / x.samples.size() * 0.3};
    const auto once = filter_response(x, fm, FilterStart::periodic);
    const auto twice = filter_response(repeat_periods(x, 2), fm, FilterStart::periodic);
    for (std::size_t i = 0; i < x.samples.size(); ++i) {
        EXPECT_NEAR(twice.samples[i + x.samples.size()], once.samples[i], 1e-12);
    }
}

TEST(FilterModel, ResponseAndTable) {
    const FilterModel fm{250.0};
    EXPECT_NEAR(std::abs(fm.response(250.0)), 1.0 / std::numbers::sqrt2, 1e-15);
    EXPECT_NEAR(std::arg(fm.response(250.0)), -pi / 2.0, 1e-15);
    const auto rows = filter_table(fm, 2.5, 25000.0, 5);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_NEAR(rows[2].frequency_hz, 250.0, 1e-9);
    EXPECT_NEAR(rows[2].magnitude_db, -10.0 * std::log10(2.0), 1e-9);
    EXPECT_NEAR(rows[4].magnitude_db, -80.0, 1e-6);
    EXPECT_THROW(FilterModel{0.0}.validate(), ParameterError);
    EXPECT_THROW(filter_table(fm, 10.0, 1.0, 5), ParameterError);
}

TEST(SteadyRipple, VanishesAsCutoffGoesToZero) {
    const auto cfg = ModulatorConfig::pwm(8);
    const double t = cfg.period();
    EXPECT_LT(steady_ripple(cfg, {128, 0}, FilterModel{1e-6 / t}), 1e-6);
}

TEST(SteadyRipple, TwelveBitPwmAtOnePercentCutoff) {
    const auto cfg = ModulatorConfig::pwm(12);
    const auto worst = worst_ripple(cfg, FilterModel{0.01 / cfg.period()});
    EXPECT_GT(worst.lsb, 0.625 / 2.0);
    EXPECT_LT(worst.lsb, 0.625 * 2.0);
    EXPECT_EQ(worst.duty, 2048u);
}

TEST(SteadyRipple, DoublingSmallCutoffQuadruplesRipple) {
    const auto cfg = ModulatorConfig::pwm(8);
    const double t = cfg.period();
    const double a = steady_ripple(cfg, {128, 0}, FilterModel{0.001 / t});
    const double b = steady_ripple(cfg, {128, 0}, FilterModel{0.002 / t});
    EXPECT_NEAR(b / a, 4.0, 0.04);
}

TEST(SteadyRipple, HarmonicSumAgreesWithTimeSimulation) {
    struct Case {
        ModulatorConfig cfg;
        std::uint32_t duty;
        double f_ct;
    };
    for (const auto& c : {Case{ModulatorConfig::pwm(8), 128, 0.02}, Case{ModulatorConfig::mpwm(8, 3), 77, 0.1},
                          Case{ModulatorConfig::pcm(8), 3, 0.4}, Case{ModulatorConfig::fons(8), 100, 0.5},
                          Case{ModulatorConfig::mpwm(10, 5), 513, 0.3}}) {
        const FilterModel fm{c.f_ct / c.cfg.period()};
        // Same output grid on both sides: 16 points per clock.
        const double harmonic = steady_ripple(c.cfg, {c.duty, 0}, fm, RippleOptions{16, 8});
        const double simulated = steady_ripple_simulated(c.cfg, {c.duty, 0}, fm, 16);
        EXPECT_NEAR(harmonic, simulated, 2e-3 * harmonic + 1e-9) << to_string(c.cfg.kind) << " D=" << c.duty;
    }
}

TEST(Settling, TwoHundredFiftyHertzOneLsbStep) {
    const double t = settling_time(FilterModel{250.0}, StepKind::one_lsb, 0.5, 12);
    EXPECT_GE(t, 0.6e-3);
    EXPECT_LE(t, 0.95e-3);
}

TEST(Settling, ScalesInverselyWithCutoff) {
    const double a = settling_time(FilterModel{250.0}, StepKind::one_lsb, 0.5, 12);
    const double b = settling_time(FilterModel{500.0}, StepKind::one_lsb, 0.5, 12);
    EXPECT_NEAR(a / b, 2.0, 0.02);
}

TEST(Settling, WideBandSettlesImmediately) {
    EXPECT_EQ(settling_time(FilterModel{250.0}, StepKind::one_lsb, 1e9, 12), 0.0);
    EXPECT_THROW(settling_time(FilterModel{250.0}, StepKind::one_lsb, 0.0, 12), ParameterError);
}

TEST(Settling, MatchesDirectSimulation) {
    const double f_c = 250.0;
    const double dt = 2e-8;
    for (auto [step, band] : {std::pair{StepKind::one_lsb, 0.5}, std::pair{StepKind::one_lsb, 0.02},
                              std::pair{StepKind::full_scale, 0.5}}) {
        const double exact = settling_time(FilterModel{f_c}, step, band, 12);
        const double rel_band = band / step_lsb(step, 12);
        const double sim = simulated_settling(f_c, rel_band, dt, static_cast<std::size_t>(2.5 * exact / dt) + 10);
        EXPECT_NEAR(sim, exact, 3.0 * dt) << band;
    }
}

TEST(Settling, FullScaleTakesLonger) {
    EXPECT_GT(settling_time(FilterModel{250.0}, StepKind::full_scale, 0.5, 12),
              settling_time(FilterModel{250.0}, StepKind::one_lsb, 0.5, 12));
    EXPECT_EQ(step_lsb(StepKind::full_scale, 12), 4095.0);
}
