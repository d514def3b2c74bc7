#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "mpwm/spectral.hpp"
#include "oracles.hpp"

using namespace mpwm;
using cplx = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

BitWaveform single_slot(int n, std::uint32_t m) {
    std::vector<std::uint8_t> bits(std::size_t{1} << n, 0);
    bits[m] = 1;
    return BitWaveform(bits, 1.0);
}

double max_diff(const Spectrum& a, const Spectrum& b) {
    EXPECT_EQ(a.coeffs.size(), b.coeffs.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < std::min(a.coeffs.size(), b.coeffs.size()); ++k) {
        worst = std::max(worst, std::abs(a.coeffs[k] - b.coeffs[k]));
    }
    return worst;
}

}  // namespace

TEST(UnitSignal, DcIsOneOverSlots) {
    for (std::uint32_t m = 0; m < 32; ++m) EXPECT_DOUBLE_EQ(unit_signal_coeffs(5, m).coeffs[0].real(), 1.0 / 32.0);
}

TEST(UnitSignal, SixteenthHarmonicOfSlotZero) {
    const auto s = unit_signal_coeffs(5, 0, 16);
    const cplx expected{0.0, -1.0 / (16.0 * pi)};
    EXPECT_NEAR(s.coeffs[16].real(), expected.real(), 1e-17);
    EXPECT_NEAR(s.coeffs[16].imag(), expected.imag(), 1e-17);
}

TEST(UnitSignal, AllSlotsSumToConstantOne) {
    Spectrum total = unit_signal_coeffs(5, 0, 40);
    for (std::uint32_t m = 1; m < 32; ++m) {
        const auto s = unit_signal_coeffs(5, m, 40);
        for (std::size_t k = 0; k < total.coeffs.size(); ++k) total.coeffs[k] += s.coeffs[k];
    }
    EXPECT_NEAR(total.coeffs[0].real(), 1.0, 1e-15);
    for (std::size_t k = 1; k < total.coeffs.size(); ++k) EXPECT_LT(std::abs(total.coeffs[k]), 1e-15) << k;
}

TEST(UnitSignal, MatchesSlotSumOracle) {
    for (std::uint32_t m = 0; m < 32; ++m) {
        const auto s = unit_signal_coeffs(5, m, 100);
        const std::vector<std::uint8_t> bits = single_slot(5, m).bits();
        for (std::size_t k = 0; k <= 100; ++k) {
            EXPECT_LT(std::abs(s.coeffs[k] - oracle::slot_coefficient(bits, k)), 1e-15) << "m=" << m << " k=" << k;
        }
    }
}

TEST(Superpose, HalfScalePwmHasOddHarmonicsOnly) {
    const auto s = superpose_coeffs(ModulatorConfig::pwm(5), {16, 0});
    EXPECT_NEAR(std::abs(s.coeffs[1]), 1.0 / pi, 1e-15);
    for (std::size_t k = 2; k < s.coeffs.size(); k += 2) EXPECT_LT(std::abs(s.coeffs[k]), 1e-15) << k;
    for (std::size_t k = 1; k < s.coeffs.size(); k += 2) {
        EXPECT_NEAR(std::abs(s.coeffs[k]), 1.0 / (static_cast<double>(k) * pi), 1e-15) << k;
    }
}

TEST(Superpose, ZeroDutyHasNoCoefficients) {
    const auto s = superpose_coeffs(ModulatorConfig::mpwm(5, 2), {0, 0});
    for (const auto& c : s.coeffs) EXPECT_EQ(std::abs(c), 0.0);
}

TEST(Superpose, MatchesSlotSumOracleForEveryDuty) {
    for (int sf : {0, 1, 2, 3}) {
        const auto cfg = ModulatorConfig::mpwm(6, sf);
        for (std::uint32_t d = 0; d < 64; ++d) {
            const auto wave = mpwm_wave(cfg, {d, 0});
            const auto s = superpose_coeffs(wave, 90);
            for (std::size_t k = 0; k <= 90; ++k) {
                ASSERT_LT(std::abs(s.coeffs[k] - oracle::slot_coefficient(wave.bits(), k)), 1e-13)
                    << "sf=" << sf << " D=" << d << " k=" << k;
            }
        }
    }
}

TEST(DftPeriod, AllHighIsPureDc) {
    const auto s = dft_period(BitWaveform(std::vector<std::uint8_t>(32, 1), 1.0));
    EXPECT_NEAR(s.coeffs[0].real(), 1.0, 1e-15);
    for (std::size_t k = 1; k < s.coeffs.size(); ++k) EXPECT_LT(std::abs(s.coeffs[k]), 1e-15);
}

TEST(DftPeriod, AgreesWithSuperpositionOnTwoSubPulses) {
    const auto wave = mpwm_wave(ModulatorConfig::mpwm(5, 1), {16, 0});
    EXPECT_LE(max_diff(dft_period(wave), superpose_coeffs(wave)), 1e-12);
}

TEST(DftPeriod, SquareWaveEvenBinVanishes) {
    const auto s = dft_period(mpwm_wave(ModulatorConfig::pwm(5), {16, 0}));
    EXPECT_LT(std::abs(s.coeffs[2]), 1e-15);
}

TEST(DftPeriod, AgreesWithSuperpositionBeyondNyquist) {
    const auto wave = mpwm_wave(ModulatorConfig::mpwm(7, 2), {37, 0});
    EXPECT_LE(max_diff(dft_period(wave, 700), superpose_coeffs(wave, 700)), 1e-12);
}

TEST(DftPeriod, RejectsNonPowerOfTwoLength) {
    EXPECT_THROW(dft_period(BitWaveform({1, 0, 1}, 1.0)), ParameterError);
}

TEST(SeriesPower, ParsevalMatchesMeanSquare) {
    for (int n : {3, 5, 8}) {
        for (int sf = 0; sf < n; ++sf) {
            const auto cfg = ModulatorConfig::mpwm(n, sf);
            for (std::uint32_t d = 0; d < cfg.period_cycles(); d += 3) {
                const auto s = superpose_coeffs(cfg, {d, 0});
                const double mean_square = static_cast<double>(d) / static_cast<double>(cfg.period_cycles());
                ASSERT_NEAR(series_power(s), mean_square, 1e-12) << "n=" << n << " sf=" << sf << " D=" << d;
            }
        }
    }
}

TEST(SeriesPower, NeedsHalfThePeriodOfHarmonics) {
    EXPECT_THROW(series_power(superpose_coeffs(ModulatorConfig::pwm(5), {3, 0}, 8)), ParameterError);
}

TEST(DominantHarmonics, SplitPulsesConcentrateAtSplitNumber) {
    auto s = superpose_coeffs(ModulatorConfig::mpwm(5, 2), {16, 0});
    s.fundamental_hz = 1.0;
    const auto h = dominant_harmonics(s);
    ASSERT_TRUE(h.first);
    EXPECT_EQ(h.first->k, 4u);
    EXPECT_DOUBLE_EQ(h.first->frequency_hz, 4.0);
    ASSERT_TRUE(h.second);
    EXPECT_EQ(h.second->k, 12u);
}

TEST(DominantHarmonics, PwmFundamental) {
    const auto h = dominant_harmonics(superpose_coeffs(ModulatorConfig::pwm(5), {16, 0}));
    ASSERT_TRUE(h.first);
    EXPECT_EQ(h.first->k, 1u);
    EXPECT_NEAR(h.first->amplitude_over_dc, 2.0 / pi, 1e-15);
}

TEST(DominantHarmonics, ConstantWaveHasNone) {
    const auto h = dominant_harmonics(dft_period(BitWaveform(std::vector<std::uint8_t>(16, 1), 1.0)));
    EXPECT_FALSE(h.first);
    EXPECT_FALSE(h.second);
    const auto z = dominant_harmonics(superpose_coeffs(ModulatorConfig::pwm(4), {0, 0}));
    EXPECT_FALSE(z.first);
}

TEST(DominantHarmonics, HalfScaleAtSplitNumberForEverySplit) {
    for (int n = 5; n <= 8; ++n) {
        for (int sf = 0; sf < n; ++sf) {
            const auto h = dominant_harmonics(superpose_coeffs(ModulatorConfig::mpwm(n, sf), {1u << (n - 1), 0}));
            ASSERT_TRUE(h.first);
            EXPECT_EQ(h.first->k, std::size_t{1} << sf) << "n=" << n << " sf=" << sf;
        }
    }
}

TEST(Spectrum, FundamentalFollowsClock) {
    const auto s = superpose_coeffs(mpwm_wave(ModulatorConfig::mpwm(5, 2, 64e6), {16, 0}));
    EXPECT_DOUBLE_EQ(s.fundamental_hz, 2e6);
    EXPECT_DOUBLE_EQ(s.frequency(4), 8e6);
}
