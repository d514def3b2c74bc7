#pragma once

// Fourier-series coefficients of one modulation period, a_k = (1/T) int x(t) e^{-jk 2pi t/T} dt.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mpwm/modwave.hpp"

namespace mpwm {

struct Spectrum {
    int n = 0;                  ///< the period holds 2^n equal slots
    double fundamental_hz = 1.0;  ///< 1/T
    std::vector<std::complex<double>> coeffs;  ///< a_0 .. a_K

    std::size_t harmonics() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
    double frequency(std::size_t k) const { return static_cast<double>(k) * fundamental_hz; }
    double dc() const { return coeffs.empty() ? 0.0 : coeffs[0].real(); }
};

struct Harmonic {
    std::size_t k = 0;
    double frequency_hz = 0.0;
    double amplitude = 0.0;          ///< |a_k|
    double amplitude_over_dc = 0.0;  ///< |a_k| / a_0, zero when a_0 is zero
};

/// The two strongest nonzero harmonics. Both empty when the AC content is zero.
struct HarmonicSummary {
    std::optional<Harmonic> first;
    std::optional<Harmonic> second;

    bool has_harmonic() const { return first.has_value(); }
};

/// Default number of reported harmonics: 2^(n-1).
std::size_t default_harmonics(int n);

/// Coefficients of the unit slot [mT/2^n, (m+1)T/2^n).
/// a_0 = 2^-n, a_k = e^{-jk(pi + 2 m pi)/2^n} sin(k pi/2^n)/(k pi).
Spectrum unit_signal_coeffs(int n, std::uint32_t m, std::size_t harmonics = 0, double fundamental_hz = 1.0);

/// Analytic spectrum as the sum of unit-slot coefficients over the high cycles.
Spectrum superpose_coeffs(const BitWaveform& wave, std::size_t harmonics = 0);
Spectrum superpose_coeffs(const ModulatorConfig& cfg, const DutyCode& duty, std::size_t harmonics = 0);

/// Numeric spectrum: FFT of the cycle samples with the zero-order-hold
/// correction, so bin k equals the continuous-time a_k of the held waveform.
Spectrum dft_period(const BitWaveform& wave, std::size_t harmonics = 0);

/// Two-sided sum of |a_k|^2 over all k. Harmonics beyond the stored ones are
/// added in closed form from the held-signal structure; needs K >= 2^(n-1).
double series_power(const Spectrum& spectrum);

/// Strongest and second-strongest harmonics among k >= 1; ties go to the
/// lower frequency. Needs at least three harmonics.
HarmonicSummary dominant_harmonics(const Spectrum& spectrum);

}  // namespace mpwm
