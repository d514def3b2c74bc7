#include "mpwm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/trigamma.hpp>
#include <fmt/format.h>

#include "fft.hpp"

namespace mpwm {

namespace {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

int log2_exact(std::size_t len) {
    if (len < 2 || (len & (len - 1)) != 0) {
        throw ParameterError(fmt::format("waveform length {} is not a power of two", len));
    }
    int n = 0;
    while ((std::size_t{1} << n) < len) ++n;
    return n;
}

// sin(k pi / N) / (k pi), k >= 1
double slot_envelope(std::size_t k, double slots) {
    const double kd = static_cast<double>(k);
    return std::sin(kd * pi / slots) / (kd * pi);
}

}  // namespace

std::size_t default_harmonics(int n) {
    return std::size_t{1} << (n - 1);
}

Spectrum unit_signal_coeffs(int n, std::uint32_t m, std::size_t harmonics, double fundamental_hz) {
    if (n < 1 || n > 16) throw ParameterError(fmt::format("n = {} outside 1..16", n));
    const std::uint32_t slots = std::uint32_t{1} << n;
    if (m >= slots) throw ParameterError(fmt::format("slot index m = {} outside 0..{}", m, slots - 1));
    if (harmonics == 0) harmonics = default_harmonics(n);
    const double N = slots;
    Spectrum s{n, fundamental_hz, std::vector<cplx>(harmonics + 1)};
    s.coeffs[0] = 1.0 / N;
    for (std::size_t k = 1; k <= harmonics; ++k) {
        const double phase = -static_cast<double>(k) * (pi / N + 2.0 * static_cast<double>(m) * pi / N);
        s.coeffs[k] = std::polar(slot_envelope(k, N), phase);
    }
    return s;
}

Spectrum superpose_coeffs(const BitWaveform& wave, std::size_t harmonics) {
    const int n = log2_exact(wave.size());
    if (n > 12) throw ParameterError(fmt::format("superpose_coeffs supports n <= 12, got {}", n));
    if (harmonics == 0) harmonics = default_harmonics(n);
    const std::size_t slots = wave.size();
    const double N = static_cast<double>(slots);

    // e^{-j pi i / N}: the unit-slot phase of slot m at harmonic k is index k(2m+1) mod 2N.
    std::vector<cplx> twiddle(2 * slots);
    for (std::size_t i = 0; i < twiddle.size(); ++i) {
        twiddle[i] = std::polar(1.0, -pi * static_cast<double>(i) / N);
    }
    std::vector<std::size_t> occupied;
    for (std::size_t m = 0; m < slots; ++m) {
        if (wave[m]) occupied.push_back(m);
    }

    Spectrum s{n, wave.f_clk() / N, std::vector<cplx>(harmonics + 1)};
    s.coeffs[0] = static_cast<double>(occupied.size()) / N;
    for (std::size_t k = 1; k <= harmonics; ++k) {
        const std::size_t kk = k % (2 * slots);
        cplx sum{0.0, 0.0};
        for (auto m : occupied) sum += twiddle[(kk * (2 * m + 1)) % (2 * slots)];
        s.coeffs[k] = sum * slot_envelope(k, N);
    }
    return s;
}

Spectrum superpose_coeffs(const ModulatorConfig& cfg, const DutyCode& duty, std::size_t harmonics) {
    return superpose_coeffs(generate(cfg, duty), harmonics);
}

Spectrum dft_period(const BitWaveform& wave, std::size_t harmonics) {
    const int n = log2_exact(wave.size());
    if (harmonics == 0) harmonics = default_harmonics(n);
    const std::size_t slots = wave.size();
    const double N = static_cast<double>(slots);

    std::vector<double> samples(wave.bits().begin(), wave.bits().end());
    std::vector<cplx> bins(slots / 2 + 1);
    detail::real_forward(samples, bins);

    auto bin = [&](std::size_t k) {
        const std::size_t r = k % slots;
        return r <= slots / 2 ? bins[r] : std::conj(bins[slots - r]);
    };

    Spectrum s{n, wave.f_clk() / N, std::vector<cplx>(harmonics + 1)};
    s.coeffs[0] = bins[0] / N;
    for (std::size_t k = 1; k <= harmonics; ++k) {
        const double x = static_cast<double>(k) * pi / N;
        const cplx hold = std::polar(std::sin(x) / x, -x);
        s.coeffs[k] = bin(k) / N * hold;
    }
    return s;
}

double series_power(const Spectrum& spectrum) {
    const std::size_t slots = std::size_t{1} << spectrum.n;
    const std::size_t K = spectrum.harmonics();
    if (K < slots / 2) {
        throw ParameterError(fmt::format("series_power needs at least {} harmonics, got {}", slots / 2, K));
    }
    double stored = 0.0;
    for (std::size_t k = 1; k <= K; ++k) stored += std::norm(spectrum.coeffs[k]);

    // For a held 2^n-slot signal |a_k|^2 = w_r / k^2 with r = k mod N and
    // w_r = |a_r|^2 r^2 = w_{N-r}. Sum each residue class beyond K with the
    // trigamma identity sum_{l>=0} 1/(x+l)^2 = psi'(x).
    const double N = static_cast<double>(slots);
    double tail = 0.0;
    for (std::size_t r = 1; r < slots; ++r) {
        const std::size_t rr = std::min(r, slots - r);
        const double weight = std::norm(spectrum.coeffs[rr]) * static_cast<double>(rr) * static_cast<double>(rr);
        if (weight == 0.0) continue;
        std::size_t first = r;
        if (first <= K) first += slots * ((K - r) / slots + 1);
        tail += weight * boost::math::trigamma(static_cast<double>(first) / N) / (N * N);
    }
    return std::norm(spectrum.coeffs[0]) + 2.0 * (stored + tail);
}

HarmonicSummary dominant_harmonics(const Spectrum& spectrum) {
    const std::size_t K = spectrum.harmonics();
    if (K < 3) throw ParameterError(fmt::format("dominant_harmonics needs at least 3 harmonics, got {}", K));
    const double dc = std::abs(spectrum.coeffs[0]);
    double peak = 0.0;
    for (std::size_t k = 1; k <= K; ++k) peak = std::max(peak, std::abs(spectrum.coeffs[k]));
    const double floor = 1e-12 * (dc + peak);

    constexpr double tie = 1e-9;
    std::size_t best = 0;
    std::size_t runner = 0;
    auto amp = [&](std::size_t k) { return std::abs(spectrum.coeffs[k]); };
    for (std::size_t k = 1; k <= K; ++k) {
        const double a = amp(k);
        if (a <= floor) continue;
        if (best == 0 || a > amp(best) * (1.0 + tie)) {
            runner = best;
            best = k;
        } else if (runner == 0 || a > amp(runner) * (1.0 + tie)) {
            runner = k;
        }
    }

    auto make = [&](std::size_t k) {
        Harmonic h;
        h.k = k;
        h.frequency_hz = spectrum.frequency(k);
        h.amplitude = amp(k);
        h.amplitude_over_dc = dc > 0.0 ? h.amplitude / dc : 0.0;
        return h;
    };
    HarmonicSummary summary;
    if (best != 0) summary.first = make(best);
    if (runner != 0) summary.second = make(runner);
    return summary;
}

}  // namespace mpwm
