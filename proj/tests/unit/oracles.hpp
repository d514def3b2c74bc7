#pragma once

// Reference constructions written independently of the library code paths.

#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

// Van der Corput visiting order of 2^sf sub-regions, built by doubling:
// order(k+1) = 2*order(k) followed by 2*order(k)+1.
inline std::vector<std::uint32_t> residual_order(int sf) {
    std::vector<std::uint32_t> order{0};
    for (int level = 0; level < sf; ++level) {
        std::vector<std::uint32_t> next;
        for (auto v : order) next.push_back(2 * v);
        for (auto v : order) next.push_back(2 * v + 1);
        order = next;
    }
    return order;
}

// Sub-region s carries q = D / SN cycles, plus one if s is among the first
// r = D mod SN entries of the residual order. Each sub-pulse starts the block.
inline std::vector<std::uint8_t> split_pulse_wave(int n, int sf, std::uint32_t duty) {
    const std::uint32_t sn = 1u << sf;
    const std::uint32_t block = 1u << (n - sf);
    const auto order = residual_order(sf);
    std::vector<std::uint32_t> width(sn, duty / sn);
    for (std::uint32_t i = 0; i < duty % sn; ++i) width[order[i]] += 1;
    std::vector<std::uint8_t> bits(std::size_t{1} << n, 0);
    for (std::uint32_t s = 0; s < sn; ++s) {
        for (std::uint32_t c = 0; c < width[s]; ++c) bits[s * block + c] = 1;
    }
    return bits;
}

// First-order noise shaper as a phase accumulator preloaded to half range;
// the carry out is the output bit.
inline std::vector<std::uint8_t> accumulator_wave(int n, std::uint32_t duty) {
    const std::uint32_t full = 1u << n;
    std::uint32_t acc = full / 2;
    std::vector<std::uint8_t> bits(full);
    for (std::uint32_t i = 0; i < full; ++i) {
        acc += duty;
        bits[i] = acc >= full ? 1 : 0;
        if (acc >= full) acc -= full;
    }
    return bits;
}

inline std::uint32_t cyclic_rising_edges(const std::vector<std::uint8_t>& bits) {
    std::uint32_t count = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] && !bits[(i + bits.size() - 1) % bits.size()]) ++count;
    }
    return count;
}

// Fourier coefficient of a 0/1 slot pattern, summed slot by slot:
// a_k = sum_m e^{-j k pi (2m+1)/N} sin(k pi/N) / (k pi), a_0 = ones/N.
inline std::complex<double> slot_coefficient(const std::vector<std::uint8_t>& bits, std::size_t k) {
    const long double N = static_cast<long double>(bits.size());
    const long double pi = std::numbers::pi_v<long double>;
    if (k == 0) {
        long double ones = 0;
        for (auto b : bits) ones += b;
        return {static_cast<double>(ones / N), 0.0};
    }
    const long double kk = static_cast<long double>(k);
    const long double env = std::sin(kk * pi / N) / (kk * pi);
    long double re = 0, im = 0;
    for (std::size_t m = 0; m < bits.size(); ++m) {
        if (!bits[m]) continue;
        const long double phase = -kk * pi * (2.0L * static_cast<long double>(m) + 1.0L) / N;
        re += std::cos(phase);
        im += std::sin(phase);
    }
    return {static_cast<double>(re * env), static_cast<double>(im * env)};
}

}  // namespace oracle
