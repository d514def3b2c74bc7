#pragma once

// One-period digital output of the pulse modulators (PWM, PCM, FONS, MPWM,
// HR-MPWM). All generators are pure functions.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mpwm/error.hpp"

namespace mpwm {

enum class ModulatorKind { pwm, pcm, fons, mpwm, hrmpwm };

std::string_view to_string(ModulatorKind kind);
ModulatorKind parse_modulator_kind(std::string_view text);

struct ModulatorConfig {
    ModulatorKind kind = ModulatorKind::mpwm;
    int n = 12;           ///< counter bit width
    int sf = 0;           ///< splitting factor, SN = 2^sf
    double f_clk = 100e6; ///< Hz
    int fine_bits = 0;    ///< HR-MPWM delay-line resolution

    static ModulatorConfig pwm(int n, double f_clk = 100e6);
    static ModulatorConfig pcm(int n, double f_clk = 100e6);
    static ModulatorConfig fons(int n, double f_clk = 100e6);
    static ModulatorConfig mpwm(int n, int sf, double f_clk = 100e6);
    static ModulatorConfig hrmpwm(int n, int sf, int fine_bits, double f_clk = 100e6);

    /// Throws ParameterError naming the first violated bound.
    void validate() const;

    std::uint32_t period_cycles() const { return std::uint32_t{1} << n; }
    std::uint32_t split_number() const { return std::uint32_t{1} << sf; }
    double clock_period() const { return 1.0 / f_clk; }
    double period() const { return static_cast<double>(period_cycles()) / f_clk; }
    /// Fine delay-line pitch; zero without a delay line.
    double fine_delay() const;
    /// PWM, PCM, MPWM and HR-MPWM share the rearranged-counter comparator.
    bool comparator_family() const { return kind != ModulatorKind::fons; }
};

struct DutyCode {
    std::uint32_t coarse = 0;
    std::uint32_t fine = 0;
};

void validate_duty(const ModulatorConfig& cfg, const DutyCode& duty);

/// One modulation period sampled once per clock.
class BitWaveform {
public:
    BitWaveform() = default;
    BitWaveform(std::vector<std::uint8_t> bits, double f_clk);

    const std::vector<std::uint8_t>& bits() const { return bits_; }
    std::size_t size() const { return bits_.size(); }
    bool operator[](std::size_t i) const { return bits_[i] != 0; }
    double f_clk() const { return f_clk_; }
    std::uint64_t high_count() const;

    bool operator==(const BitWaveform&) const = default;

private:
    std::vector<std::uint8_t> bits_;
    double f_clk_ = 0.0;
};

enum class Polarity : std::uint8_t { rising, falling };

struct Transition {
    std::int64_t tick = 0;  ///< position inside [0, period_ticks)
    Polarity polarity = Polarity::rising;

    bool operator==(const Transition&) const = default;
};

/// One period as timed transitions on a tick grid of `ticks_per_clock`
/// ticks per clock cycle.
class EdgeList {
public:
    EdgeList() = default;
    /// Throws ParameterError if ordering or alternation is violated.
    EdgeList(std::vector<Transition> transitions, std::int64_t period_ticks,
             std::int64_t ticks_per_clock, double f_clk, bool initial_high);

    const std::vector<Transition>& transitions() const { return transitions_; }
    std::int64_t period_ticks() const { return period_ticks_; }
    std::int64_t ticks_per_clock() const { return ticks_per_clock_; }
    double f_clk() const { return f_clk_; }
    double tick_seconds() const { return 1.0 / (f_clk_ * static_cast<double>(ticks_per_clock_)); }
    double period_seconds() const { return static_cast<double>(period_ticks_) * tick_seconds(); }
    double time_of(const Transition& t) const { return static_cast<double>(t.tick) * tick_seconds(); }
    /// Level before the first transition, i.e. the level at the end of the period.
    bool initial_high() const { return initial_high_; }
    /// Total high time in ticks over one period.
    std::int64_t high_ticks() const;
    std::size_t rising_count() const;

    bool operator==(const EdgeList&) const = default;

private:
    std::vector<Transition> transitions_;
    std::int64_t period_ticks_ = 0;
    std::int64_t ticks_per_clock_ = 1;
    double f_clk_ = 0.0;
    bool initial_high_ = false;
};

/// Per-cycle view of the address/WAV decoder construction.
struct DecoderState {
    std::uint32_t sn_pos = 0;     ///< sub-region index, 0..SN-1
    std::uint32_t data = 0;       ///< position inside the sub-region, 0..2^(n-SF)-1
    std::uint32_t wav_width = 0;  ///< high cycles the WAV decoder places in this sub-region
    bool out() const { return data < wav_width; }
};

/// Counter word after the MPWM bit rearrangement: the low n-SF counter bits
/// move to the top, the high SF bits fill the bottom in reversed order.
std::uint32_t rearranged_counter(std::uint32_t counter, int n, int sf);

/// Comparator construction: high iff C_R < D.
BitWaveform mpwm_wave(const ModulatorConfig& cfg, const DutyCode& duty);

/// Address-decoder / WAV-decoder construction. Bit-identical to mpwm_wave.
BitWaveform mpwm_wave_decoder(const ModulatorConfig& cfg, const DutyCode& duty);
DecoderState decode_cycle(const ModulatorConfig& cfg, const DutyCode& duty, std::uint32_t cycle);

/// First-order error-feedback noise shaper, error state reset each period.
BitWaveform fons_wave(const ModulatorConfig& cfg, const DutyCode& duty);

/// MPWM edges with the falling edge of the last sub-pulse delayed by
/// fine * t_d. With a zero coarse code and nonzero fine code a single
/// pulse of width fine * t_d starts at t = 0.
EdgeList hr_mpwm_wave(const ModulatorConfig& cfg, const DutyCode& duty);

/// Dispatches on cfg.kind. HR-MPWM yields its coarse waveform.
BitWaveform generate(const ModulatorConfig& cfg, const DutyCode& duty);
inline BitWaveform generate(const ModulatorConfig& cfg, std::uint32_t coarse) {
    return generate(cfg, DutyCode{coarse, 0});
}

EdgeList to_edges(const BitWaveform& wave);

/// Rising edges counted cyclically; a pulse spanning the period wrap counts once.
std::uint32_t count_pulses(const BitWaveform& wave);
std::uint32_t count_pulses(const EdgeList& edges);

/// Closed-form edge count E(D) of the comparator family.
std::uint32_t edge_count_formula(const ModulatorConfig& cfg, std::uint32_t duty);

}  // namespace mpwm
