#include "mpwm/modwave.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace mpwm {

namespace {

std::uint32_t bit_reverse(std::uint32_t value, int width) {
    std::uint32_t out = 0;
    for (int i = 0; i < width; ++i) {
        out = (out << 1) | ((value >> i) & 1u);
    }
    return out;
}

// Order in which sub-regions receive the residual cycles: the van der Corput
// sequence, grown by doubling. Built without bit twiddling so the decoder
// stays independent of the comparator's rearrangement.
std::vector<std::uint32_t> residual_rank(int sf) {
    std::vector<std::uint32_t> order{0};
    for (int level = 0; level < sf; ++level) {
        std::vector<std::uint32_t> next;
        next.reserve(order.size() * 2);
        for (auto s : order) next.push_back(2 * s);
        for (auto s : order) next.push_back(2 * s + 1);
        order = std::move(next);
    }
    // order[r] is the sub-region that receives the r-th residual cycle.
    std::vector<std::uint32_t> rank(order.size());
    for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    return rank;
}

}  // namespace

std::string_view to_string(ModulatorKind kind) {
    switch (kind) {
        case ModulatorKind::pwm: return "pwm";
        case ModulatorKind::pcm: return "pcm";
        case ModulatorKind::fons: return "fons";
        case ModulatorKind::mpwm: return "mpwm";
        case ModulatorKind::hrmpwm: return "hrmpwm";
    }
    return "?";
}

ModulatorKind parse_modulator_kind(std::string_view text) {
    for (auto kind : {ModulatorKind::pwm, ModulatorKind::pcm, ModulatorKind::fons,
                      ModulatorKind::mpwm, ModulatorKind::hrmpwm}) {
        if (to_string(kind) == text) return kind;
    }
    throw ParameterError(fmt::format("unknown modulator kind '{}' (expected pwm|pcm|fons|mpwm|hrmpwm)", text));
}

ModulatorConfig ModulatorConfig::pwm(int n, double f_clk) {
    return {ModulatorKind::pwm, n, 0, f_clk, 0};
}

ModulatorConfig ModulatorConfig::pcm(int n, double f_clk) {
    return {ModulatorKind::pcm, n, n - 1, f_clk, 0};
}

ModulatorConfig ModulatorConfig::fons(int n, double f_clk) {
    return {ModulatorKind::fons, n, 0, f_clk, 0};
}

ModulatorConfig ModulatorConfig::mpwm(int n, int sf, double f_clk) {
    return {ModulatorKind::mpwm, n, sf, f_clk, 0};
}

ModulatorConfig ModulatorConfig::hrmpwm(int n, int sf, int fine_bits, double f_clk) {
    return {ModulatorKind::hrmpwm, n, sf, f_clk, fine_bits};
}

void ModulatorConfig::validate() const {
    if (n < 2 || n > 16) throw ParameterError(fmt::format("n = {} outside 2..16", n));
    if (sf < 0 || sf >= n) throw ParameterError(fmt::format("sf = {} outside 0..n-1 = 0..{}", sf, n - 1));
    if (!(f_clk > 0.0) || !std::isfinite(f_clk)) throw ParameterError(fmt::format("f_clk = {} must be positive", f_clk));
    if (fine_bits < 0 || fine_bits > 6) throw ParameterError(fmt::format("fine_bits = {} outside 0..6", fine_bits));
    switch (kind) {
        case ModulatorKind::pwm:
            if (sf != 0) throw ParameterError(fmt::format("pwm requires sf = 0, got {}", sf));
            break;
        case ModulatorKind::pcm:
            if (sf != n - 1) throw ParameterError(fmt::format("pcm requires sf = n-1 = {}, got {}", n - 1, sf));
            break;
        case ModulatorKind::fons:
            if (sf != 0) throw ParameterError(fmt::format("fons takes no splitting factor, got sf = {}", sf));
            break;
        case ModulatorKind::mpwm:
            break;
        case ModulatorKind::hrmpwm:
            if (fine_bits < 1) throw ParameterError("hrmpwm requires fine_bits >= 1");
            break;
    }
    if (kind != ModulatorKind::hrmpwm && fine_bits != 0) {
        throw ParameterError(fmt::format("fine_bits = {} requires kind hrmpwm", fine_bits));
    }
}

double ModulatorConfig::fine_delay() const {
    if (fine_bits == 0) return 0.0;
    return 1.0 / (std::ldexp(1.0, fine_bits) * f_clk);
}

void validate_duty(const ModulatorConfig& cfg, const DutyCode& duty) {
    cfg.validate();
    if (duty.coarse >= cfg.period_cycles()) {
        throw ParameterError(fmt::format("duty {} outside 0..2^n-1 = 0..{}", duty.coarse, cfg.period_cycles() - 1));
    }
    const std::uint32_t fine_limit = std::uint32_t{1} << cfg.fine_bits;
    if (duty.fine >= fine_limit) {
        throw ParameterError(fmt::format("fine code {} outside 0..2^fine_bits-1 = 0..{}", duty.fine, fine_limit - 1));
    }
}

BitWaveform::BitWaveform(std::vector<std::uint8_t> bits, double f_clk) : bits_(std::move(bits)), f_clk_(f_clk) {}

std::uint64_t BitWaveform::high_count() const {
    return static_cast<std::uint64_t>(std::count_if(bits_.begin(), bits_.end(), [](auto b) { return b != 0; }));
}

EdgeList::EdgeList(std::vector<Transition> transitions, std::int64_t period_ticks,
                   std::int64_t ticks_per_clock, double f_clk, bool initial_high)
    : transitions_(std::move(transitions)),
      period_ticks_(period_ticks),
      ticks_per_clock_(ticks_per_clock),
      f_clk_(f_clk),
      initial_high_(initial_high) {
    if (period_ticks_ <= 0 || ticks_per_clock_ <= 0) throw ParameterError("edge list needs a positive tick grid");
    if (transitions_.size() % 2 != 0) throw ParameterError("edge list needs as many rising as falling transitions");
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
        const auto& t = transitions_[i];
        if (t.tick < 0 || t.tick >= period_ticks_) {
            throw ParameterError(fmt::format("transition tick {} outside [0, {})", t.tick, period_ticks_));
        }
        if (i > 0) {
            const auto& prev = transitions_[i - 1];
            if (t.tick <= prev.tick) throw ParameterError("transition times must be strictly increasing");
            if (t.polarity == prev.polarity) throw ParameterError("transition polarities must alternate");
        }
    }
    if (!transitions_.empty()) {
        const bool first_rising = transitions_.front().polarity == Polarity::rising;
        if (first_rising == initial_high_) throw ParameterError("initial level inconsistent with first transition");
    }
}

std::int64_t EdgeList::high_ticks() const {
    if (transitions_.empty()) return initial_high_ ? period_ticks_ : 0;
    std::int64_t total = 0;
    std::int64_t level_since = 0;
    bool high = initial_high_;
    for (const auto& t : transitions_) {
        if (high) total += t.tick - level_since;
        high = t.polarity == Polarity::rising;
        level_since = t.tick;
    }
    if (high) total += period_ticks_ - level_since;
    return total;
}

std::size_t EdgeList::rising_count() const {
    return static_cast<std::size_t>(std::count_if(transitions_.begin(), transitions_.end(),
                                                  [](const Transition& t) { return t.polarity == Polarity::rising; }));
}

std::uint32_t rearranged_counter(std::uint32_t counter, int n, int sf) {
    const int low_width = n - sf;
    const std::uint32_t low = counter & ((std::uint32_t{1} << low_width) - 1);
    const std::uint32_t high = counter >> low_width;
    return (low << sf) | bit_reverse(high, sf);
}

BitWaveform mpwm_wave(const ModulatorConfig& cfg, const DutyCode& duty) {
    validate_duty(cfg, duty);
    if (!cfg.comparator_family()) throw ParameterError("mpwm_wave needs a pwm, pcm, mpwm or hrmpwm config");
    const std::uint32_t cycles = cfg.period_cycles();
    std::vector<std::uint8_t> bits(cycles);
    for (std::uint32_t c = 0; c < cycles; ++c) {
        bits[c] = rearranged_counter(c, cfg.n, cfg.sf) < duty.coarse ? 1 : 0;
    }
    return BitWaveform(std::move(bits), cfg.f_clk);
}

namespace {

struct WavTable {
    int low_width = 0;
    std::vector<std::uint32_t> widths;  // per sub-region
};

WavTable build_wav_table(const ModulatorConfig& cfg, std::uint32_t coarse) {
    const std::uint32_t sn = cfg.split_number();
    const std::uint32_t base = coarse / sn;
    const std::uint32_t residual = coarse % sn;
    const auto rank = residual_rank(cfg.sf);
    WavTable table;
    table.low_width = cfg.n - cfg.sf;
    table.widths.resize(sn);
    for (std::uint32_t s = 0; s < sn; ++s) {
        table.widths[s] = base + (rank[s] < residual ? 1 : 0);
    }
    return table;
}

}  // namespace

DecoderState decode_cycle(const ModulatorConfig& cfg, const DutyCode& duty, std::uint32_t cycle) {
    validate_duty(cfg, duty);
    if (cycle >= cfg.period_cycles()) throw ParameterError(fmt::format("cycle {} outside one period", cycle));
    const auto table = build_wav_table(cfg, duty.coarse);
    const std::uint32_t region_len = std::uint32_t{1} << table.low_width;
    DecoderState st;
    st.sn_pos = cycle / region_len;
    st.data = cycle % region_len;
    st.wav_width = table.widths[st.sn_pos];
    return st;
}

BitWaveform mpwm_wave_decoder(const ModulatorConfig& cfg, const DutyCode& duty) {
    validate_duty(cfg, duty);
    if (!cfg.comparator_family()) throw ParameterError("mpwm_wave_decoder needs a pwm, pcm, mpwm or hrmpwm config");
    const auto table = build_wav_table(cfg, duty.coarse);
    const std::uint32_t region_len = std::uint32_t{1} << table.low_width;
    std::vector<std::uint8_t> bits;
    bits.reserve(cfg.period_cycles());
    for (std::uint32_t sn_pos = 0; sn_pos < table.widths.size(); ++sn_pos) {
        // WAV decoder output: a thermometer code of the sub-region width.
        for (std::uint32_t data = 0; data < region_len; ++data) {
            bits.push_back(data < table.widths[sn_pos] ? 1 : 0);
        }
    }
    return BitWaveform(std::move(bits), cfg.f_clk);
}

BitWaveform fons_wave(const ModulatorConfig& cfg, const DutyCode& duty) {
    validate_duty(cfg, duty);
    if (cfg.kind != ModulatorKind::fons) throw ParameterError("fons_wave needs a fons config");
    const std::int64_t full = std::int64_t{1} << cfg.n;
    const std::int64_t threshold = full / 2;
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(full));
    std::int64_t error = 0;
    for (auto& b : bits) {
        const std::int64_t v = static_cast<std::int64_t>(duty.coarse) + error;
        b = v >= threshold ? 1 : 0;
        error = v - (b ? full : 0);
    }
    return BitWaveform(std::move(bits), cfg.f_clk);
}

EdgeList to_edges(const BitWaveform& wave) {
    const std::size_t len = wave.size();
    if (len == 0) throw ParameterError("empty waveform");
    std::vector<Transition> transitions;
    for (std::size_t i = 0; i < len; ++i) {
        const bool prev = wave[(i + len - 1) % len];
        const bool cur = wave[i];
        if (cur != prev) {
            transitions.push_back({static_cast<std::int64_t>(i), cur ? Polarity::rising : Polarity::falling});
        }
    }
    return EdgeList(std::move(transitions), static_cast<std::int64_t>(len), 1, wave.f_clk(), wave[len - 1]);
}

EdgeList hr_mpwm_wave(const ModulatorConfig& cfg, const DutyCode& duty) {
    validate_duty(cfg, duty);
    if (cfg.kind != ModulatorKind::hrmpwm) throw ParameterError("hr_mpwm_wave needs an hrmpwm config");
    const auto coarse = to_edges(mpwm_wave(cfg, duty));
    const std::int64_t tpc = std::int64_t{1} << cfg.fine_bits;
    const std::int64_t period = coarse.period_ticks() * tpc;
    std::vector<Transition> transitions;
    transitions.reserve(coarse.transitions().size() + 2);
    for (const auto& t : coarse.transitions()) transitions.push_back({t.tick * tpc, t.polarity});

    const auto fine = static_cast<std::int64_t>(duty.fine);
    if (fine != 0) {
        if (transitions.empty()) {
            transitions = {{0, Polarity::rising}, {fine, Polarity::falling}};
            return EdgeList(std::move(transitions), period, tpc, cfg.f_clk, false);
        }
        // The latest falling edge is always followed by at least one low clock.
        auto last_fall = transitions.end();
        for (auto it = transitions.begin(); it != transitions.end(); ++it) {
            if (it->polarity == Polarity::falling) last_fall = it;
        }
        last_fall->tick += fine;
    }
    return EdgeList(std::move(transitions), period, tpc, cfg.f_clk, coarse.initial_high());
}

BitWaveform generate(const ModulatorConfig& cfg, const DutyCode& duty) {
    if (cfg.kind == ModulatorKind::fons) return fons_wave(cfg, duty);
    return mpwm_wave(cfg, duty);
}

std::uint32_t count_pulses(const BitWaveform& wave) {
    const std::size_t len = wave.size();
    std::uint32_t count = 0;
    for (std::size_t i = 0; i < len; ++i) {
        if (wave[i] && !wave[(i + len - 1) % len]) ++count;
    }
    return count;
}

std::uint32_t count_pulses(const EdgeList& edges) {
    return static_cast<std::uint32_t>(edges.rising_count());
}

std::uint32_t edge_count_formula(const ModulatorConfig& cfg, std::uint32_t duty) {
    cfg.validate();
    if (!cfg.comparator_family()) throw ParameterError("edge_count_formula applies to the comparator family");
    const std::uint32_t full = cfg.period_cycles();
    const std::uint32_t sn = cfg.split_number();
    if (duty >= full) throw ParameterError(fmt::format("duty {} outside 0..{}", duty, full - 1));
    if (duty <= sn) return duty;
    if (duty <= full - sn) return sn;
    return full - duty;
}

}  // namespace mpwm
