#include "mpwm/periph.hpp"

namespace mpwm {

std::string_view to_string(Fault fault) {
    switch (fault) {
        case Fault::none: return "none";
        case Fault::unmapped_address: return "unmapped_address";
        case Fault::read_only: return "read_only";
        case Fault::config_while_enabled: return "config_while_enabled";
        case Fault::value_out_of_range: return "value_out_of_range";
    }
    return "?";
}

MpwmPeripheral::MpwmPeripheral(PeriphParams params) : params_(params) {
    if (params_.fine_bits < 0 || params_.fine_bits > 6) throw ParameterError("peripheral fine_bits outside 0..6");
    if (!(params_.f_clk > 0.0)) throw ParameterError("peripheral f_clk must be positive");
}

bool MpwmPeripheral::locked() const {
    return enabled() && state_.cycles_since_enable >= params_.lock_cycles;
}

ModulatorConfig MpwmPeripheral::active_config() const {
    const int n = static_cast<int>(regs_.nbits);
    if (params_.fine_bits > 0) return ModulatorConfig::hrmpwm(n, sf(), params_.fine_bits, params_.f_clk);
    return ModulatorConfig::mpwm(n, sf(), params_.f_clk);
}

Fault MpwmPeripheral::write(std::uint32_t addr, std::uint32_t value) {
    const std::uint32_t codes = std::uint32_t{1} << regs_.nbits;
    switch (addr) {
        case reg::ctrl: {
            const bool en = (value & reg::ctrl_en) != 0;
            const auto new_sf = static_cast<std::uint32_t>((value & reg::ctrl_sf_mask) >> reg::ctrl_sf_shift);
            if (enabled() && new_sf != static_cast<std::uint32_t>(sf())) return Fault::config_while_enabled;
            if (en && !enabled()) {
                if (new_sf >= regs_.nbits || regs_.duty >= codes) return Fault::value_out_of_range;
            }
            const bool rising = en && !enabled();
            regs_.ctrl = value & (reg::ctrl_en | reg::ctrl_sf_mask);
            if (rising) {
                state_.counter = 0;
                state_.cycles_since_enable = 0;
                latch();
            } else if (!en) {
                state_.counter = 0;
                state_.cycles_since_enable = 0;
                state_.out = false;
            }
            return Fault::none;
        }
        case reg::nbits:
            if (enabled()) return Fault::config_while_enabled;
            if (value < 4 || value > 16) return Fault::value_out_of_range;
            regs_.nbits = value;
            return Fault::none;
        case reg::duty:
            if (value >= codes) return Fault::value_out_of_range;
            regs_.duty = value;
            return Fault::none;
        case reg::hrduty:
            if (value >= (std::uint32_t{1} << params_.fine_bits)) return Fault::value_out_of_range;
            regs_.hrduty = value;
            return Fault::none;
        case reg::status:
            return Fault::read_only;
        default:
            return Fault::unmapped_address;
    }
}

ReadResult MpwmPeripheral::read(std::uint32_t addr) const {
    switch (addr) {
        case reg::ctrl: return {Fault::none, regs_.ctrl};
        case reg::nbits: return {Fault::none, regs_.nbits};
        case reg::duty: return {Fault::none, regs_.duty};
        case reg::hrduty: return {Fault::none, regs_.hrduty};
        case reg::status: return {Fault::none, locked() ? reg::status_dll_locked : 0u};
        default: return {Fault::unmapped_address, 0};
    }
}

void MpwmPeripheral::latch() {
    state_.active_duty = regs_.duty;
    state_.active_fine = params_.fine_bits > 0 ? regs_.hrduty : 0;
    state_.hr_counter = 0;
    state_.hr_ticks = 0;
    if (state_.active_fine == 0) return;
    // The delayed edge is the only transition off the clock grid.
    const auto edges = hr_mpwm_wave(active_config(), DutyCode{state_.active_duty, state_.active_fine});
    const auto tpc = edges.ticks_per_clock();
    for (const auto& t : edges.transitions()) {
        if (t.polarity == Polarity::falling && t.tick % tpc != 0) {
            state_.hr_counter = static_cast<std::uint32_t>(t.tick / tpc);
            state_.hr_ticks = static_cast<std::uint32_t>(t.tick % tpc);
        }
    }
}

CycleRecord MpwmPeripheral::tick() {
    CycleRecord rec;
    rec.cycle = state_.cycle;
    if (!enabled()) {
        state_.out = false;
        rec.out = false;
        ++state_.cycle;
        return rec;
    }
    if (state_.counter == 0) latch();
    const bool gated = params_.fine_bits > 0 && state_.cycles_since_enable < params_.lock_cycles;
    const int n = static_cast<int>(regs_.nbits);
    const bool high = rearranged_counter(state_.counter, n, sf()) < state_.active_duty;
    rec.counter = state_.counter;
    rec.out = !gated && high;
    rec.locked = state_.cycles_since_enable >= params_.lock_cycles;
    if (!gated && state_.hr_ticks != 0 && state_.counter == state_.hr_counter) rec.hr_extend_ticks = state_.hr_ticks;
    state_.out = rec.out;

    state_.counter = (state_.counter + 1) & ((std::uint32_t{1} << n) - 1);
    ++state_.cycles_since_enable;
    ++state_.cycle;
    return rec;
}

std::vector<std::uint8_t> MpwmPeripheral::step(std::uint64_t cycles) {
    std::vector<std::uint8_t> bits;
    bits.reserve(cycles);
    for (std::uint64_t i = 0; i < cycles; ++i) bits.push_back(tick().out ? 1 : 0);
    return bits;
}

std::vector<CycleRecord> MpwmPeripheral::step_traced(std::uint64_t cycles) {
    std::vector<CycleRecord> records;
    records.reserve(cycles);
    for (std::uint64_t i = 0; i < cycles; ++i) records.push_back(tick());
    return records;
}

}  // namespace mpwm
