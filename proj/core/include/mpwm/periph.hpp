#pragma once

// Cycle-stepped register-level model of the MPWM-DAC peripheral.
//
// Register map (32-bit registers, byte addresses):
//   0x00 CTRL    bit0 EN, bits7..4 SF
//   0x04 NBITS   counter width n, 4..16
//   0x08 DUTY    coarse duty code, double-buffered
//   0x0C HRDUTY  fine code, double-buffered
//   0x10 STATUS  bit0 DLL_LOCKED, read-only
// SF and NBITS are frozen while EN = 1. DUTY and HRDUTY latch when the
// counter wraps to zero. Reserved bits read as zero.

#include <cstdint>
#include <string_view>
#include <vector>

#include "mpwm/modwave.hpp"

namespace mpwm {

namespace reg {
inline constexpr std::uint32_t ctrl = 0x00;
inline constexpr std::uint32_t nbits = 0x04;
inline constexpr std::uint32_t duty = 0x08;
inline constexpr std::uint32_t hrduty = 0x0C;
inline constexpr std::uint32_t status = 0x10;

inline constexpr std::uint32_t ctrl_en = 1u << 0;
inline constexpr int ctrl_sf_shift = 4;
inline constexpr std::uint32_t ctrl_sf_mask = 0xFu << ctrl_sf_shift;
inline constexpr std::uint32_t status_dll_locked = 1u << 0;
}  // namespace reg

enum class Fault : std::uint8_t {
    none = 0,
    unmapped_address = 1,
    read_only = 2,
    config_while_enabled = 3,
    value_out_of_range = 4,
};

std::string_view to_string(Fault fault);

struct PeriphParams {
    double f_clk = 100e6;
    int fine_bits = 4;  ///< 16 DLL phases
    std::uint64_t lock_cycles = 1024;
};

struct RegisterFile {
    std::uint32_t ctrl = 0;
    std::uint32_t nbits = 12;
    std::uint32_t duty = 0;    ///< shadow
    std::uint32_t hrduty = 0;  ///< shadow

    bool operator==(const RegisterFile&) const = default;
};

struct PeriphState {
    std::uint32_t counter = 0;
    std::uint32_t active_duty = 0;
    std::uint32_t active_fine = 0;
    std::uint64_t cycle = 0;
    std::uint64_t cycles_since_enable = 0;
    bool out = false;
    // HR falling-edge extension for the active duty: the output stays high
    // for hr_ticks fine ticks into cycle hr_counter.
    std::uint32_t hr_counter = 0;
    std::uint32_t hr_ticks = 0;

    bool operator==(const PeriphState&) const = default;
};

struct CycleRecord {
    std::uint64_t cycle = 0;
    std::uint32_t counter = 0;
    bool out = false;
    bool locked = false;
    std::uint32_t hr_extend_ticks = 0;  ///< fine ticks the output stays high into this cycle
};

struct ReadResult {
    Fault fault = Fault::none;
    std::uint32_t value = 0;
};

struct PeriphSnapshot {
    RegisterFile registers;
    PeriphState state;
    bool operator==(const PeriphSnapshot&) const = default;
};

class MpwmPeripheral {
public:
    explicit MpwmPeripheral(PeriphParams params = {});

    /// A faulting write leaves every register and state field unchanged.
    [[nodiscard]] Fault write(std::uint32_t addr, std::uint32_t value);
    [[nodiscard]] ReadResult read(std::uint32_t addr) const;

    /// Advances `cycles` clocks and returns the output bit of each.
    std::vector<std::uint8_t> step(std::uint64_t cycles);
    /// As step, with a per-cycle record.
    std::vector<CycleRecord> step_traced(std::uint64_t cycles);

    bool enabled() const { return (regs_.ctrl & reg::ctrl_en) != 0; }
    bool locked() const;
    int sf() const { return static_cast<int>((regs_.ctrl & reg::ctrl_sf_mask) >> reg::ctrl_sf_shift); }
    const PeriphParams& params() const { return params_; }
    const RegisterFile& registers() const { return regs_; }
    const PeriphState& state() const { return state_; }
    PeriphSnapshot snapshot() const { return {regs_, state_}; }

    /// Generator configuration matching the current registers.
    ModulatorConfig active_config() const;

private:
    CycleRecord tick();
    void latch();

    PeriphParams params_;
    RegisterFile regs_;
    PeriphState state_;
};

}  // namespace mpwm
