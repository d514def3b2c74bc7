#pragma once

// Digital-to-analog conversion under the trapezoid edge model and the
// second-order Butterworth reconstruction filter.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "mpwm/modwave.hpp"

namespace mpwm {

/// Trapezoid edge model. Every high pulse is stretched by the width error
/// t_dr - t_df: the rising edge reaches half amplitude t_df after its nominal
/// clock instant and the falling edge t_dr after its own, so that
/// e_edge(D) = E(D) (t_dr - t_df) f_clk holds with its sign. Edges ramp linearly.
struct EdgeModel {
    double t_dr = 0.0;    ///< s
    double t_df = 0.0;    ///< s
    double t_rise = 0.0;  ///< 10-90% time, s
    double t_fall = 0.0;  ///< 10-90% time, s
    double u_s = 1.0;     ///< V

    static EdgeModel ideal(double u_s = 1.0) { return {0.0, 0.0, 0.0, 0.0, u_s}; }

    /// Pulse width deviation, t_dr - t_df.
    double width_error() const { return t_dr - t_df; }
    void validate(double f_clk) const;
};

/// Second-order Butterworth low-pass, H(s) = w^2 / (s^2 + sqrt(2) w s + w^2).
struct FilterModel {
    double f_c = 1.0;  ///< -3 dB cutoff, Hz

    void validate() const;
    std::complex<double> response(double f_hz) const;
};

/// Uniformly sampled voltage. Each sample is the exact average of the
/// continuous signal over its sample interval.
struct AnalogTrace {
    std::vector<double> samples;
    double sample_rate = 0.0;        ///< Hz
    double t0 = 0.0;                 ///< s
    std::size_t period_samples = 0;  ///< samples per modulation period

    double dt() const { return 1.0 / sample_rate; }
    double time(std::size_t i) const { return t0 + static_cast<double>(i) / sample_rate; }
};

constexpr int default_oversample = 64;

/// One period of the analog output. Throws ParameterError if oversample < 4,
/// a nonzero ramp is shorter than one sample interval, or adjacent edges overlap.
AnalogTrace to_analog(const EdgeList& edges, const EdgeModel& em, int oversample = default_oversample);
AnalogTrace to_analog(const BitWaveform& wave, const EdgeModel& em, int oversample = default_oversample);

/// Repeats a one-period trace.
AnalogTrace repeat_periods(const AnalogTrace& one_period, std::size_t periods);

/// Time average; the trace must cover a whole number of periods.
double dc_average(const AnalogTrace& trace);

/// Closed form: D/2^n u_s + E(D) dW f_clk U_LSB (plus the fine contribution for HR-MPWM).
double dc_average(const ModulatorConfig& cfg, const DutyCode& duty, const EdgeModel& em);
/// Exact average of an edge list: high time over period plus the per-pulse width error.
double dc_average(const EdgeList& edges, const EdgeModel& em);

enum class FilterStart {
    rest,      ///< zero initial state
    periodic,  ///< periodic steady state of the trace taken as one period
};

/// Closed-form state propagation of the held (piecewise-constant) trace;
/// output samples are exact interval averages of the filter output.
AnalogTrace filter_response(const AnalogTrace& trace, const FilterModel& fm, FilterStart start = FilterStart::rest);

struct RippleOptions {
    int grid_factor = 2;  ///< output evaluated at grid_factor * 2^n points per period
    int alias_terms = 8;  ///< image harmonics folded into each grid bin
};

/// Steady-state peak-to-peak ripple in LSB from the harmonic sum a_k H(jk 2pi/T).
double steady_ripple(const ModulatorConfig& cfg, const DutyCode& duty, const FilterModel& fm,
                     const RippleOptions& opt = {});

/// Same quantity from a periodic steady-state time simulation of the held waveform.
double steady_ripple_simulated(const ModulatorConfig& cfg, const DutyCode& duty, const FilterModel& fm,
                               int oversample = 16);

struct WorstRipple {
    double lsb = 0.0;
    std::uint32_t duty = 0;
};

/// Maximum steady ripple over every duty code.
WorstRipple worst_ripple(const ModulatorConfig& cfg, const FilterModel& fm, const RippleOptions& opt = {});

enum class StepKind { one_lsb, full_scale };

/// Step size in LSB: 1 or 2^n - 1.
double step_lsb(StepKind step, int n);

/// First time after which the step response stays within +-band_lsb of its
/// final value.
double settling_time(const FilterModel& fm, StepKind step, double band_lsb, int n = 12);

struct FilterTableRow {
    double frequency_hz;
    double magnitude;
    double magnitude_db;
    double phase_rad;
};

/// Logarithmically spaced magnitude/phase table.
std::vector<FilterTableRow> filter_table(const FilterModel& fm, double f_lo, double f_hi, std::size_t points);

}  // namespace mpwm
