#pragma once

// DAC figures of merit: static error, INL, DNL, required filter cutoff and
// settling. Closed forms and duty sweeps over generated waveforms are both
// exposed so each can check the other.

#include <cstdint>
#include <optional>
#include <vector>

#include "mpwm/analog.hpp"
#include "mpwm/modwave.hpp"

namespace mpwm {

/// Edge-induced error in LSB for E pulses: E (t_dr - t_df) f_clk.
double edge_error_lsb(std::uint32_t edges, const EdgeModel& em, double f_clk);

/// (u_avg(D) - u_D) / U_LSB with U_LSB = u_s / 2^n. `supply_deviation` is the
/// relative error of the real supply against the nominal u_s.
double static_error(const ModulatorConfig& cfg, std::uint32_t duty, const EdgeModel& em,
                    double supply_deviation = 0.0);

struct Nonlinearity {
    double lsb = 0.0;
    std::uint32_t worst_duty = 0;
};

/// Closed form: |dW| f_clk for PWM, 2^SF |dW| f_clk for MPWM, 2^(n-1) |dW| f_clk for PCM and FONS.
double inl_formula(const ModulatorConfig& cfg, const EdgeModel& em);
/// max_D |e_edge(D)| with E(D) counted on every generated waveform.
Nonlinearity inl(const ModulatorConfig& cfg, const EdgeModel& em);

/// Closed form: |dW| f_clk for every modulator.
double dnl_formula(const ModulatorConfig& cfg, const EdgeModel& em);
/// max_D |(u(D+1) - u(D)) / U_LSB - 1| over generated waveforms.
Nonlinearity dnl(const ModulatorConfig& cfg, const EdgeModel& em, double supply_deviation = 0.0);

struct CutoffResult {
    double f_ct = 0.0;               ///< f_c * T
    double f_c = 0.0;                ///< Hz
    double ripple_lsb = 0.0;         ///< worst ripple at f_c
    std::uint32_t worst_duty = 0;
    std::optional<double> closed_form_f_ct;  ///< 0.81 sqrt(R / 2^n), PWM only
    int evaluations = 0;
};

/// PWM cutoff rule 0.81 sqrt(R_WC / 2^n).
double pwm_cutoff_rule(int n, double ripple_lsb);

/// Largest f_c T whose worst-case ripple over all duties stays within the target.
/// Throws ParameterError when the search range does not bracket the target.
CutoffResult required_cutoff(const ModulatorConfig& cfg, double ripple_target_lsb, const RippleOptions& opt = {});

struct ConversionRate {
    double settling_s = 0.0;
    double rate_hz = 0.0;
};

ConversionRate conversion_rate(const ModulatorConfig& cfg, const FilterModel& fm, double band_lsb,
                               StepKind step = StepKind::one_lsb);

struct MetricsOptions {
    double supply_deviation = 0.0;
    bool dynamic = true;                 ///< ripple, cutoff and settling
    double ripple_target_lsb = 0.5;
    std::optional<double> f_c;           ///< fixed cutoff instead of required_cutoff
    StepKind step = StepKind::one_lsb;
    double settle_band_lsb = 0.5;
    RippleOptions ripple;
};

struct MetricsReport {
    ModulatorConfig config;
    EdgeModel edge_model;
    double supply_deviation = 0.0;
    double u_lsb = 0.0;
    std::vector<double> static_error_lsb;  ///< per duty code
    std::vector<std::uint32_t> edge_counts;
    double inl = 0.0;
    std::uint32_t inl_worst_duty = 0;
    double inl_closed_form = 0.0;
    double dnl = 0.0;
    std::uint32_t dnl_worst_duty = 0;
    double dnl_closed_form = 0.0;
    bool monotonic = true;
    bool has_dynamic = false;
    double f_c = 0.0;
    double f_ct = 0.0;
    std::optional<double> f_ct_closed_form;
    double ripple_worst = 0.0;
    std::uint32_t ripple_worst_duty = 0;
    double settling_s = 0.0;
    double max_conversion_rate = 0.0;
};

MetricsReport compute_metrics(const ModulatorConfig& cfg, const EdgeModel& em, const MetricsOptions& opt = {});

}  // namespace mpwm
