#pragma once

// CSV / JSON / VCD writers. Every CSV has a fixed column header; callers may
// prepend '#'-prefixed metadata lines with write_comment_header.

#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "mpwm/analog.hpp"
#include "mpwm/metrics.hpp"
#include "mpwm/modwave.hpp"
#include "mpwm/periph.hpp"
#include "mpwm/spectral.hpp"

namespace mpwm::io {

inline constexpr std::string_view bits_columns = "cycle,bit";
inline constexpr std::string_view edges_columns = "index,tick,time_s,polarity";
inline constexpr std::string_view spectrum_columns = "k,frequency_hz,re,im,magnitude,magnitude_over_dc";
inline constexpr std::string_view trace_columns = "time_s,volts";
inline constexpr std::string_view filter_table_columns = "frequency_hz,magnitude,magnitude_db,phase_rad";
inline constexpr std::string_view metrics_curve_columns = "duty,edges,static_error_lsb";
inline constexpr std::string_view metrics_summary_columns =
    "kind,n,sf,f_clk_hz,t_dr_s,t_df_s,u_s_v,u_lsb_v,inl_lsb,inl_closed_form_lsb,inl_worst_duty,dnl_lsb,"
    "dnl_closed_form_lsb,dnl_worst_duty,monotonic,f_c_hz,f_ct,f_ct_closed_form,ripple_worst_lsb,"
    "ripple_worst_duty,settling_s,max_conversion_rate_hz";
inline constexpr std::string_view periph_columns = "cycle,counter,out,locked,hr_extend_ticks";
inline constexpr std::string_view repro_columns = "kind,n,sf,metric,value";

/// Shortest round-trip decimal form.
std::string format_number(double v);

/// One "# key: value" line per entry of a flat header.
void write_comment_header(std::ostream& os, std::string_view command, std::string_view config_json);

void write_bits_csv(std::ostream& os, const BitWaveform& wave);
void write_edges_csv(std::ostream& os, const EdgeList& edges);
void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum);
void write_trace_csv(std::ostream& os, const AnalogTrace& trace);
void write_filter_table_csv(std::ostream& os, std::span<const FilterTableRow> rows);
void write_metrics_curve_csv(std::ostream& os, const MetricsReport& report);
void write_metrics_summary_csv(std::ostream& os, const MetricsReport& report);
void write_periph_csv(std::ostream& os, std::span<const CycleRecord> records);
/// Value-change dump at fine-tick resolution (timescale 1 fs).
void write_periph_vcd(std::ostream& os, std::span<const CycleRecord> records, const PeriphParams& params);

/// MetricsReport as a JSON object. Per-code curves are included when `with_curves`.
std::string metrics_to_json(const MetricsReport& report, bool with_curves = true, int indent = 2);
std::string harmonics_to_json(const HarmonicSummary& summary, int indent = 2);

}  // namespace mpwm::io
