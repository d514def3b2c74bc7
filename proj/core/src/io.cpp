#include "mpwm/io.hpp"

#include <cmath>

#include <fmt/format.h>
#include <json.hpp>

namespace mpwm::io {

namespace {

using nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json harmonic_json(const std::optional<Harmonic>& h) {
    if (!h) return nullptr;
    return ordered_json{{"k", h->k},
                        {"frequency_hz", h->frequency_hz},
                        {"amplitude", h->amplitude},
                        {"amplitude_over_dc", h->amplitude_over_dc}};
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

void write_comment_header(std::ostream& os, std::string_view command, std::string_view config_json) {
    os << "# mpwm " << command << '\n';
    os << "# config: " << config_json << '\n';
}

void write_bits_csv(std::ostream& os, const BitWaveform& wave) {
    os << bits_columns << '\n';
    for (std::size_t i = 0; i < wave.size(); ++i) os << i << ',' << (wave[i] ? 1 : 0) << '\n';
}

void write_edges_csv(std::ostream& os, const EdgeList& edges) {
    os << edges_columns << '\n';
    std::size_t i = 0;
    for (const auto& t : edges.transitions()) {
        os << i++ << ',' << t.tick << ',' << format_number(edges.time_of(t)) << ','
           << (t.polarity == Polarity::rising ? "rising" : "falling") << '\n';
    }
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum) {
    os << spectrum_columns << '\n';
    const double dc = std::abs(spectrum.dc());
    for (std::size_t k = 0; k < spectrum.coeffs.size(); ++k) {
        const auto& a = spectrum.coeffs[k];
        const double mag = std::abs(a);
        os << k << ',' << format_number(spectrum.frequency(k)) << ',' << format_number(a.real()) << ','
           << format_number(a.imag()) << ',' << format_number(mag) << ','
           << format_number(dc > 0.0 ? mag / dc : 0.0) << '\n';
    }
}

void write_trace_csv(std::ostream& os, const AnalogTrace& trace) {
    os << trace_columns << '\n';
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        os << format_number(trace.time(i)) << ',' << format_number(trace.samples[i]) << '\n';
    }
}

void write_filter_table_csv(std::ostream& os, std::span<const FilterTableRow> rows) {
    os << filter_table_columns << '\n';
    for (const auto& r : rows) {
        os << format_number(r.frequency_hz) << ',' << format_number(r.magnitude) << ','
           << format_number(r.magnitude_db) << ',' << format_number(r.phase_rad) << '\n';
    }
}

void write_metrics_curve_csv(std::ostream& os, const MetricsReport& report) {
    os << metrics_curve_columns << '\n';
    for (std::size_t d = 0; d < report.static_error_lsb.size(); ++d) {
        os << d << ',' << report.edge_counts[d] << ',' << format_number(report.static_error_lsb[d]) << '\n';
    }
}

void write_metrics_summary_csv(std::ostream& os, const MetricsReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string{}; };
    auto dyn = [&](double v) { return r.has_dynamic ? format_number(v) : std::string{}; };
    os << metrics_summary_columns << '\n';
    os << to_string(r.config.kind) << ',' << r.config.n << ',' << r.config.sf << ',' << format_number(r.config.f_clk)
       << ',' << format_number(r.edge_model.t_dr) << ',' << format_number(r.edge_model.t_df) << ','
       << format_number(r.edge_model.u_s) << ',' << format_number(r.u_lsb) << ',' << format_number(r.inl) << ','
       << format_number(r.inl_closed_form) << ',' << r.inl_worst_duty << ',' << format_number(r.dnl) << ','
       << format_number(r.dnl_closed_form) << ',' << r.dnl_worst_duty << ',' << (r.monotonic ? 1 : 0) << ','
       << dyn(r.f_c) << ',' << dyn(r.f_ct) << ',' << opt(r.f_ct_closed_form) << ',' << dyn(r.ripple_worst) << ','
       << (r.has_dynamic ? std::to_string(r.ripple_worst_duty) : std::string{}) << ',' << dyn(r.settling_s) << ','
       << dyn(r.max_conversion_rate) << '\n';
}

void write_periph_csv(std::ostream& os, std::span<const CycleRecord> records) {
    os << periph_columns << '\n';
    for (const auto& r : records) {
        os << r.cycle << ',' << r.counter << ',' << (r.out ? 1 : 0) << ',' << (r.locked ? 1 : 0) << ','
           << r.hr_extend_ticks << '\n';
    }
}

void write_periph_vcd(std::ostream& os, std::span<const CycleRecord> records, const PeriphParams& params) {
    const std::int64_t tpc = std::int64_t{1} << params.fine_bits;
    const double tick_fs = 1e15 / (params.f_clk * static_cast<double>(tpc));
    auto stamp = [&](std::int64_t ticks) { return std::llround(static_cast<double>(ticks) * tick_fs); };
    auto binary = [](std::uint32_t v) {
        std::string s;
        for (int b = 15; b >= 0; --b) s.push_back(((v >> b) & 1u) ? '1' : '0');
        return s;
    };

    os << "$timescale 1 fs $end\n";
    os << "$scope module mpwm_dac $end\n";
    os << "$var wire 1 ! out $end\n";
    os << "$var wire 1 \" dll_locked $end\n";
    os << "$var wire 16 # counter $end\n";
    os << "$upscope $end\n$enddefinitions $end\n";

    bool out = false;
    bool locked = false;
    std::uint32_t counter = 0;
    os << "$dumpvars\n0!\n0\"\nb" << binary(0) << " #\n$end\n";
    for (const auto& r : records) {
        const std::int64_t t = static_cast<std::int64_t>(r.cycle) * tpc;
        const bool level_at_start = r.hr_extend_ticks != 0 ? true : r.out;
        std::string changes;
        if (level_at_start != out) changes += fmt::format("{}!\n", level_at_start ? 1 : 0);
        if (r.locked != locked) changes += fmt::format("{}\"\n", r.locked ? 1 : 0);
        if (r.counter != counter) changes += fmt::format("b{} #\n", binary(r.counter));
        if (!changes.empty()) os << '#' << stamp(t) << '\n' << changes;
        out = level_at_start;
        locked = r.locked;
        counter = r.counter;
        if (r.hr_extend_ticks != 0 && out != r.out) {
            os << '#' << stamp(t + r.hr_extend_ticks) << '\n' << (r.out ? 1 : 0) << "!\n";
            out = r.out;
        }
    }
}

std::string metrics_to_json(const MetricsReport& r, bool with_curves, int indent) {
    ordered_json j;
    j["config"] = {{"kind", std::string(to_string(r.config.kind))},
                   {"n", r.config.n},
                   {"sf", r.config.sf},
                   {"f_clk_hz", r.config.f_clk},
                   {"fine_bits", r.config.fine_bits}};
    j["edge_model"] = {{"t_dr_s", r.edge_model.t_dr},
                       {"t_df_s", r.edge_model.t_df},
                       {"t_rise_s", r.edge_model.t_rise},
                       {"t_fall_s", r.edge_model.t_fall},
                       {"u_s_v", r.edge_model.u_s}};
    j["supply_deviation"] = r.supply_deviation;
    j["u_lsb"] = r.u_lsb;
    j["inl"] = r.inl;
    j["inl_closed_form"] = r.inl_closed_form;
    j["inl_worst_duty"] = r.inl_worst_duty;
    j["dnl"] = r.dnl;
    j["dnl_closed_form"] = r.dnl_closed_form;
    j["dnl_worst_duty"] = r.dnl_worst_duty;
    j["monotonic"] = r.monotonic;
    if (r.has_dynamic) {
        j["f_c"] = r.f_c;
        j["f_ct"] = r.f_ct;
        j["f_ct_closed_form"] = optional_number(r.f_ct_closed_form);
        j["ripple_worst"] = r.ripple_worst;
        j["ripple_worst_duty"] = r.ripple_worst_duty;
        j["settling_s"] = r.settling_s;
        j["max_conversion_rate"] = r.max_conversion_rate;
    }
    if (with_curves) {
        j["static_error_lsb"] = r.static_error_lsb;
        j["edge_counts"] = r.edge_counts;
    }
    return j.dump(indent);
}

std::string harmonics_to_json(const HarmonicSummary& summary, int indent) {
    ordered_json j{{"f1", harmonic_json(summary.first)}, {"f2", harmonic_json(summary.second)}};
    return j.dump(indent);
}

}  // namespace mpwm::io
