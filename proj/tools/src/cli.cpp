#include "mpwm/cli/cli.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "mpwm/analog.hpp"
#include "mpwm/cli/script.hpp"
#include "mpwm/cli/units.hpp"
#include "mpwm/io.hpp"
#include "mpwm/metrics.hpp"
#include "mpwm/modwave.hpp"
#include "mpwm/periph.hpp"
#include "mpwm/spectral.hpp"

namespace mpwm::cli {

namespace {

using json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FaultError : public std::runtime_error {
public:
    FaultError(int line, std::uint32_t address, std::uint32_t value, Fault fault)
        : std::runtime_error(fmt::format("line {}: peripheral fault {} at address {:#04x}", line, to_string(fault),
                                         address)),
          line(line), address(address), value(value), fault(fault) {}
    int line;
    std::uint32_t address;
    std::uint32_t value;
    Fault fault;
};

struct GlobalOptions {
    std::string out_dir;
    std::string format = "csv";
    int oversample = default_oversample;
    std::optional<std::uint64_t> seed;
};

struct ModulatorOptions {
    std::string kind = "mpwm";
    int n = 12;
    int sf = 0;
    int fine_bits = -1;
    std::string fclk = "100MHz";
};

struct EdgeOptions {
    std::string tdr = "0";
    std::string tdf = "0";
    std::string trise = "0";
    std::string tfall = "0";
    double us = 1.0;
};

void add_modulator_options(CLI::App* cmd, ModulatorOptions& m, bool kind_required) {
    auto* kind = cmd->add_option("--kind", m.kind, "pwm, pcm, fons, mpwm or hrmpwm")
                     ->check(CLI::IsMember({"pwm", "pcm", "fons", "mpwm", "hrmpwm"}));
    if (kind_required) kind->required();
    cmd->add_option("--n", m.n, "counter bit width")->capture_default_str();
    cmd->add_option("--sf", m.sf, "splitting factor (ignored for pwm, fons; n-1 for pcm)")->capture_default_str();
    cmd->add_option("--fine-bits", m.fine_bits, "delay-line bits for hrmpwm (default 4)");
    cmd->add_option("--fclk", m.fclk, "clock frequency, e.g. 100MHz")->capture_default_str();
}

void add_edge_options(CLI::App* cmd, EdgeOptions& e) {
    cmd->add_option("--tdr", e.tdr, "rising-edge half-amplitude delay, e.g. 1ns")->capture_default_str();
    cmd->add_option("--tdf", e.tdf, "falling-edge half-amplitude delay")->capture_default_str();
    cmd->add_option("--trise", e.trise, "10-90% rise time")->capture_default_str();
    cmd->add_option("--tfall", e.tfall, "10-90% fall time")->capture_default_str();
    cmd->add_option("--us", e.us, "supply voltage, V")->capture_default_str();
}

ModulatorConfig resolve(const ModulatorOptions& m) {
    const double f_clk = parse_hertz(m.fclk);
    ModulatorConfig cfg;
    switch (parse_modulator_kind(m.kind)) {
        case ModulatorKind::pwm: cfg = ModulatorConfig::pwm(m.n, f_clk); break;
        case ModulatorKind::pcm: cfg = ModulatorConfig::pcm(m.n, f_clk); break;
        case ModulatorKind::fons: cfg = ModulatorConfig::fons(m.n, f_clk); break;
        case ModulatorKind::mpwm: cfg = ModulatorConfig::mpwm(m.n, m.sf, f_clk); break;
        case ModulatorKind::hrmpwm:
            cfg = ModulatorConfig::hrmpwm(m.n, m.sf, m.fine_bits < 0 ? 4 : m.fine_bits, f_clk);
            break;
    }
    if (cfg.kind != ModulatorKind::hrmpwm && m.fine_bits > 0) {
        throw ParameterError(fmt::format("--fine-bits applies to hrmpwm only (kind {})", m.kind));
    }
    cfg.validate();
    return cfg;
}

EdgeModel resolve(const EdgeOptions& e) {
    return EdgeModel{parse_seconds(e.tdr), parse_seconds(e.tdf), parse_seconds(e.trise), parse_seconds(e.tfall),
                     e.us};
}

json to_json(const ModulatorConfig& cfg) {
    return json{{"kind", std::string(to_string(cfg.kind))},
                {"n", cfg.n},
                {"sf", cfg.sf},
                {"fine_bits", cfg.fine_bits},
                {"f_clk_hz", cfg.f_clk}};
}

json to_json(const EdgeModel& em) {
    return json{{"t_dr_s", em.t_dr}, {"t_df_s", em.t_df}, {"t_rise_s", em.t_rise}, {"t_fall_s", em.t_fall},
                {"u_s_v", em.u_s}};
}

StepKind parse_step(const std::string& s) {
    if (s == "one_lsb") return StepKind::one_lsb;
    if (s == "full_scale") return StepKind::full_scale;
    throw UsageError(fmt::format("unknown step '{}' (one_lsb or full_scale)", s));
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(fmt::format("bad integer '{}' in list '{}'", item, text));
        }
    }
    return out;
}

// Routes a command's artifacts to stdout or to files under --out.
class Output {
public:
    Output(const GlobalOptions& g, std::string command, std::ostream& out)
        : g_(g), command_(std::move(command)), out_(out) {
        if (!g_.out_dir.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(g_.out_dir, ec);
            if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", g_.out_dir, ec.message()));
        }
    }

    bool to_files() const { return !g_.out_dir.empty(); }
    bool json_format() const { return g_.format == "json"; }

    /// The command's main table: CSV with a metadata header, or a JSON document.
    void primary(const json& config, const std::function<void(std::ostream&)>& csv, const json& document) {
        const bool as_json = json_format();
        auto body = [&](std::ostream& os) {
            if (as_json) {
                os << document.dump(2) << '\n';
            } else {
                io::write_comment_header(os, command_, config.dump());
                csv(os);
            }
        };
        if (to_files()) {
            write_file(command_ + (as_json ? ".json" : ".csv"), body);
        } else {
            body(out_);
        }
    }

    /// Extra artifact, only produced with --out.
    void secondary(const std::string& name, const std::function<void(std::ostream&)>& body) {
        if (to_files()) write_file(name, body);
    }

    /// Final stdout summary when artifacts went to files.
    void finish(json summary) {
        if (!to_files()) return;
        summary["files"] = files_;
        out_ << summary.dump(2) << '\n';
    }

    const std::vector<std::string>& files() const { return files_; }

private:
    void write_file(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const auto path = std::filesystem::path(g_.out_dir) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
        body(f);
        f.flush();
        if (!f) throw IoError(fmt::format("write to '{}' failed", path.string()));
        files_.push_back(path.string());
    }

    const GlobalOptions& g_;
    std::string command_;
    std::ostream& out_;
    std::vector<std::string> files_;
};

json global_json(const GlobalOptions& g) {
    json j{{"format", g.format}, {"oversample", g.oversample}};
    j["seed"] = g.seed ? json(*g.seed) : json(nullptr);
    return j;
}

// ---- gen -------------------------------------------------------------------

struct GenOptions {
    ModulatorOptions mod;
    EdgeOptions edge;
    std::uint32_t duty = 0;
    std::uint32_t fine = 0;
    std::string output;
};

void run_gen(const GenOptions& o, const GlobalOptions& g, std::ostream& out) {
    const auto cfg = resolve(o.mod);
    const DutyCode duty{o.duty, o.fine};
    validate_duty(cfg, duty);
    std::string what = o.output;
    if (what.empty()) what = cfg.kind == ModulatorKind::hrmpwm ? "edges" : "bits";
    if (what == "bits" && cfg.kind == ModulatorKind::hrmpwm && duty.fine != 0) {
        throw ParameterError("hrmpwm with a nonzero fine code has off-grid edges; use --output edges or trace");
    }
    const EdgeList edges =
        cfg.kind == ModulatorKind::hrmpwm ? hr_mpwm_wave(cfg, duty) : to_edges(generate(cfg, duty));

    json config{{"command", "gen"}, {"modulator", to_json(cfg)}, {"duty", duty.coarse}, {"fine", duty.fine},
                {"output", what}, {"global", global_json(g)}};
    json summary{{"config", config},
                 {"high_ticks", edges.high_ticks()},
                 {"ticks_per_clock", edges.ticks_per_clock()},
                 {"pulses", edges.rising_count()},
                 {"period_s", edges.period_seconds()}};
    Output sink(g, "gen", out);

    if (what == "bits") {
        const auto wave = generate(cfg, duty);
        json doc = summary;
        doc["bits"] = wave.bits();
        sink.primary(config, [&](std::ostream& os) { io::write_bits_csv(os, wave); }, doc);
    } else if (what == "edges") {
        json doc = summary;
        json rows = json::array();
        for (const auto& t : edges.transitions()) {
            rows.push_back({{"tick", t.tick},
                            {"time_s", edges.time_of(t)},
                            {"polarity", t.polarity == Polarity::rising ? "rising" : "falling"}});
        }
        doc["transitions"] = rows;
        sink.primary(config, [&](std::ostream& os) { io::write_edges_csv(os, edges); }, doc);
    } else if (what == "trace") {
        const auto em = resolve(o.edge);
        config["edge_model"] = to_json(em);
        const auto trace = to_analog(edges, em, g.oversample);
        json doc = summary;
        doc["config"] = config;
        doc["sample_rate_hz"] = trace.sample_rate;
        doc["samples"] = trace.samples;
        sink.primary(config, [&](std::ostream& os) { io::write_trace_csv(os, trace); }, doc);
        summary["config"] = config;
    } else {
        throw UsageError(fmt::format("unknown --output '{}' (bits, edges or trace)", what));
    }
    sink.finish(summary);
}

// ---- spectrum ----------------------------------------------------------------

struct SpectrumOptions {
    ModulatorOptions mod;
    std::uint32_t duty = 0;
    std::size_t harmonics = 0;
    std::string method = "analytic";
};

void run_spectrum(const SpectrumOptions& o, const GlobalOptions& g, std::ostream& out) {
    const auto cfg = resolve(o.mod);
    const DutyCode duty{o.duty, 0};
    const auto wave = generate(cfg, duty);
    Spectrum series = o.method == "dft" ? dft_period(wave, o.harmonics) : superpose_coeffs(wave, o.harmonics);
    series.fundamental_hz = 1.0 / cfg.period();
    const auto summary_h = dominant_harmonics(series);

    json config{{"command", "spectrum"}, {"modulator", to_json(cfg)}, {"duty", duty.coarse},
                {"harmonics", series.harmonics()}, {"method", o.method}, {"global", global_json(g)}};
    json harmonics = json::parse(io::harmonics_to_json(summary_h, -1));
    json summary{{"config", config}, {"dc", series.dc()}, {"f1", harmonics["f1"]}, {"f2", harmonics["f2"]}};

    json doc = summary;
    json coeffs = json::array();
    for (std::size_t k = 0; k < series.coeffs.size(); ++k) {
        coeffs.push_back({{"k", k}, {"re", series.coeffs[k].real()}, {"im", series.coeffs[k].imag()}});
    }
    doc["coefficients"] = coeffs;

    Output sink(g, "spectrum", out);
    sink.primary(
        config,
        [&](std::ostream& os) {
            os << "# f1: " << harmonics["f1"].dump() << '\n';
            os << "# f2: " << harmonics["f2"].dump() << '\n';
            io::write_spectrum_csv(os, series);
        },
        doc);
    sink.finish(summary);
}

// ---- metrics -----------------------------------------------------------------

struct MetricsCliOptions {
    ModulatorOptions mod;
    EdgeOptions edge;
    double supply_deviation = 0.0;
    bool static_only = false;
    double ripple = 0.5;
    std::string fc;
    std::string step = "one_lsb";
    double band = 0.5;
};

void run_metrics(const MetricsCliOptions& o, const GlobalOptions& g, std::ostream& out) {
    const auto cfg = resolve(o.mod);
    const auto em = resolve(o.edge);
    MetricsOptions opt;
    opt.supply_deviation = o.supply_deviation;
    opt.dynamic = !o.static_only;
    opt.ripple_target_lsb = o.ripple;
    if (!o.fc.empty()) opt.f_c = parse_hertz(o.fc);
    opt.step = parse_step(o.step);
    opt.settle_band_lsb = o.band;
    const auto report = compute_metrics(cfg, em, opt);

    json config{{"command", "metrics"},
                {"modulator", to_json(cfg)},
                {"edge_model", to_json(em)},
                {"supply_deviation", o.supply_deviation},
                {"dynamic", opt.dynamic},
                {"ripple_target_lsb", o.ripple},
                {"f_c_hz", opt.f_c ? json(*opt.f_c) : json(nullptr)},
                {"step", o.step},
                {"band_lsb", o.band},
                {"global", global_json(g)}};
    json summary = json::parse(io::metrics_to_json(report, false, -1));
    summary.erase("config");
    summary.erase("edge_model");
    json doc{{"config", config}};
    doc.update(json::parse(io::metrics_to_json(report, true, -1)));
    doc["config"] = config;

    Output sink(g, "metrics", out);
    sink.primary(config, [&](std::ostream& os) { io::write_metrics_summary_csv(os, report); }, doc);
    sink.secondary("metrics_curve.csv", [&](std::ostream& os) {
        io::write_comment_header(os, "metrics", config.dump());
        io::write_metrics_curve_csv(os, report);
    });
    json final_summary{{"config", config}};
    final_summary.update(summary);
    sink.finish(final_summary);
}

// ---- cutoff ------------------------------------------------------------------

struct CutoffCliOptions {
    ModulatorOptions mod;
    double ripple = 0.5;
    RippleOptions ripple_opt;
};

json cutoff_json(const CutoffResult& r) {
    return json{{"f_ct", r.f_ct},
                {"f_c_hz", r.f_c},
                {"ripple_lsb", r.ripple_lsb},
                {"worst_duty", r.worst_duty},
                {"f_ct_closed_form", r.closed_form_f_ct ? json(*r.closed_form_f_ct) : json(nullptr)},
                {"evaluations", r.evaluations}};
}

void run_cutoff(const CutoffCliOptions& o, const GlobalOptions& g, std::ostream& out) {
    const auto cfg = resolve(o.mod);
    const auto r = required_cutoff(cfg, o.ripple, o.ripple_opt);
    json config{{"command", "cutoff"},
                {"modulator", to_json(cfg)},
                {"ripple_target_lsb", o.ripple},
                {"grid_factor", o.ripple_opt.grid_factor},
                {"alias_terms", o.ripple_opt.alias_terms},
                {"global", global_json(g)}};
    json doc{{"config", config}};
    doc.update(cutoff_json(r));

    Output sink(g, "cutoff", out);
    sink.primary(
        config,
        [&](std::ostream& os) {
            os << "f_ct,f_c_hz,ripple_lsb,worst_duty,f_ct_closed_form,evaluations\n";
            os << io::format_number(r.f_ct) << ',' << io::format_number(r.f_c) << ','
               << io::format_number(r.ripple_lsb) << ',' << r.worst_duty << ','
               << (r.closed_form_f_ct ? io::format_number(*r.closed_form_f_ct) : std::string{}) << ','
               << r.evaluations << '\n';
        },
        doc);
    sink.finish(doc);
}

// ---- settle ------------------------------------------------------------------

struct SettleOptions {
    ModulatorOptions mod;
    std::string fc;
    double ripple = 0.5;
    std::string step = "one_lsb";
    double band = 0.5;
    std::size_t table_points = 61;
};

void run_settle(const SettleOptions& o, const GlobalOptions& g, std::ostream& out) {
    const auto cfg = resolve(o.mod);
    double f_c = 0.0;
    std::optional<CutoffResult> cutoff;
    if (!o.fc.empty()) {
        f_c = parse_hertz(o.fc);
    } else {
        cutoff = required_cutoff(cfg, o.ripple);
        f_c = cutoff->f_c;
    }
    const FilterModel fm{f_c};
    const auto step = parse_step(o.step);
    const auto rate = conversion_rate(cfg, fm, o.band, step);

    json config{{"command", "settle"},
                {"modulator", to_json(cfg)},
                {"f_c_hz", o.fc.empty() ? json(nullptr) : json(f_c)},
                {"ripple_target_lsb", o.fc.empty() ? json(o.ripple) : json(nullptr)},
                {"step", o.step},
                {"band_lsb", o.band},
                {"global", global_json(g)}};
    json doc{{"config", config},
             {"f_c_hz", f_c},
             {"f_ct", f_c * cfg.period()},
             {"settling_s", rate.settling_s},
             {"conversion_rate_hz", rate.rate_hz}};
    if (cutoff) doc["cutoff"] = cutoff_json(*cutoff);

    Output sink(g, "settle", out);
    sink.primary(
        config,
        [&](std::ostream& os) {
            os << "f_c_hz,f_ct,settling_s,conversion_rate_hz\n";
            os << io::format_number(f_c) << ',' << io::format_number(f_c * cfg.period()) << ','
               << io::format_number(rate.settling_s) << ',' << io::format_number(rate.rate_hz) << '\n';
        },
        doc);
    sink.secondary("settle_filter.csv", [&](std::ostream& os) {
        io::write_comment_header(os, "settle", config.dump());
        const auto rows = filter_table(fm, f_c / 100.0, f_c * 100.0, o.table_points);
        io::write_filter_table_csv(os, rows);
    });
    sink.finish(doc);
}

// ---- repro -------------------------------------------------------------------

struct ReproOptions {
    std::string figure;
    int n_min = 4;
    int n_max = 12;
    int n = 0;
    std::string sf_list = "3,7";
    double ripple = 0.5;
    std::string fclk = "100MHz";
    std::string tdr = "1ns";
    std::string tdf = "0";
};

struct ReproRow {
    std::string kind;
    int n;
    int sf;
    std::string metric;
    double value;
};

std::vector<ModulatorConfig> cutoff_family(int n, const std::vector<int>& sfs, double f_clk) {
    std::vector<ModulatorConfig> out{ModulatorConfig::pwm(n, f_clk)};
    for (int sf : sfs) {
        if (sf >= 1 && sf < n) out.push_back(ModulatorConfig::mpwm(n, sf, f_clk));
    }
    return out;
}

std::vector<ReproRow> repro_cutoff(const ReproOptions& o, double f_clk) {
    const auto sfs = parse_int_list(o.sf_list);
    std::vector<ReproRow> rows;
    for (int n = o.n_min; n <= o.n_max; ++n) {
        for (const auto& cfg : cutoff_family(n, sfs, f_clk)) {
            const auto r = required_cutoff(cfg, o.ripple);
            const std::string kind(to_string(cfg.kind));
            rows.push_back({kind, n, cfg.sf, "f_ct", r.f_ct});
            rows.push_back({kind, n, cfg.sf, "ripple_lsb", r.ripple_lsb});
            if (r.closed_form_f_ct) rows.push_back({kind, n, cfg.sf, "f_ct_closed_form", *r.closed_form_f_ct});
        }
    }
    return rows;
}

std::vector<ReproRow> repro_inl_dnl(const ReproOptions& o, double f_clk) {
    const int n = o.n > 0 ? o.n : 10;
    const EdgeModel em{parse_seconds(o.tdr), parse_seconds(o.tdf), 0.0, 0.0, 1.0};
    std::vector<ModulatorConfig> family{ModulatorConfig::pwm(n, f_clk), ModulatorConfig::pcm(n, f_clk),
                                        ModulatorConfig::fons(n, f_clk)};
    for (int sf = 1; sf <= n - 2; ++sf) family.push_back(ModulatorConfig::mpwm(n, sf, f_clk));
    std::vector<ReproRow> rows;
    for (const auto& cfg : family) {
        const std::string kind(to_string(cfg.kind));
        rows.push_back({kind, n, cfg.sf, "inl_lsb", inl(cfg, em).lsb});
        rows.push_back({kind, n, cfg.sf, "inl_closed_form_lsb", inl_formula(cfg, em)});
        rows.push_back({kind, n, cfg.sf, "dnl_lsb", dnl(cfg, em).lsb});
    }
    return rows;
}

std::vector<ReproRow> repro_settling(const ReproOptions& o, double f_clk) {
    const int n = o.n > 0 ? o.n : 12;
    const auto sfs = parse_int_list(o.sf_list);
    std::vector<ReproRow> rows;
    for (const auto& cfg : cutoff_family(n, sfs, f_clk)) {
        const auto r = required_cutoff(cfg, o.ripple);
        const auto rate = conversion_rate(cfg, FilterModel{r.f_c}, 0.5);
        const std::string kind(to_string(cfg.kind));
        rows.push_back({kind, n, cfg.sf, "f_ct", r.f_ct});
        rows.push_back({kind, n, cfg.sf, "f_c_hz", r.f_c});
        rows.push_back({kind, n, cfg.sf, "settling_s", rate.settling_s});
        rows.push_back({kind, n, cfg.sf, "conversion_rate_hz", rate.rate_hz});
    }
    return rows;
}

void run_repro(const ReproOptions& o, const GlobalOptions& g, std::ostream& out) {
    const double f_clk = parse_hertz(o.fclk);
    if (o.n_min < 2 || o.n_max > 16 || o.n_min > o.n_max) {
        throw ParameterError(fmt::format("resolution range {}..{} outside 2..16", o.n_min, o.n_max));
    }
    std::vector<ReproRow> rows;
    if (o.figure == "cutoff_vs_resolution") {
        rows = repro_cutoff(o, f_clk);
    } else if (o.figure == "inl_dnl") {
        rows = repro_inl_dnl(o, f_clk);
    } else if (o.figure == "settling") {
        rows = repro_settling(o, f_clk);
    } else {
        throw UsageError(
            fmt::format("unknown figure '{}' (cutoff_vs_resolution, inl_dnl or settling)", o.figure));
    }

    json config{{"command", "repro"}, {"figure", o.figure},   {"n_min", o.n_min},  {"n_max", o.n_max},
                {"n", o.n},           {"sf", o.sf_list},      {"ripple_target_lsb", o.ripple},
                {"f_clk_hz", f_clk},  {"t_dr_s", parse_seconds(o.tdr)}, {"t_df_s", parse_seconds(o.tdf)},
                {"global", global_json(g)}};
    json table = json::array();
    for (const auto& r : rows) {
        table.push_back({{"kind", r.kind}, {"n", r.n}, {"sf", r.sf}, {"metric", r.metric}, {"value", r.value}});
    }
    json doc{{"config", config}, {"rows", table}};

    Output sink(g, "repro_" + o.figure, out);
    sink.primary(
        config,
        [&](std::ostream& os) {
            os << io::repro_columns << '\n';
            for (const auto& r : rows) {
                os << r.kind << ',' << r.n << ',' << r.sf << ',' << r.metric << ',' << io::format_number(r.value)
                   << '\n';
            }
        },
        doc);
    sink.finish(json{{"config", config}, {"rows", rows.size()}});
}

// ---- periph ------------------------------------------------------------------

struct PeriphCliOptions {
    std::string script;
    int fine_bits = 4;
    std::uint64_t lock_cycles = 1024;
    std::string fclk = "100MHz";
};

json registers_json(const MpwmPeripheral& p) {
    const auto& r = p.registers();
    const auto& s = p.state();
    return json{{"registers",
                 {{"CTRL", r.ctrl}, {"NBITS", r.nbits}, {"DUTY", r.duty}, {"HRDUTY", r.hrduty},
                  {"STATUS", p.read(reg::status).value}}},
                {"state",
                 {{"cycle", s.cycle},
                  {"counter", s.counter},
                  {"active_duty", s.active_duty},
                  {"active_fine", s.active_fine},
                  {"out", s.out},
                  {"enabled", p.enabled()},
                  {"locked", p.locked()}}}};
}

void run_periph(const PeriphCliOptions& o, const GlobalOptions& g, std::ostream& out) {
    std::ifstream in(o.script);
    if (!in) throw IoError(fmt::format("cannot read script '{}'", o.script));
    const auto program = parse_script(in);

    PeriphParams params;
    params.f_clk = parse_hertz(o.fclk);
    params.fine_bits = o.fine_bits;
    params.lock_cycles = o.lock_cycles;
    if (params.fine_bits < 0 || params.fine_bits > 6) {
        throw ParameterError(fmt::format("fine_bits = {} outside 0..6", params.fine_bits));
    }
    if (!(params.f_clk > 0.0)) throw ParameterError("f_clk must be positive");
    MpwmPeripheral dev(params);

    std::vector<CycleRecord> trace;
    json reads = json::array();
    for (const auto& line : program) {
        switch (line.op) {
            case ScriptOp::write: {
                const auto value = static_cast<std::uint32_t>(line.value);
                if (const Fault f = dev.write(line.address, value); f != Fault::none) {
                    throw FaultError(line.line, line.address, value, f);
                }
                break;
            }
            case ScriptOp::read: {
                const auto r = dev.read(line.address);
                if (r.fault != Fault::none) throw FaultError(line.line, line.address, 0, r.fault);
                reads.push_back({{"line", line.line}, {"address", line.address}, {"value", r.value}});
                break;
            }
            case ScriptOp::step: {
                auto records = dev.step_traced(line.value);
                trace.insert(trace.end(), records.begin(), records.end());
                break;
            }
        }
    }

    json config{{"command", "periph"},
                {"script", o.script},
                {"fine_bits", params.fine_bits},
                {"lock_cycles", params.lock_cycles},
                {"f_clk_hz", params.f_clk},
                {"global", global_json(g)}};
    json summary{{"config", config}, {"trace_cycles", trace.size()}, {"reads", reads}};
    summary.update(registers_json(dev));

    Output sink(g, "periph", out);
    sink.secondary("periph.csv", [&](std::ostream& os) {
        io::write_comment_header(os, "periph", config.dump());
        io::write_periph_csv(os, trace);
    });
    sink.secondary("periph.vcd", [&](std::ostream& os) { io::write_periph_vcd(os, trace, params); });
    summary["files"] = sink.files();
    out << summary.dump(2) << '\n';
}

// ---- error records -----------------------------------------------------------

int report(std::ostream& err, int code, const std::string& kind, const std::string& message, json extra = {}) {
    json e{{"kind", kind}, {"message", message}, {"exit_code", code}};
    if (extra.is_object()) e.update(extra);
    err << json{{"error", e}}.dump() << '\n';
    return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pulse-modulation DAC models: waveforms, spectra, linearity, filtering and a peripheral emulator",
                 "mpwm"};
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->always_capture_default();

    GlobalOptions g;
    app.add_option("--out", g.out_dir, "write artifacts into this directory instead of standard output");
    app.add_option("--format", g.format, "primary artifact format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--oversample", g.oversample, "analog samples per clock cycle")->check(CLI::Range(4, 1 << 16));
    app.add_option("--seed", g.seed, "reserved; every algorithm is deterministic");

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "one period of the modulator output");
    add_modulator_options(gen_cmd, gen.mod, true);
    add_edge_options(gen_cmd, gen.edge);
    gen_cmd->add_option("--duty", gen.duty, "coarse duty code")->required();
    gen_cmd->add_option("--fine", gen.fine, "fine code (hrmpwm)");
    gen_cmd->add_option("--output", gen.output, "bits, edges or trace (default bits; edges for hrmpwm)");

    SpectrumOptions spectrum;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Fourier coefficients of one period");
    add_modulator_options(spectrum_cmd, spectrum.mod, true);
    spectrum_cmd->add_option("--duty", spectrum.duty, "duty code")->required();
    spectrum_cmd->add_option("--harmonics", spectrum.harmonics, "highest harmonic (default 2^(n-1))");
    spectrum_cmd->add_option("--method", spectrum.method, "analytic or dft")
        ->check(CLI::IsMember({"analytic", "dft"}));

    MetricsCliOptions metrics;
    auto* metrics_cmd = app.add_subcommand("metrics", "static and dynamic figures of merit");
    add_modulator_options(metrics_cmd, metrics.mod, true);
    add_edge_options(metrics_cmd, metrics.edge);
    metrics_cmd->add_option("--supply-dev", metrics.supply_deviation, "relative supply deviation");
    metrics_cmd->add_flag("--static-only", metrics.static_only, "skip ripple, cutoff and settling");
    metrics_cmd->add_option("--ripple", metrics.ripple, "worst ripple target, LSB");
    metrics_cmd->add_option("--fc", metrics.fc, "fixed filter cutoff instead of the ripple target");
    metrics_cmd->add_option("--step", metrics.step, "one_lsb or full_scale");
    metrics_cmd->add_option("--band", metrics.band, "settling band, LSB");

    CutoffCliOptions cutoff;
    auto* cutoff_cmd = app.add_subcommand("cutoff", "smallest filter cutoff meeting a ripple target");
    add_modulator_options(cutoff_cmd, cutoff.mod, true);
    cutoff_cmd->add_option("--ripple", cutoff.ripple, "worst ripple target, LSB");
    cutoff_cmd->add_option("--grid-factor", cutoff.ripple_opt.grid_factor, "output grid points per clock")
        ->check(CLI::Range(1, 64));
    cutoff_cmd->add_option("--alias-terms", cutoff.ripple_opt.alias_terms, "folded images per grid bin")
        ->check(CLI::Range(0, 1024));

    SettleOptions settle;
    auto* settle_cmd = app.add_subcommand("settle", "filter settling time and conversion rate");
    add_modulator_options(settle_cmd, settle.mod, false);
    settle_cmd->add_option("--fc", settle.fc, "filter cutoff (default: from --ripple via cutoff)");
    settle_cmd->add_option("--ripple", settle.ripple, "worst ripple target when --fc is absent, LSB");
    settle_cmd->add_option("--step", settle.step, "one_lsb or full_scale");
    settle_cmd->add_option("--band", settle.band, "settling band, LSB");
    settle_cmd->add_option("--table-points", settle.table_points, "rows of the filter response table")
        ->check(CLI::Range(2, 100000));

    ReproOptions repro;
    auto* repro_cmd = app.add_subcommand("repro", "sweep datasets: cutoff_vs_resolution, inl_dnl, settling");
    repro_cmd->add_option("figure", repro.figure, "dataset id")->required();
    repro_cmd->add_option("--n-min", repro.n_min, "smallest resolution (cutoff_vs_resolution)");
    repro_cmd->add_option("--n-max", repro.n_max, "largest resolution (cutoff_vs_resolution)");
    repro_cmd->add_option("--n", repro.n, "resolution (inl_dnl default 10, settling default 12)");
    repro_cmd->add_option("--sf", repro.sf_list, "comma-separated MPWM splitting factors");
    repro_cmd->add_option("--ripple", repro.ripple, "worst ripple target, LSB");
    repro_cmd->add_option("--fclk", repro.fclk, "clock frequency");
    repro_cmd->add_option("--tdr", repro.tdr, "rising-edge delay (inl_dnl)");
    repro_cmd->add_option("--tdf", repro.tdf, "falling-edge delay (inl_dnl)");

    PeriphCliOptions periph;
    auto* periph_cmd = app.add_subcommand("periph", "run a register script on the peripheral emulator");
    periph_cmd->add_option("script", periph.script, "script path")->required();
    periph_cmd->add_option("--fine-bits", periph.fine_bits, "delay-line bits");
    periph_cmd->add_option("--lock-cycles", periph.lock_cycles, "DLL lock latency in cycles");
    periph_cmd->add_option("--fclk", periph.fclk, "clock frequency");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return report(err, exit_code::usage, "usage", e.what());
    }

    try {
        if (gen_cmd->parsed()) run_gen(gen, g, out);
        else if (spectrum_cmd->parsed()) run_spectrum(spectrum, g, out);
        else if (metrics_cmd->parsed()) run_metrics(metrics, g, out);
        else if (cutoff_cmd->parsed()) run_cutoff(cutoff, g, out);
        else if (settle_cmd->parsed()) run_settle(settle, g, out);
        else if (repro_cmd->parsed()) run_repro(repro, g, out);
        else if (periph_cmd->parsed()) run_periph(periph, g, out);
    } catch (const ScriptSyntaxError& e) {
        return report(err, exit_code::usage, "script_syntax", e.what(), json{{"line", e.line()}});
    } catch (const UsageError& e) {
        return report(err, exit_code::usage, "usage", e.what());
    } catch (const ParameterError& e) {
        return report(err, exit_code::parameter, "parameter", e.what());
    } catch (const FaultError& e) {
        return report(err, exit_code::fault, "fault", e.what(),
                      json{{"fault", std::string(to_string(e.fault))},
                           {"line", e.line},
                           {"address", e.address},
                           {"value", e.value}});
    } catch (const IoError& e) {
        return report(err, exit_code::io, "io", e.what());
    } catch (const std::exception& e) {
        return report(err, exit_code::internal, "internal", e.what());
    }
    return exit_code::ok;
}

}  // namespace mpwm::cli
