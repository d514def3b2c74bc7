#include "mpwm/metrics.hpp"

#include <cmath>
#include <limits>
#include <map>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

namespace mpwm {

namespace {

std::uint32_t counted_edges(const ModulatorConfig& cfg, std::uint32_t duty) {
    return count_pulses(generate(cfg, DutyCode{duty, 0}));
}

std::uint32_t closed_form_edges(const ModulatorConfig& cfg, std::uint32_t duty) {
    if (cfg.kind == ModulatorKind::fons) return counted_edges(cfg, duty);
    return edge_count_formula(cfg, duty);
}

}  // namespace

double edge_error_lsb(std::uint32_t edges, const EdgeModel& em, double f_clk) {
    return static_cast<double>(edges) * (em.width_error() * f_clk);
}

double static_error(const ModulatorConfig& cfg, std::uint32_t duty, const EdgeModel& em, double supply_deviation) {
    validate_duty(cfg, DutyCode{duty, 0});
    em.validate(cfg.f_clk);
    // u_avg / U_LSB = (1 + eps)(D + E dW f_clk); the ideal D is subtracted
    // symbolically so that eps = 0 leaves the edge term untouched.
    const double edge = edge_error_lsb(closed_form_edges(cfg, duty), em, cfg.f_clk);
    return supply_deviation * static_cast<double>(duty) + (1.0 + supply_deviation) * edge;
}

double inl_formula(const ModulatorConfig& cfg, const EdgeModel& em) {
    cfg.validate();
    const double unit = std::abs(em.width_error() * cfg.f_clk);
    switch (cfg.kind) {
        case ModulatorKind::pwm: return unit;
        case ModulatorKind::pcm:
        case ModulatorKind::fons: return std::ldexp(unit, cfg.n - 1);
        case ModulatorKind::mpwm:
        case ModulatorKind::hrmpwm: return std::ldexp(unit, cfg.sf);
    }
    return unit;
}

Nonlinearity inl(const ModulatorConfig& cfg, const EdgeModel& em) {
    cfg.validate();
    em.validate(cfg.f_clk);
    Nonlinearity worst;
    for (std::uint32_t d = 0; d < cfg.period_cycles(); ++d) {
        const double e = std::abs(edge_error_lsb(counted_edges(cfg, d), em, cfg.f_clk));
        if (e > worst.lsb) worst = {e, d};
    }
    return worst;
}

double dnl_formula(const ModulatorConfig& cfg, const EdgeModel& em) {
    cfg.validate();
    return std::abs(em.width_error() * cfg.f_clk);
}

Nonlinearity dnl(const ModulatorConfig& cfg, const EdgeModel& em, double supply_deviation) {
    cfg.validate();
    em.validate(cfg.f_clk);
    const double unit = em.width_error() * cfg.f_clk;
    Nonlinearity worst;
    std::uint32_t prev = counted_edges(cfg, 0);
    for (std::uint32_t d = 0; d + 1 < cfg.period_cycles(); ++d) {
        const std::uint32_t next = counted_edges(cfg, d + 1);
        const double delta_edges = static_cast<double>(next) - static_cast<double>(prev);
        // (1 + eps)(1 + dE dW f_clk) - 1
        const double e = std::abs(supply_deviation + (1.0 + supply_deviation) * (delta_edges * unit));
        if (e > worst.lsb) worst = {e, d};
        prev = next;
    }
    return worst;
}

double pwm_cutoff_rule(int n, double ripple_lsb) {
    return 0.81 * std::sqrt(ripple_lsb / std::ldexp(1.0, n));
}

CutoffResult required_cutoff(const ModulatorConfig& cfg, double ripple_target_lsb, const RippleOptions& opt) {
    cfg.validate();
    if (!(ripple_target_lsb > 0.0)) throw ParameterError(fmt::format("ripple target {} must be positive", ripple_target_lsb));
    const double period = cfg.period();
    std::map<double, WorstRipple> memo;
    auto worst_at = [&](double f_ct) -> const WorstRipple& {
        auto it = memo.find(f_ct);
        if (it == memo.end()) it = memo.emplace(f_ct, worst_ripple(cfg, FilterModel{f_ct / period}, opt)).first;
        return it->second;
    };

    constexpr double floor_f_ct = 1e-9;
    const double ceiling_f_ct = std::ldexp(1.0, cfg.n);
    double lo = 1e-3;
    while (worst_at(lo).lsb > ripple_target_lsb) {
        lo /= 4.0;
        if (lo < floor_f_ct) {
            throw ParameterError(fmt::format("cutoff search did not bracket {} LSB: ripple still above target at f_cT = {}",
                                             ripple_target_lsb, lo * 4.0));
        }
    }
    double hi = lo * 4.0;
    while (worst_at(hi).lsb <= ripple_target_lsb) {
        lo = hi;
        hi *= 4.0;
        if (hi > ceiling_f_ct) {
            throw ParameterError(fmt::format("cutoff search did not bracket {} LSB: ripple {} LSB at f_cT = {}",
                                             ripple_target_lsb, worst_at(lo).lsb, lo));
        }
    }

    auto excess = [&](double log_f_ct) { return worst_at(std::exp(log_f_ct)).lsb - ripple_target_lsb; };
    std::uintmax_t iters = 60;
    const auto bracket = boost::math::tools::toms748_solve(excess, std::log(lo), std::log(hi),
                                                           boost::math::tools::eps_tolerance<double>(24), iters);
    // The lower end of the final bracket satisfies the target.
    CutoffResult out;
    out.f_ct = std::exp(bracket.first);
    out.f_c = out.f_ct / period;
    const auto& w = worst_at(out.f_ct);
    out.ripple_lsb = w.lsb;
    out.worst_duty = w.duty;
    out.evaluations = static_cast<int>(memo.size());
    if (cfg.kind == ModulatorKind::pwm) out.closed_form_f_ct = pwm_cutoff_rule(cfg.n, ripple_target_lsb);
    return out;
}

ConversionRate conversion_rate(const ModulatorConfig& cfg, const FilterModel& fm, double band_lsb, StepKind step) {
    cfg.validate();
    ConversionRate out;
    out.settling_s = settling_time(fm, step, band_lsb, cfg.n);
    out.rate_hz = out.settling_s > 0.0 ? 1.0 / out.settling_s : std::numeric_limits<double>::infinity();
    return out;
}

MetricsReport compute_metrics(const ModulatorConfig& cfg, const EdgeModel& em, const MetricsOptions& opt) {
    cfg.validate();
    em.validate(cfg.f_clk);
    MetricsReport r;
    r.config = cfg;
    r.edge_model = em;
    r.supply_deviation = opt.supply_deviation;
    r.u_lsb = std::ldexp(em.u_s, -cfg.n);

    const std::uint32_t codes = cfg.period_cycles();
    r.static_error_lsb.resize(codes);
    r.edge_counts.resize(codes);
    for (std::uint32_t d = 0; d < codes; ++d) {
        r.edge_counts[d] = counted_edges(cfg, d);
        r.static_error_lsb[d] = static_error(cfg, d, em, opt.supply_deviation);
    }
    const auto i = inl(cfg, em);
    r.inl = i.lsb;
    r.inl_worst_duty = i.worst_duty;
    r.inl_closed_form = inl_formula(cfg, em);
    const auto dn = dnl(cfg, em, opt.supply_deviation);
    r.dnl = dn.lsb;
    r.dnl_worst_duty = dn.worst_duty;
    r.dnl_closed_form = dnl_formula(cfg, em);
    for (std::uint32_t d = 0; d + 1 < codes; ++d) {
        const double step = 1.0 + (r.static_error_lsb[d + 1] - r.static_error_lsb[d]);
        if (!(step > 0.0)) r.monotonic = false;
    }

    if (opt.dynamic) {
        r.has_dynamic = true;
        if (opt.f_c) {
            const FilterModel fm{*opt.f_c};
            fm.validate();
            r.f_c = *opt.f_c;
            r.f_ct = r.f_c * cfg.period();
            const auto w = worst_ripple(cfg, fm, opt.ripple);
            r.ripple_worst = w.lsb;
            r.ripple_worst_duty = w.duty;
            if (cfg.kind == ModulatorKind::pwm) r.f_ct_closed_form = pwm_cutoff_rule(cfg.n, opt.ripple_target_lsb);
        } else {
            const auto c = required_cutoff(cfg, opt.ripple_target_lsb, opt.ripple);
            r.f_c = c.f_c;
            r.f_ct = c.f_ct;
            r.f_ct_closed_form = c.closed_form_f_ct;
            r.ripple_worst = c.ripple_lsb;
            r.ripple_worst_duty = c.worst_duty;
        }
        const auto rate = conversion_rate(cfg, FilterModel{r.f_c}, opt.settle_band_lsb, opt.step);
        r.settling_s = rate.settling_s;
        r.max_conversion_rate = rate.rate_hz;
    }
    return r;
}

}  // namespace mpwm
