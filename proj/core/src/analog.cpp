#include "mpwm/analog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "fft.hpp"

namespace mpwm {

namespace {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;
constexpr double sqrt2 = std::numbers::sqrt2;

struct Mat2 {
    double a11, a12, a21, a22;
};

struct State {
    double x1 = 0.0;  // y
    double x2 = 0.0;  // y' / w
};

// Scaled state x1 = y, x2 = y'/w:
//   x' = w [[0, 1], [-1, -sqrt2]] x + w [0, 1]^T u.
// Poles at w(-1 +- j)/sqrt2, so sigma = w_d = w/sqrt2 and
//   Phi(h) = e^{-sigma h} [[c + s, sqrt2 s], [-sqrt2 s, c - s]].
class Butterworth2 {
public:
    explicit Butterworth2(double f_c) : omega_(2.0 * pi * f_c), sigma_(omega_ / sqrt2) {}

    double omega() const { return omega_; }

    // Phi(h) - I without cancellation for small w h.
    Mat2 transition_minus_identity(double h) const {
        const double theta = sigma_ * h;
        const double decay_m1 = std::expm1(-theta);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const double half = std::sin(0.5 * theta);
        const double c_m1 = -2.0 * half * half;
        const double decay = decay_m1 + 1.0;
        return {decay_m1 * (c + s) + c_m1 + s, decay * sqrt2 * s, -decay * sqrt2 * s,
                decay_m1 * (c - s) + c_m1 - s};
    }

    // Held input u over an interval: returns the state increment and the
    // interval integral of y divided by its length.
    struct Step {
        State delta;
        double mean_y;
    };

    static Step hold(const Mat2& d, const State& x, double u, double omega_h) {
        const double e1 = x.x1 - u;
        const double e2 = x.x2;
        Step st;
        st.delta.x1 = d.a11 * e1 + d.a12 * e2;
        st.delta.x2 = d.a21 * e1 + d.a22 * e2;
        // int y = int u + (-sqrt2 dx1 - dx2) / w
        st.mean_y = u + (-sqrt2 * st.delta.x1 - st.delta.x2) / omega_h;
        return st;
    }

private:
    double omega_;
    double sigma_;
};

// Runs a held sample sequence once from x0; visits (mean_y, state after) per sample.
template <class Visit>
State run_held(const Butterworth2& filter, const Mat2& d, double h, const std::vector<double>& u, State x,
               Visit&& visit) {
    const double omega_h = filter.omega() * h;
    for (double ui : u) {
        const auto st = Butterworth2::hold(d, x, ui, omega_h);
        x.x1 += st.delta.x1;
        x.x2 += st.delta.x2;
        visit(st.mean_y, x);
    }
    return x;
}

// Initial state that reproduces itself after one pass over u.
State periodic_initial_state(const Butterworth2& filter, const Mat2& d, double h, const std::vector<double>& u) {
    const State forced = run_held(filter, d, h, u, State{}, [](double, const State&) {});
    const Mat2 pm = filter.transition_minus_identity(h * static_cast<double>(u.size()));
    // (I - Phi_T) x0 = forced
    const double m11 = -pm.a11, m12 = -pm.a12, m21 = -pm.a21, m22 = -pm.a22;
    const double det = m11 * m22 - m12 * m21;
    return {(m22 * forced.x1 - m12 * forced.x2) / det, (-m21 * forced.x1 + m11 * forced.x2) / det};
}

double ramp_integral(double x, double tau) {
    if (tau <= 0.0) return std::max(x, 0.0);
    const double half = 0.5 * tau;
    if (x <= -half) return 0.0;
    if (x >= half) return x;
    const double r = x + half;
    return r * r / (2.0 * tau);
}

struct EdgeWindow {
    double center;
    double tau;
    int sign;
    double start() const { return center - 0.5 * tau; }
    double end() const { return center + 0.5 * tau; }
};

// 10-90% time of a linear ramp is 80% of its full length.
constexpr double ramp_full_over_10_90 = 1.0 / 0.8;

std::uint32_t edge_count(const ModulatorConfig& cfg, const DutyCode& duty) {
    if (cfg.kind == ModulatorKind::fons) return count_pulses(fons_wave(cfg, duty));
    std::uint32_t e = edge_count_formula(cfg, duty.coarse);
    if (duty.coarse == 0 && duty.fine != 0) e = 1;
    return e;
}

std::vector<cplx> harmonic_weights(const FilterModel& fm, double period, std::size_t slots, std::size_t grid,
                                   int alias_terms) {
    const double N = static_cast<double>(slots);
    auto z = [&](std::size_t k) -> cplx {
        if (k == 0) return 1.0;
        const double x = static_cast<double>(k) * pi / N;
        return std::polar(std::sin(x) / x, -x) * fm.response(static_cast<double>(k) / period);
    };
    std::vector<cplx> w(grid / 2 + 1);
    for (std::size_t r = 0; r <= grid / 2; ++r) {
        cplx sum = z(r);
        for (int l = 1; l <= alias_terms; ++l) {
            const std::size_t image = static_cast<std::size_t>(l) * grid;
            sum += z(r + image) + std::conj(z(image - r));
        }
        w[r] = sum / N;
    }
    return w;
}

class RippleEvaluator {
public:
    RippleEvaluator(const ModulatorConfig& cfg, const FilterModel& fm, const RippleOptions& opt)
        : slots_(cfg.period_cycles()), grid_(slots_ * static_cast<std::size_t>(opt.grid_factor)) {
        fm.validate();
        if (opt.grid_factor < 1) throw ParameterError("grid_factor must be >= 1");
        if (opt.alias_terms < 0) throw ParameterError("alias_terms must be >= 0");
        weights_ = harmonic_weights(fm, cfg.period(), slots_, grid_, opt.alias_terms);
        samples_.resize(slots_);
        bins_.resize(slots_ / 2 + 1);
        folded_.resize(grid_ / 2 + 1);
        output_.resize(grid_);
    }

    double ripple_lsb(const BitWaveform& wave) {
        std::copy(wave.bits().begin(), wave.bits().end(), samples_.begin());
        detail::real_forward(samples_, bins_);
        for (std::size_t r = 0; r <= grid_ / 2; ++r) {
            const std::size_t m = r % slots_;
            const cplx b = m <= slots_ / 2 ? bins_[m] : std::conj(bins_[slots_ - m]);
            folded_[r] = b * weights_[r];
        }
        detail::real_inverse(folded_, output_);
        const auto [lo, hi] = std::minmax_element(output_.begin(), output_.end());
        return (*hi - *lo) * static_cast<double>(slots_);
    }

private:
    std::size_t slots_;
    std::size_t grid_;
    std::vector<cplx> weights_;
    std::vector<double> samples_;
    std::vector<cplx> bins_;
    std::vector<cplx> folded_;
    std::vector<double> output_;
};

}  // namespace

void EdgeModel::validate(double f_clk) const {
    for (double v : {t_dr, t_df, t_rise, t_fall}) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("edge model times must be finite and >= 0");
    }
    if (!(u_s > 0.0) || !std::isfinite(u_s)) throw ParameterError(fmt::format("u_s = {} must be positive", u_s));
    const double t_clk = 1.0 / f_clk;
    if (t_rise >= t_clk || t_fall >= t_clk) {
        throw ParameterError(fmt::format("rise/fall time must be below the clock period {} s", t_clk));
    }
}

void FilterModel::validate() const {
    if (!(f_c > 0.0) || !std::isfinite(f_c)) throw ParameterError(fmt::format("f_c = {} must be positive", f_c));
}

cplx FilterModel::response(double f_hz) const {
    const cplx s{0.0, f_hz / f_c};
    return 1.0 / (s * s + sqrt2 * s + 1.0);
}

AnalogTrace to_analog(const EdgeList& edges, const EdgeModel& em, int oversample) {
    if (oversample < 4) throw ParameterError(fmt::format("oversample = {} must be >= 4", oversample));
    em.validate(edges.f_clk());
    const std::int64_t clocks = edges.period_ticks() / edges.ticks_per_clock();
    const double period = edges.period_seconds();
    const std::size_t samples = static_cast<std::size_t>(clocks) * static_cast<std::size_t>(oversample);
    const double sample_rate = static_cast<double>(oversample) * edges.f_clk();
    const double dt = period / static_cast<double>(samples);

    const double tau_rise = em.t_rise * ramp_full_over_10_90;
    const double tau_fall = em.t_fall * ramp_full_over_10_90;
    for (double tau : {tau_rise, tau_fall}) {
        if (tau > 0.0 && tau < dt) {
            const double needed = std::ceil(1.0 / (tau * edges.f_clk()));
            throw ParameterError(fmt::format(
                "edge ramp of {} s is not resolvable at {} Hz; needs sample rate >= {} Hz (oversample >= {})", tau,
                sample_rate, 1.0 / tau, needed));
        }
    }

    std::vector<EdgeWindow> base;
    base.reserve(edges.transitions().size());
    for (const auto& t : edges.transitions()) {
        const bool rising = t.polarity == Polarity::rising;
        base.push_back({edges.time_of(t) + (rising ? em.t_df : em.t_dr), rising ? tau_rise : tau_fall,
                        rising ? 1 : -1});
    }
    std::sort(base.begin(), base.end(), [](const auto& a, const auto& b) { return a.center < b.center; });
    for (std::size_t i = 0; i < base.size(); ++i) {
        const auto& cur = base[i];
        const bool wrap = i + 1 == base.size();
        const auto& next = base[wrap ? 0 : i + 1];
        const double next_start = next.start() + (wrap ? period : 0.0);
        if (cur.sign == next.sign || cur.end() > next_start) {
            throw ParameterError(fmt::format("edges near t = {} s overlap: pulse narrower than the edge model",
                                             cur.center));
        }
    }
    std::vector<EdgeWindow> windows;
    windows.reserve(base.size() * 3);
    for (int m = -1; m <= 1; ++m) {
        for (auto w : base) {
            w.center += m * period;
            windows.push_back(w);
        }
    }

    AnalogTrace trace;
    trace.samples.resize(samples);
    trace.sample_rate = sample_rate;
    trace.period_samples = samples;
    double level = edges.initial_high() ? 1.0 : 0.0;
    std::size_t p = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double a = period * static_cast<double>(i) / static_cast<double>(samples);
        const double b = period * static_cast<double>(i + 1) / static_cast<double>(samples);
        while (p < windows.size() && windows[p].end() <= a) {
            level += windows[p].sign;
            ++p;
        }
        double integral = level * (b - a);
        for (std::size_t q = p; q < windows.size() && windows[q].start() < b; ++q) {
            const auto& w = windows[q];
            integral += w.sign * (ramp_integral(b - w.center, w.tau) - ramp_integral(a - w.center, w.tau));
        }
        trace.samples[i] = em.u_s * integral / (b - a);
    }
    return trace;
}

AnalogTrace to_analog(const BitWaveform& wave, const EdgeModel& em, int oversample) {
    return to_analog(to_edges(wave), em, oversample);
}

AnalogTrace repeat_periods(const AnalogTrace& one_period, std::size_t periods) {
    AnalogTrace out = one_period;
    out.samples.clear();
    out.samples.reserve(one_period.samples.size() * periods);
    for (std::size_t p = 0; p < periods; ++p) {
        out.samples.insert(out.samples.end(), one_period.samples.begin(), one_period.samples.end());
    }
    return out;
}

double dc_average(const AnalogTrace& trace) {
    if (trace.period_samples == 0 || trace.samples.empty() || trace.samples.size() % trace.period_samples != 0) {
        throw ParameterError(fmt::format("trace of {} samples does not cover a whole number of {}-sample periods",
                                         trace.samples.size(), trace.period_samples));
    }
    double sum = 0.0;
    double carry = 0.0;
    for (double v : trace.samples) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(trace.samples.size());
}

double dc_average(const ModulatorConfig& cfg, const DutyCode& duty, const EdgeModel& em) {
    validate_duty(cfg, duty);
    em.validate(cfg.f_clk);
    const double N = static_cast<double>(cfg.period_cycles());
    const double fine = cfg.fine_bits > 0 ? std::ldexp(static_cast<double>(duty.fine), -cfg.fine_bits) : 0.0;
    const double edges = static_cast<double>(edge_count(cfg, duty));
    return em.u_s * (static_cast<double>(duty.coarse) + fine + edges * em.width_error() * cfg.f_clk) / N;
}

double dc_average(const EdgeList& edges, const EdgeModel& em) {
    em.validate(edges.f_clk());
    const double high = static_cast<double>(edges.high_ticks()) / static_cast<double>(edges.period_ticks());
    const double pulses = static_cast<double>(count_pulses(edges));
    return em.u_s * (high + pulses * em.width_error() / edges.period_seconds());
}

AnalogTrace filter_response(const AnalogTrace& trace, const FilterModel& fm, FilterStart start) {
    fm.validate();
    if (!(trace.sample_rate > 0.0)) throw ParameterError("trace sample rate must be positive");
    const Butterworth2 filter(fm.f_c);
    const double h = trace.dt();
    const Mat2 d = filter.transition_minus_identity(h);
    State x0;
    if (start == FilterStart::periodic && !trace.samples.empty()) x0 = periodic_initial_state(filter, d, h, trace.samples);

    AnalogTrace out = trace;
    std::size_t i = 0;
    run_held(filter, d, h, trace.samples, x0, [&](double mean_y, const State&) { out.samples[i++] = mean_y; });
    return out;
}

double steady_ripple(const ModulatorConfig& cfg, const DutyCode& duty, const FilterModel& fm,
                     const RippleOptions& opt) {
    validate_duty(cfg, duty);
    RippleEvaluator eval(cfg, fm, opt);
    return eval.ripple_lsb(generate(cfg, duty));
}

double steady_ripple_simulated(const ModulatorConfig& cfg, const DutyCode& duty, const FilterModel& fm,
                               int oversample) {
    validate_duty(cfg, duty);
    fm.validate();
    const auto trace = to_analog(generate(cfg, duty), EdgeModel::ideal(), oversample);
    const Butterworth2 filter(fm.f_c);
    const double h = trace.dt();
    const Mat2 d = filter.transition_minus_identity(h);
    const State x0 = periodic_initial_state(filter, d, h, trace.samples);
    double lo = x0.x1;
    double hi = x0.x1;
    run_held(filter, d, h, trace.samples, x0, [&](double, const State& x) {
        lo = std::min(lo, x.x1);
        hi = std::max(hi, x.x1);
    });
    return (hi - lo) * static_cast<double>(cfg.period_cycles());
}

WorstRipple worst_ripple(const ModulatorConfig& cfg, const FilterModel& fm, const RippleOptions& opt) {
    cfg.validate();
    RippleEvaluator eval(cfg, fm, opt);
    WorstRipple worst;
    for (std::uint32_t duty = 1; duty < cfg.period_cycles(); ++duty) {
        const double r = eval.ripple_lsb(generate(cfg, DutyCode{duty, 0}));
        if (r > worst.lsb) worst = {r, duty};
    }
    return worst;
}

double step_lsb(StepKind step, int n) {
    return step == StepKind::one_lsb ? 1.0 : std::ldexp(1.0, n) - 1.0;
}

double settling_time(const FilterModel& fm, StepKind step, double band_lsb, int n) {
    fm.validate();
    if (!(band_lsb > 0.0)) throw ParameterError(fmt::format("band = {} LSB must be positive", band_lsb));
    if (n < 1 || n > 32) throw ParameterError(fmt::format("n = {} outside 1..32", n));
    const double band = band_lsb / step_lsb(step, n);
    // Normalized step error e(t) = e^{-sigma t}(cos w_d t + sin w_d t), sigma = w_d.
    // Its extrema sit at w_d t = k pi with |e| = e^{-k pi}; the last one above
    // the band brackets the final crossing.
    if (band >= 1.0) return 0.0;
    const double omega_d = 2.0 * pi * fm.f_c / sqrt2;
    auto k = static_cast<long>(std::floor(std::log(1.0 / band) / pi));
    while (k > 0 && std::exp(-static_cast<double>(k) * pi) <= band) --k;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    auto excess = [&](double t) {
        const double th = omega_d * t;
        return sign * std::exp(-th) * (std::cos(th) + std::sin(th)) - band;
    };
    const double lo = static_cast<double>(k) * pi / omega_d;
    const double hi = (static_cast<double>(k) * pi + 0.75 * pi) / omega_d;
    std::uintmax_t iters = 200;
    const auto root = boost::math::tools::toms748_solve(excess, lo, hi, boost::math::tools::eps_tolerance<double>(50),
                                                        iters);
    return 0.5 * (root.first + root.second);
}

std::vector<FilterTableRow> filter_table(const FilterModel& fm, double f_lo, double f_hi, std::size_t points) {
    fm.validate();
    if (!(f_lo > 0.0) || !(f_hi > f_lo) || points < 2) throw ParameterError("filter table needs 0 < f_lo < f_hi, points >= 2");
    std::vector<FilterTableRow> rows;
    rows.reserve(points);
    const double ratio = std::log(f_hi / f_lo);
    for (std::size_t i = 0; i < points; ++i) {
        const double f = f_lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(points - 1));
        const cplx h = fm.response(f);
        rows.push_back({f, std::abs(h), 20.0 * std::log10(std::abs(h)), std::arg(h)});
    }
    return rows;
}

}  // namespace mpwm
