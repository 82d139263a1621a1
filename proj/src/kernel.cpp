// kernel.cpp: direct kernel evaluation, L1 norm, tabulation, tail fit

#include "spinboson/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "spinboson/errors.hpp"
#include "spinboson/quadrature.hpp"

namespace spinboson {

namespace {

// (1 - e^{-x}) / x
double phi1(double x) noexcept {
    if (x == 0.0) return 1.0;
    return -std::expm1(-x) / x;
}

// (x - 1 + e^{-x}) / x²
double phi2(double x) noexcept {
    if (x < 0.01) {
        return 0.5 + x * (-1.0 / 6.0 + x * (1.0 / 24.0 + x * (-1.0 / 120.0 +
               x * (1.0 / 720.0 + x * (-1.0 / 5040.0 + x / 40320.0)))));
    }
    return (x + std::expm1(-x)) / (x * x);
}

double sign_of(double t) noexcept { return t < 0.0 ? -1.0 : 1.0; }

double time_scale_hint(double t) noexcept { return t > 0.0 ? 1.0 / t : 0.0; }

}  // namespace

KernelSource::KernelSource(ModelSpec spec) : source_(std::move(spec)) {
    std::get<ModelSpec>(source_).validate();
}

KernelSource::KernelSource(DiscreteModes modes) : source_(std::move(modes)) {
    if (std::get<DiscreteModes>(source_).size() == 0) throw ArgumentError("kernel source: no modes");
}

double KernelSource::W(double t) const {
    const double a = std::abs(t);
    if (const auto* m = modes()) {
        return 0.25 * m->sum([a](double w) { return std::exp(-a * w); });
    }
    const ModelSpec& s = *spec();
    const Dispersion disp = s.dispersion;
    return 0.25 * radial_integral(s, [disp, a](double r) { return std::exp(-a * disp(r)); }, 0.0,
                                  time_scale_hint(a));
}

double KernelSource::dW(double t) const {
    const double a = std::abs(t);
    double value = 0.0;
    if (const auto* m = modes()) {
        value = -0.25 * m->sum([a](double w) { return w * std::exp(-a * w); });
    } else {
        const ModelSpec& s = *spec();
        const Dispersion disp = s.dispersion;
        value = -0.25 * radial_integral(
                            s, [disp, a](double r) { const double w = disp(r); return w * std::exp(-a * w); },
                            0.0, time_scale_hint(a));
    }
    return sign_of(t) * value;
}

double KernelSource::Phi(double t) const {
    const double a = std::abs(t);
    double value = 0.0;
    if (const auto* m = modes()) {
        value = 0.25 * a * m->sum([a](double w) { return phi1(a * w); });
    } else {
        const ModelSpec& s = *spec();
        const Dispersion disp = s.dispersion;
        value = 0.25 * a * radial_integral(s, [disp, a](double r) { return phi1(a * disp(r)); }, 0.0,
                                           time_scale_hint(a));
    }
    return sign_of(t) * value;
}

double KernelSource::V(double t) const {
    const double a = std::abs(t);
    if (const auto* m = modes()) {
        return 0.25 * a * a * m->sum([a](double w) { return phi2(a * w); });
    }
    const ModelSpec& s = *spec();
    const Dispersion disp = s.dispersion;
    return 0.25 * a * a *
           radial_integral(s, [disp, a](double r) { return phi2(a * disp(r)); }, 0.0, time_scale_hint(a));
}

double KernelSource::l1_fubini() const {
    if (const auto* m = modes()) return 0.5 * m->sum([](double w) { return 1.0 / w; });
    return 0.5 * weighted_norm_squared(*spec(), 0.5);
}

double KernelSource::omega_scale() const {
    if (const auto* m = modes()) return m->max_omega();
    const ModelSpec& s = *spec();
    return s.omega(s.support_radius());
}

double KernelSource::mass() const {
    if (const auto* m = modes()) return m->min_omega();
    return spec()->dispersion.infimum();
}

double kernel_value(const KernelSource& source, double t) { return source.W(t); }

L1Norm l1_norm(const KernelSource& source) {
    L1Norm out;
    out.fubini = source.l1_fubini();  // ∫_R W = ½ ||ω^{-1/2}v||²
    if (!std::isfinite(out.fubini)) throw ModelClassError("l1_norm: v is not in D(omega^{-1/2})");

    // Independent route: quadrature in t of the directly evaluated kernel,
    // with an analytic tail beyond t_cut.
    const double s = 1.0 / source.omega_scale();
    double t_cut = 1000.0 * s;
    double tail = 0.0;
    if (const auto* m = source.modes()) {
        t_cut = 40.0 / m->min_omega();
        tail = 0.25 * m->sum([t_cut](double w) { return std::exp(-w * t_cut) / w; });
    } else if (source.mass() > 0.0) {
        t_cut = std::max(t_cut, 35.0 / source.mass());
        const double w = source.W(t_cut);
        const double gamma = -source.dW(t_cut) / w;
        tail = w > 0.0 ? w / gamma : 0.0;
    } else {
        const ModelSpec& spec = *source.spec();
        const double p = spec.dimension - 2.0 * spec.alpha;
        tail = source.W(t_cut) * t_cut / (p - 1.0);
    }

    std::vector<double> breaks{0.0, 0.25 * s};
    while (breaks.back() * 2.0 < t_cut) breaks.push_back(breaks.back() * 2.0);
    breaks.push_back(t_cut);
    const quad::Result body = quad::integrate_pieces([&](double t) { return source.W(t); }, breaks, 1e-12);
    out.time_quadrature = 2.0 * (body.value + tail);
    out.relative_difference = std::abs(out.time_quadrature - out.fubini) / out.fubini;
    if (out.relative_difference > kL1ConsistencyTolerance) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "l1_norm: Fubini value " << out.fubini << " and time quadrature " << out.time_quadrature
            << " disagree (relative " << out.relative_difference << ")";
        throw NumericalError("l1_inconsistent", msg.str());
    }
    return out;
}

// ---------------------------------------------------------------------------
// KernelTable

namespace {

struct Hermite3 {
    double h00, h10, h01, h11;
    explicit Hermite3(double x) noexcept {
        const double x2 = x * x;
        const double x3 = x2 * x;
        h00 = 2.0 * x3 - 3.0 * x2 + 1.0;
        h10 = x3 - 2.0 * x2 + x;
        h01 = -2.0 * x3 + 3.0 * x2;
        h11 = x3 - x2;
    }
};

// Quintic Hermite basis on [0,1] matching value, first and second derivative.
struct Hermite5 {
    double f0, d0, s0, s1, d1, f1;
    explicit Hermite5(double x) noexcept {
        const double x2 = x * x;
        const double x3 = x2 * x;
        const double x4 = x3 * x;
        const double x5 = x4 * x;
        f0 = 1.0 - 10.0 * x3 + 15.0 * x4 - 6.0 * x5;
        d0 = x - 6.0 * x3 + 8.0 * x4 - 3.0 * x5;
        s0 = 0.5 * x2 - 1.5 * x3 + 1.5 * x4 - 0.5 * x5;
        s1 = 0.5 * x3 - x4 + 0.5 * x5;
        d1 = -4.0 * x3 + 7.0 * x4 - 3.0 * x5;
        f1 = 10.0 * x3 - 15.0 * x4 + 6.0 * x5;
    }
};

}  // namespace

KernelTable::KernelTable(KernelSource source, double t_max, double tolerance)
    : source_(std::move(source)), t_max_(t_max), tolerance_(tolerance) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ArgumentError("build_table: t_max must be positive");
    if (!(tolerance > 0.0)) throw ArgumentError("build_table: tolerance must be positive");

    const double s = 1.0 / source_.omega_scale();
    double h0 = 0.02 * s;
    double ratio = 1.01;
    constexpr int kMaxRefinements = 5;
    for (refinements_ = 0;; ++refinements_) {
        sample(h0, ratio);
        max_probe_error_ = probe(1000);
        if (max_probe_error_ <= tolerance_) break;
        if (refinements_ == kMaxRefinements) {
            std::ostringstream msg;
            msg << "build_table: probe error " << max_probe_error_ << " exceeds tolerance " << tolerance_
                << " after " << refinements_ << " refinements (" << nodes_.size() << " nodes)";
            throw NumericalError("tabulation", msg.str());
        }
        h0 *= 0.5;
        ratio = 1.0 + 0.5 * (ratio - 1.0);
    }
}

void KernelTable::sample(double h0, double ratio) {
    t_switch_ = std::min(t_max_, 2.0 / source_.omega_scale());
    n_uniform_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t_switch_ / h0)));
    h0_ = t_switch_ / static_cast<double>(n_uniform_);
    std::size_t n_log = 0;
    if (t_max_ > t_switch_) {
        n_log = std::max<std::size_t>(1, static_cast<std::size_t>(
                                             std::ceil(std::log(t_max_ / t_switch_) / std::log(ratio))));
        log_ratio_ = std::log(t_max_ / t_switch_) / static_cast<double>(n_log);
    }
    nodes_.clear();
    nodes_.reserve(n_uniform_ + n_log + 1);
    auto push = [this](double t) {
        nodes_.push_back({t, source_.W(t), source_.dW(t), source_.Phi(t), source_.V(t)});
    };
    for (std::size_t i = 0; i <= n_uniform_; ++i) push(i == n_uniform_ ? t_switch_ : i * h0_);
    for (std::size_t i = 1; i <= n_log; ++i) {
        push(i == n_log ? t_max_ : t_switch_ * std::exp(i * log_ratio_));
    }

    const Node& last = nodes_.back();
    tail_ = TailModel{};
    tail_.t0 = last.t;
    tail_.w0 = last.w;
    tail_.phi0 = last.phi;
    tail_.v0 = last.v;
    if (source_.is_discrete()) {
        tail_.kind = TailKind::exact;
    } else if (source_.mass() > 0.0 || !(last.w > 0.0)) {
        tail_.kind = TailKind::exponential;
        tail_.exponent = last.w > 0.0 ? -last.dw / last.w : std::max(source_.mass(), 1.0);
    } else {
        const ModelSpec& spec = *source_.spec();
        tail_.kind = TailKind::power_law;
        tail_.exponent = spec.dimension - 2.0 * spec.alpha;
        tail_.coefficient = last.w * std::pow(last.t, tail_.exponent);
    }
}

double KernelTable::probe(int n_probes) const {
    std::mt19937_64 gen(0x5eed5eedULL);
    const double w_zero = nodes_.front().w;
    double worst = 0.0;
    for (int i = 0; i < n_probes; ++i) {
        const double t = t_max_ * static_cast<double>(gen() >> 11) * 0x1.0p-53;
        const double w = source_.W(t);
        const double phi = source_.Phi(t);
        const double v = source_.V(t);
        worst = std::max(worst, std::abs(W(t) - w) / std::max(w_zero, std::abs(w)));
        worst = std::max(worst, std::abs(Phi(t) - phi) / std::max(w_zero, std::abs(phi)));
        worst = std::max(worst, std::abs(V(t) - v) / std::max(w_zero, std::abs(v)));
    }
    return worst;
}

std::size_t KernelTable::locate(double t) const noexcept {
    std::size_t i = 0;
    if (t < t_switch_) {
        i = static_cast<std::size_t>(t / h0_);
    } else {
        i = n_uniform_ + static_cast<std::size_t>(std::log(t / t_switch_) / log_ratio_);
    }
    const std::size_t last_cell = nodes_.size() - 2;
    i = std::min(i, last_cell);
    while (i > 0 && t < nodes_[i].t) --i;
    while (i < last_cell && t > nodes_[i + 1].t) ++i;
    return i;
}

double KernelTable::W(double t) const noexcept {
    const double a = std::abs(t);
    if (a > t_max_) return tail_W(a);
    const std::size_t i = locate(a);
    const Node& n0 = nodes_[i];
    const Node& n1 = nodes_[i + 1];
    const double h = n1.t - n0.t;
    const Hermite3 b((a - n0.t) / h);
    return b.h00 * n0.w + b.h10 * h * n0.dw + b.h01 * n1.w + b.h11 * h * n1.dw;
}

double KernelTable::Phi(double t) const noexcept {
    const double a = std::abs(t);
    double value = 0.0;
    if (a > t_max_) {
        value = tail_Phi(a);
    } else {
        const std::size_t i = locate(a);
        const Node& n0 = nodes_[i];
        const Node& n1 = nodes_[i + 1];
        const double h = n1.t - n0.t;
        const Hermite5 b((a - n0.t) / h);
        value = b.f0 * n0.phi + b.d0 * h * n0.w + b.s0 * h * h * n0.dw + b.s1 * h * h * n1.dw +
                b.d1 * h * n1.w + b.f1 * n1.phi;
    }
    return t < 0.0 ? -value : value;
}

double KernelTable::V(double t) const noexcept {
    const double a = std::abs(t);
    if (a > t_max_) return tail_V(a);
    const std::size_t i = locate(a);
    const Node& n0 = nodes_[i];
    const Node& n1 = nodes_[i + 1];
    const double h = n1.t - n0.t;
    const Hermite5 b((a - n0.t) / h);
    return b.f0 * n0.v + b.d0 * h * n0.phi + b.s0 * h * h * n0.w + b.s1 * h * h * n1.w +
           b.d1 * h * n1.phi + b.f1 * n1.v;
}

double KernelTable::tail_W(double t) const noexcept {
    switch (tail_.kind) {
        case TailKind::exact:
            return source_.W(t);
        case TailKind::power_law:
            return tail_.coefficient * std::pow(t, -tail_.exponent);
        case TailKind::exponential:
            return tail_.w0 * std::exp(-tail_.exponent * (t - tail_.t0));
    }
    return 0.0;
}

double KernelTable::tail_Phi(double t) const noexcept {
    const double t0 = tail_.t0;
    switch (tail_.kind) {
        case TailKind::exact:
            return source_.Phi(t);
        case TailKind::power_law: {
            const double p = tail_.exponent;
            const double c = tail_.coefficient;
            if (p == 1.0) return tail_.phi0 + c * std::log(t / t0);
            return tail_.phi0 + c * (std::pow(t0, 1.0 - p) - std::pow(t, 1.0 - p)) / (p - 1.0);
        }
        case TailKind::exponential: {
            const double g = tail_.exponent;
            return tail_.phi0 - tail_.w0 * std::expm1(-g * (t - t0)) / g;
        }
    }
    return 0.0;
}

double KernelTable::tail_V(double t) const noexcept {
    const double t0 = tail_.t0;
    const double dt = t - t0;
    switch (tail_.kind) {
        case TailKind::exact:
            return source_.V(t);
        case TailKind::power_law: {
            const double p = tail_.exponent;
            const double c = tail_.coefficient;
            double extra = 0.0;
            if (p == 2.0) {
                extra = c * (dt / t0 - std::log(t / t0));
            } else if (p == 1.0) {
                extra = c * (t * std::log(t / t0) - dt);
            } else {
                extra = c / (p - 1.0) *
                        (std::pow(t0, 1.0 - p) * dt - (std::pow(t, 2.0 - p) - std::pow(t0, 2.0 - p)) / (2.0 - p));
            }
            return tail_.v0 + tail_.phi0 * dt + extra;
        }
        case TailKind::exponential: {
            const double g = tail_.exponent;
            return tail_.v0 + tail_.phi0 * dt + tail_.w0 * (dt / g + std::expm1(-g * dt) / (g * g));
        }
    }
    return 0.0;
}

KernelTable build_table(const KernelSource& source, double t_max, double tolerance) {
    return KernelTable(source, t_max, tolerance);
}

double segment_pair_integral(const KernelTable& table, double a, double b, double c, double d) {
    if (!(a < b) || !(c < d)) throw ArgumentError("segment_pair_integral: intervals must satisfy a<b, c<d");
    const double hi = table.t_max();
    for (double x : {a, b, c, d}) {
        if (x < 0.0 || x > hi) {
            std::ostringstream msg;
            msg << "segment_pair_integral: endpoint " << x << " outside tabulated range [0, " << hi << "]";
            throw RangeError(msg.str());
        }
    }
    return segment_pair_integral_unchecked(table, a, b, c, d);
}

TailFit tail_asymptote(const KernelSource& source, double t_max) {
    TailFit fit;
    if (!(t_max > 0.0)) throw ArgumentError("tail_asymptote: t_max must be positive");
    constexpr int kSamples = 41;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> ws;
    for (int i = 0; i < kSamples; ++i) {
        const double t = 0.5 * t_max * std::pow(2.0, static_cast<double>(i) / (kSamples - 1));
        const double w = source.W(t);
        if (!(w > 0.0) || !std::isfinite(w)) {
            fit.note = "kernel underflows on the fit window";
            return fit;
        }
        xs.push_back(std::log(t));
        ys.push_back(std::log(w));
        ws.push_back(w);
    }
    const double n = kSamples;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    fit.exponent = -slope;
    fit.coefficient = std::exp(intercept);
    for (int i = 0; i < kSamples; ++i) {
        const double model = fit.coefficient * std::exp(-fit.exponent * xs[i]);
        fit.max_relative_deviation = std::max(fit.max_relative_deviation, std::abs(ws[i] / model - 1.0));
    }
    if (source.is_discrete()) {
        fit.note = "discrete source decays exponentially; no power law";
        return fit;
    }
    fit.conclusive = fit.max_relative_deviation < 1e-3 && fit.exponent > 0.0;
    fit.note = fit.conclusive ? "power law" : "log-log fit not linear on the window";
    return fit;
}

std::string to_string(TailKind kind) {
    switch (kind) {
        case TailKind::exact: return "exact";
        case TailKind::power_law: return "power-law";
        case TailKind::exponential: return "exponential";
    }
    return "exact";
}

}  // namespace spinboson
