// model.cpp: radial model data, weighted norms, discretization

#include "spinboson/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "spinboson/errors.hpp"
#include "spinboson/quadrature.hpp"

namespace spinboson {

double Dispersion::operator()(double r) const noexcept {
    switch (kind) {
        case DispersionKind::massless:
            return r;
        case DispersionKind::massive_shift:
            return r + mass;
        case DispersionKind::massive_quadrature:
            return std::sqrt(r * r + mass * mass);
    }
    return r;
}

double Dispersion::infimum() const noexcept {
    return kind == DispersionKind::massless ? 0.0 : mass;
}

double Cutoff::operator()(double r) const noexcept {
    if (kind == CutoffKind::sharp) return r <= parameter ? 1.0 : 0.0;
    return std::exp(-parameter * r * r);
}

double Cutoff::support_radius() const noexcept {
    if (kind == CutoffKind::sharp) return parameter;
    // κ² = e^{-2 c r²} drops below 1e-16 of its maximum.
    return std::sqrt(std::log(1e16) / (2.0 * parameter));
}

void ModelSpec::validate() const {
    if (dimension < 1) throw ConfigError("dimension must be a positive integer");
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("form-factor exponent alpha must lie in [0,1)");
    if (!(cutoff.parameter > 0.0) || !std::isfinite(cutoff.parameter))
        throw ConfigError("cutoff parameter must be positive and finite");
    if (!(dispersion.mass >= 0.0) || !std::isfinite(dispersion.mass))
        throw ConfigError("mass must be nonnegative and finite");
    if (dispersion.kind != DispersionKind::massless && !(dispersion.mass > 0.0))
        throw ConfigError("massive dispersion requires mass > 0");
    if (!(dimension - 2.0 * alpha > 0.0))
        throw ConfigError("form factor is not square integrable (need d - 2 alpha > 0)");
    if (!std::isfinite(lambda) || !std::isfinite(mu)) throw ConfigError("lambda and mu must be finite");
}

double ModelSpec::form_factor(double r) const noexcept {
    const double kappa = cutoff(r);
    if (alpha == 0.0) return kappa;
    if (kappa == 0.0) return 0.0;
    return kappa * std::pow(r, -alpha);
}

namespace {

double euclidean_norm(std::span<const double> k) noexcept {
    double s = 0.0;
    for (double x : k) s += x * x;
    return std::sqrt(s);
}

}  // namespace

double ModelSpec::omega_at(std::span<const double> k) const noexcept {
    return omega(euclidean_norm(k));
}

double ModelSpec::form_factor_at(std::span<const double> k) const noexcept {
    return form_factor(euclidean_norm(k));
}

double sphere_area(int dimension) {
    const double d = dimension;
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double radial_integral(const ModelSpec& spec, const std::function<double(double)>& g,
                       double extra_power, double scale, double rel_tol) {
    const double radius = spec.support_radius();
    const double p = spec.dimension - 1.0 - 2.0 * spec.alpha + extra_power;
    if (!(p > -1.0)) throw ArgumentError("radial_integral: integrand not integrable at the origin");

    int levels = 2;
    if (scale > 0.0 && scale < radius) {
        levels = static_cast<int>(std::ceil(std::log2(radius / scale))) + 3;
    }
    levels = std::clamp(levels, 1, 60);

    // For p < 0 substitute r = R u^{1/(p+1)}, which absorbs r^p dr into du.
    const bool substitute = p < 0.0;
    const double k = substitute ? 1.0 / (p + 1.0) : 1.0;

    std::vector<double> breaks;
    breaks.reserve(levels + 2);
    breaks.push_back(0.0);
    for (int j = levels; j >= 1; --j) {
        const double frac = std::ldexp(1.0, -j);
        breaks.push_back(substitute ? std::pow(frac, p + 1.0) : frac * radius);
    }
    breaks.push_back(substitute ? 1.0 : radius);

    quad::Result res;
    if (substitute) {
        auto f = [&](double u) {
            const double r = radius * std::pow(u, k);
            const double kappa = spec.cutoff(r);
            return kappa * kappa * g(r);
        };
        res = quad::integrate_pieces(f, breaks, rel_tol);
        res.value *= std::pow(radius, p + 1.0) * k;
    } else {
        auto f = [&](double r) {
            const double kappa = spec.cutoff(r);
            return (p == 0.0 ? 1.0 : std::pow(r, p)) * kappa * kappa * g(r);
        };
        res = quad::integrate_pieces(f, breaks, rel_tol);
    }
    return sphere_area(spec.dimension) * res.value;
}

double radial_integral_from(const ModelSpec& spec, double inner_radius,
                            const std::function<double(double)>& g, double extra_power,
                            double rel_tol) {
    const double radius = spec.support_radius();
    if (!(inner_radius > 0.0)) throw ArgumentError("radial_integral_from: inner radius must be positive");
    if (inner_radius >= radius) return 0.0;
    const double p = spec.dimension - 1.0 - 2.0 * spec.alpha + extra_power;
    std::vector<double> breaks{inner_radius};
    while (breaks.back() * 2.0 < radius) breaks.push_back(breaks.back() * 2.0);
    breaks.push_back(radius);
    auto f = [&](double r) {
        const double kappa = spec.cutoff(r);
        return std::pow(r, p) * kappa * kappa * g(r);
    };
    return sphere_area(spec.dimension) * quad::integrate_pieces(f, breaks, rel_tol).value;
}

bool weighted_norm_diverges(const ModelSpec& spec, double s) {
    // Massless: integrand ~ r^{d-1-2s-2α} near 0.
    return spec.dispersion.kind == DispersionKind::massless &&
           spec.dimension - 2.0 * s - 2.0 * spec.alpha <= 0.0;
}

double weighted_norm_squared(const ModelSpec& spec, double s) {
    spec.validate();
    if (!(s >= 0.0)) throw ArgumentError("weighted_norm: exponent must be nonnegative");
    if (weighted_norm_diverges(spec, s)) return std::numeric_limits<double>::infinity();
    if (spec.dispersion.kind == DispersionKind::massless) {
        return radial_integral(spec, [](double) { return 1.0; }, -2.0 * s);
    }
    const Dispersion w = spec.dispersion;
    return radial_integral(spec, [w, s](double r) { return std::pow(w(r), -2.0 * s); });
}

double weighted_norm(const ModelSpec& spec, double s) {
    return std::sqrt(weighted_norm_squared(spec, s));
}

double weighted_norm_squared_partial(const ModelSpec& spec, double s, double inner_radius) {
    spec.validate();
    const Dispersion w = spec.dispersion;
    return radial_integral_from(spec, inner_radius,
                                [w, s](double r) { return std::pow(w(r), -2.0 * s); });
}

IrClass ir_classify(const ModelSpec& spec) {
    return std::isfinite(weighted_norm(spec, 1.0)) ? IrClass::infrared_regular
                                                   : IrClass::infrared_critical;
}

double critical_coupling(const ModelSpec& spec) {
    const double norm = weighted_norm(spec, 0.5);
    if (!std::isfinite(norm)) throw ModelClassError("v is not in D(omega^{-1/2})");
    return 1.0 / (norm * std::sqrt(5.0));
}

ModelSpec regularize_mass(const ModelSpec& spec, double mass, MassScheme scheme) {
    if (!(mass > 0.0) || !std::isfinite(mass)) throw ArgumentError("regularize_mass: mass must be positive");
    ModelSpec out = spec;
    const DispersionKind target = scheme == MassScheme::shift ? DispersionKind::massive_shift
                                                              : DispersionKind::massive_quadrature;
    switch (spec.dispersion.kind) {
        case DispersionKind::massless:
            out.dispersion = {target, mass};
            break;
        case DispersionKind::massive_shift:
            if (scheme != MassScheme::shift)
                throw ArgumentError("regularize_mass: cannot apply quadrature mass to a shifted dispersion");
            out.dispersion.mass = spec.dispersion.mass + mass;
            break;
        case DispersionKind::massive_quadrature:
            if (scheme != MassScheme::quadrature)
                throw ArgumentError("regularize_mass: cannot apply shift mass to a quadrature dispersion");
            out.dispersion.mass = std::hypot(spec.dispersion.mass, mass);
            break;
    }
    return out;
}

double DiscreteModes::min_omega() const {
    if (omega.empty()) throw ArgumentError("DiscreteModes: no modes");
    return *std::min_element(omega.begin(), omega.end());
}

double DiscreteModes::max_omega() const {
    if (omega.empty()) throw ArgumentError("DiscreteModes: no modes");
    return *std::max_element(omega.begin(), omega.end());
}

double DiscreteModes::sum(const std::function<double(double)>& g) const {
    double total = 0.0;
    for (std::size_t j = 0; j < size(); ++j) total += v[j] * v[j] * g(omega[j]);
    return total;
}

DiscreteModes DiscreteModes::manual(std::vector<double> omega, std::vector<double> v) {
    if (omega.empty() || omega.size() != v.size())
        throw ArgumentError("manual modes: omega and v must be nonempty and of equal length");
    for (std::size_t j = 0; j < omega.size(); ++j) {
        if (!(omega[j] > 0.0) || !std::isfinite(omega[j]))
            throw ArgumentError("manual modes: every omega must be positive");
        if (!(v[j] >= 0.0) || !std::isfinite(v[j]))
            throw ArgumentError("manual modes: every coupling must be nonnegative");
    }
    DiscreteModes m;
    m.omega = std::move(omega);
    m.v = std::move(v);
    m.scheme = DiscretizationScheme::manual;
    return m;
}

DiscreteModes discretize(const ModelSpec& spec, std::size_t n_modes, DiscretizationScheme scheme) {
    spec.validate();
    if (n_modes == 0) throw ArgumentError("discretize: need at least one mode");
    if (!(spec.dispersion.infimum() > 0.0))
        throw PreconditionError("discretize: massless dispersion must be mass-regularized first");
    if (scheme == DiscretizationScheme::manual)
        throw ArgumentError("discretize: use DiscreteModes::manual for hand-built modes");

    const double radius = spec.support_radius();
    std::vector<double> nodes(n_modes);
    std::vector<double> weights(n_modes);
    const double n = static_cast<double>(n_modes);
    switch (scheme) {
        case DiscretizationScheme::uniform_radial:
            for (std::size_t j = 0; j < n_modes; ++j) {
                nodes[j] = (j + 0.5) * radius / n;
                weights[j] = radius / n;
            }
            break;
        case DiscretizationScheme::log_radial: {
            // Midpoints in log r between R·kLogRadialInnerFraction and R.
            const double lo = std::log(radius * kLogRadialInnerFraction);
            const double du = (std::log(radius) - lo) / n;
            for (std::size_t j = 0; j < n_modes; ++j) {
                nodes[j] = std::exp(lo + (j + 0.5) * du);
                weights[j] = nodes[j] * du;
            }
            break;
        }
        case DiscretizationScheme::gauss_legendre: {
            const quad::Rule rule = quad::gauss_legendre(n_modes, 0.0, radius);
            nodes = rule.nodes;
            weights = rule.weights;
            break;
        }
        case DiscretizationScheme::manual:
            break;
    }

    const double area = sphere_area(spec.dimension);
    DiscreteModes modes;
    modes.scheme = scheme;
    modes.parent = spec;
    modes.omega.resize(n_modes);
    modes.v.resize(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j) {
        const double r = nodes[j];
        modes.omega[j] = spec.omega(r);
        const double surface = area * std::pow(r, spec.dimension - 1.0);
        modes.v[j] = std::abs(spec.form_factor(r)) * std::sqrt(weights[j] * surface);
    }
    return modes;
}

void write_modes_csv(const DiscreteModes& modes, std::ostream& os) {
    os << "mode,omega,v\n";
    const auto old = os.precision(17);
    for (std::size_t j = 0; j < modes.size(); ++j) {
        os << j << ',' << modes.omega[j] << ',' << modes.v[j] << '\n';
    }
    os.precision(old);
}

std::string to_string(DispersionKind kind) {
    switch (kind) {
        case DispersionKind::massless: return "massless";
        case DispersionKind::massive_shift: return "massive-shift";
        case DispersionKind::massive_quadrature: return "massive-quadrature";
    }
    return "massless";
}

std::string to_string(CutoffKind kind) {
    return kind == CutoffKind::sharp ? "sharp" : "gaussian";
}

std::string to_string(IrClass c) {
    return c == IrClass::infrared_regular ? "infrared-regular" : "infrared-critical";
}

std::string to_string(MassScheme s) {
    return s == MassScheme::shift ? "shift" : "quadrature";
}

std::string to_string(DiscretizationScheme s) {
    switch (s) {
        case DiscretizationScheme::uniform_radial: return "uniform-radial";
        case DiscretizationScheme::log_radial: return "log-radial";
        case DiscretizationScheme::gauss_legendre: return "gauss-legendre";
        case DiscretizationScheme::manual: return "manual";
    }
    return "manual";
}

DispersionKind parse_dispersion(const std::string& s) {
    if (s == "massless") return DispersionKind::massless;
    if (s == "massive-shift") return DispersionKind::massive_shift;
    if (s == "massive-quadrature") return DispersionKind::massive_quadrature;
    throw ConfigError("unknown dispersion '" + s + "'");
}

CutoffKind parse_cutoff(const std::string& s) {
    if (s == "sharp") return CutoffKind::sharp;
    if (s == "gaussian") return CutoffKind::gaussian;
    throw ConfigError("unknown cutoff '" + s + "'");
}

MassScheme parse_mass_scheme(const std::string& s) {
    if (s == "shift") return MassScheme::shift;
    if (s == "quadrature") return MassScheme::quadrature;
    throw ConfigError("unknown mass scheme '" + s + "'");
}

DiscretizationScheme parse_discretization(const std::string& s) {
    if (s == "uniform-radial") return DiscretizationScheme::uniform_radial;
    if (s == "log-radial") return DiscretizationScheme::log_radial;
    if (s == "gauss-legendre") return DiscretizationScheme::gauss_legendre;
    if (s == "manual") return DiscretizationScheme::manual;
    throw ConfigError("unknown discretization scheme '" + s + "'");
}

}  // namespace spinboson
