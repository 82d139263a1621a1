// estimate.cpp

#include "spinboson/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinboson/errors.hpp"

namespace spinboson {

double Estimate::relative_error() const noexcept {
    return value != 0.0 ? std::abs(error / value) : std::numeric_limits<double>::infinity();
}

Estimate estimate_series(std::span<const double> xs, double window) {
    const std::size_t n = xs.size();
    if (n < 2) throw ArgumentError("estimate_series needs at least two samples");
    Estimate out;
    out.samples = n;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    out.value = mean;

    std::vector<double> centered(xs.begin(), xs.end());
    for (double& x : centered) x -= mean;
    const auto autocov = [&](std::size_t lag) {
        double sum = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) sum += centered[i] * centered[i + lag];
        return sum / static_cast<double>(n);
    };
    const double c0 = autocov(0);
    if (c0 == 0.0) {
        out.error = 0.0;
        out.tau_int = 0.5;
        out.n_eff = static_cast<double>(n);
        return out;
    }
    double tau = 0.5;
    std::size_t lag = 1;
    const std::size_t max_lag = n / 2;
    for (; lag < max_lag; ++lag) {
        tau += autocov(lag) / c0;
        if (static_cast<double>(lag) >= window * tau) break;
    }
    if (lag >= max_lag) out.warnings.emplace_back("autocorrelation window did not close; series too short");
    out.tau_int = std::max(0.5, tau);
    const double variance = c0 * static_cast<double>(n) / static_cast<double>(n - 1);
    out.error = std::sqrt(variance * 2.0 * out.tau_int / static_cast<double>(n));
    out.n_eff = static_cast<double>(n) / (2.0 * out.tau_int);
    return out;
}

Estimate estimate_iid(double sum, double sum_squares, std::size_t n) {
    if (n < 2) throw ArgumentError("estimate_iid needs at least two samples");
    Estimate out;
    const double nn = static_cast<double>(n);
    out.samples = n;
    out.value = sum / nn;
    const double variance = std::max(0.0, (sum_squares - sum * out.value) / (nn - 1.0));
    out.error = std::sqrt(variance / nn);
    out.tau_int = 0.5;
    out.n_eff = nn;
    return out;
}

Estimate combine_independent(std::span<const Estimate> parts) {
    if (parts.empty()) throw ArgumentError("combine_independent: no estimates");
    Estimate out;
    const double k = static_cast<double>(parts.size());
    double var = 0.0;
    double tau = 0.0;
    for (const Estimate& p : parts) {
        out.value += p.value / k;
        var += p.error * p.error;
        tau += p.tau_int / k;
        out.n_eff += p.n_eff;
        out.samples += p.samples;
        out.warnings.insert(out.warnings.end(), p.warnings.begin(), p.warnings.end());
    }
    out.error = std::sqrt(var) / k;
    out.tau_int = tau;
    std::sort(out.warnings.begin(), out.warnings.end());
    out.warnings.erase(std::unique(out.warnings.begin(), out.warnings.end()), out.warnings.end());
    return out;
}

double sigma_distance(double a, double sigma_a, double b, double sigma_b) {
    const double s = std::hypot(sigma_a, sigma_b);
    if (s == 0.0) return a == b ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(a - b) / s;
}

}  // namespace spinboson
