// estimate.hpp: Monte Carlo estimates with autocorrelation-aware errors

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace spinboson {

struct Estimate {
    double value{0.0};
    double error{0.0};     // standard error of value
    double tau_int{0.5};   // integrated autocorrelation time, ≥ 0.5
    double n_eff{0.0};     // samples / (2 τ_int)
    std::size_t samples{0};
    std::vector<std::string> warnings;

    double relative_error() const noexcept;
};

// Window factor for automatic windowing: stop at the first W ≥ c τ(W).
inline constexpr double kSokalWindow = 6.0;

// Mean of a correlated series; error = sd · √(2 τ_int / n).
Estimate estimate_series(std::span<const double> xs, double window = kSokalWindow);

// Independent samples given their sum and sum of squares.
Estimate estimate_iid(double sum, double sum_squares, std::size_t n);

// Equal-weight average of independent estimates of the same quantity.
Estimate combine_independent(std::span<const Estimate> parts);

// |a − b| / √(σ_a² + σ_b²); infinity when both errors vanish and a ≠ b.
double sigma_distance(double a, double sigma_a, double b, double sigma_b);

}  // namespace spinboson
