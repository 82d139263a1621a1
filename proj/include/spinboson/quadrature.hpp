// quadrature.hpp: one-dimensional quadrature helpers
//
// Adaptive integration is delegated to Boost.Math (tanh-sinh, which copes
// with integrable endpoint singularities). Gauss-Legendre rules of arbitrary
// order are generated here because Boost only provides compile-time orders.

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace spinboson::quad {

using Integrand = std::function<double(double)>;

struct Result {
    double value{0.0};
    double error{0.0};
};

// Adaptive tanh-sinh quadrature on a finite interval [a, b].
Result integrate(const Integrand& f, double a, double b, double rel_tol = 1e-12);

// Same, but sums adaptive integrals over consecutive breakpoints
// (breakpoints must be increasing; the first and last are the limits).
Result integrate_pieces(const Integrand& f, const std::vector<double>& breakpoints,
                        double rel_tol = 1e-12);

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [-1, 1], nodes ascending.
Rule gauss_legendre(std::size_t n);

// Rule mapped onto [a, b].
Rule gauss_legendre(std::size_t n, double a, double b);

}  // namespace spinboson::quad
