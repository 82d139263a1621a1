// quadrature.cpp: tanh-sinh wrappers and Gauss-Legendre rules

#include "spinboson/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

#include "spinboson/errors.hpp"

namespace spinboson::quad {

namespace {

boost::math::quadrature::tanh_sinh<double>& integrator() {
    // Constructing the abscissa tables is expensive; one per thread.
    thread_local boost::math::quadrature::tanh_sinh<double> instance(15);
    return instance;
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, double rel_tol) {
    if (!(b > a)) return {0.0, 0.0};
    double error = 0.0;
    double l1 = 0.0;
    const double value = integrator().integrate(f, a, b, rel_tol, &error, &l1);
    return {value, error * l1};
}

Result integrate_pieces(const Integrand& f, const std::vector<double>& breakpoints,
                        double rel_tol) {
    Result total;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const Result piece = integrate(f, breakpoints[i], breakpoints[i + 1], rel_tol);
        total.value += piece.value;
        total.error += piece.error;
    }
    return total;
}

Rule gauss_legendre(std::size_t n) {
    if (n == 0) throw ArgumentError("gauss_legendre: need at least one node");
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute derivative at the converged node for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[n - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

Rule gauss_legendre(std::size_t n, double a, double b) {
    Rule rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

}  // namespace spinboson::quad
