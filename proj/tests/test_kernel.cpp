#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spinboson/errors.hpp"
#include "spinboson/kernel.hpp"

using namespace spinboson;
using std::numbers::pi;

namespace {

ModelSpec physical(double cutoff = 1.0) {
    ModelSpec s;
    s.alpha = 0.5;
    s.cutoff.parameter = cutoff;
    return s;
}

// π ∫_0^Λ r e^{-tr} dr.
double closed_form(double t, double cutoff = 1.0) {
    const double x = t * cutoff;
    return pi * (-std::expm1(-x) - x * std::exp(-x)) / (t * t);
}

}  // namespace

TEST_CASE("direct kernel values") {
    const KernelSource src(physical());
    CHECK(src.W(1.0) == doctest::Approx(pi * (1 - 2 * std::exp(-1.0))).epsilon(1e-10));
    CHECK(src.W(1e-9) == doctest::Approx(pi / 2).epsilon(1e-8));
    CHECK(src.W(0.0) == doctest::Approx(pi / 2).epsilon(1e-12));
    CHECK(src.W(-2.5) == src.W(2.5));
    for (double t : {0.01, 0.3, 2.0, 7.0, 30.0}) CHECK(src.W(t) == doctest::Approx(closed_form(t)).epsilon(1e-9));
    const KernelSource single(DiscreteModes::manual({1.0}, {2.0}));
    CHECK(single.W(3.0) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
}

TEST_CASE("antiderivatives") {
    const KernelSource src(DiscreteModes::manual({2.0}, {2.0}));  // W = e^{-2|t|}
    const double t = 0.8;
    CHECK(src.Phi(t) == doctest::Approx((1 - std::exp(-2 * t)) / 2).epsilon(1e-13));
    CHECK(src.V(t) == doctest::Approx(t / 2 - (1 - std::exp(-2 * t)) / 4).epsilon(1e-13));
    CHECK(src.Phi(-t) == -src.Phi(t));
    CHECK(src.V(-t) == src.V(t));
}

TEST_CASE("l1 norm") {
    CHECK(l1_norm(KernelSource(physical())).value() == doctest::Approx(2 * pi).epsilon(1e-10));
    const L1Norm single = l1_norm(KernelSource(DiscreteModes::manual({2.0}, {1.0})));
    CHECK(single.fubini == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(single.time_quadrature == doctest::Approx(0.25).epsilon(1e-9));
    const double base = l1_norm(KernelSource(DiscreteModes::manual({0.5, 2.0}, {1.0, 0.3}))).value();
    const double doubled = l1_norm(KernelSource(DiscreteModes::manual({0.5, 2.0}, {2.0, 0.6}))).value();
    CHECK(doubled == doctest::Approx(4 * base).epsilon(1e-14));
}

TEST_CASE("kernel table accuracy and shape") {
    const double tol = 1e-9;
    const KernelTable table = build_table(KernelSource(physical()), 50.0, tol);
    CHECK(table.W(0.37) == doctest::Approx(closed_form(0.37)).epsilon(1e-8));
    for (int i = 1; i < 200; ++i) {
        const double t = 50.0 * i / 200.0 * (1 - 0.003 * (i % 7));
        CHECK(std::abs(table.W(t) - closed_form(t)) <= 1e-8 * std::max(pi / 2, closed_form(t)));
    }
    CHECK(table.Phi(table.t_max()) <= pi + tol);  // half of ‖W‖₁ = 2π

    const auto& nodes = table.nodes();
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        const double h1 = nodes[i].t - nodes[i - 1].t;
        const double h2 = nodes[i + 1].t - nodes[i].t;
        const double second = ((nodes[i + 1].v - nodes[i].v) / h2 - (nodes[i].v - nodes[i - 1].v) / h1);
        CHECK(second >= -tol);
    }
}

TEST_CASE("table interpolation is exact for cubic antiderivatives") {
    // The Hermite data use exact derivatives; a two-exponential kernel probes
    // the table against its own direct evaluation.
    const KernelSource src(DiscreteModes::manual({0.5, 3.0}, {1.0, 2.0}));
    const KernelTable table = build_table(src, 20.0, 1e-10);
    for (double t : {0.0, 0.013, 0.5, 1.7, 9.99, 19.5})
        CHECK(std::abs(table.V(t) - src.V(t)) <= 1e-10 * std::max(1.0, src.V(t)));
    CHECK(table.max_probe_error() <= 1e-10);
}

TEST_CASE("segment pair integral") {
    const KernelTable single = build_table(KernelSource(DiscreteModes::manual({2.0}, {2.0})), 5.0);
    CHECK(segment_pair_integral(single, 0, 1, 0, 1) ==
          doctest::Approx(1 - (1 - std::exp(-2.0)) / 2).epsilon(1e-9));
    CHECK(segment_pair_integral(single, 0.2, 1.3, 2.0, 4.1) == segment_pair_integral(single, 2.0, 4.1, 0.2, 1.3));
    CHECK_THROWS_AS(segment_pair_integral(single, 0, 6, 0, 1), RangeError);
    CHECK_THROWS_AS(segment_pair_integral(single, 1, 1, 0, 1), ArgumentError);

    const KernelTable far = build_table(KernelSource(physical()), 101.0);
    const double value = segment_pair_integral(far, 0, 1, 100, 101);
    CHECK(value > 0);
    CHECK(value <= closed_form(99.0));
}

TEST_CASE("tail asymptote") {
    const KernelSource src(physical());
    CHECK(std::abs(2500 * src.W(50.0) - pi) < 1e-6);
    const TailFit fit = tail_asymptote(src, 50.0);
    CHECK(fit.conclusive);
    CHECK(fit.exponent == doctest::Approx(2.0).epsilon(1e-2));
    const TailFit wide = tail_asymptote(KernelSource(physical(3.0)), 50.0);
    CHECK(wide.coefficient == doctest::Approx(pi).epsilon(1e-2));
    CHECK_FALSE(tail_asymptote(KernelSource(DiscreteModes::manual({1.0}, {1.0})), 50.0).conclusive);
}
