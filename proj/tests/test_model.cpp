#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "spinboson/errors.hpp"
#include "spinboson/model.hpp"

using namespace spinboson;
using std::numbers::pi;

namespace {

ModelSpec massless(double alpha, double cutoff = 1.0) {
    ModelSpec s;
    s.dimension = 3;
    s.alpha = alpha;
    s.cutoff.parameter = cutoff;
    return s;
}

}  // namespace

TEST_CASE("weighted norms of the massless three-dimensional model") {
    // 4π ∫_0^Λ r^{2-2α-2s} dr in closed form.
    CHECK(weighted_norm_squared(massless(0.5), 0.5) == doctest::Approx(4 * pi).epsilon(1e-10));
    CHECK(std::isinf(weighted_norm(massless(0.5), 1.0)));
    CHECK(weighted_norm_diverges(massless(0.5), 1.0));
    CHECK(weighted_norm_squared(massless(0.4), 1.0) == doctest::Approx(20 * pi).epsilon(1e-10));
    CHECK(weighted_norm_squared(massless(0.5), 0.0) == doctest::Approx(2 * pi).epsilon(1e-10));
}

TEST_CASE("infrared classification") {
    CHECK(ir_classify(massless(0.4)) == IrClass::infrared_regular);
    CHECK(ir_classify(massless(0.5)) == IrClass::infrared_critical);
    ModelSpec m = massless(0.5);
    m.dispersion = {DispersionKind::massive_shift, 0.1};
    CHECK(ir_classify(m) == IrClass::infrared_regular);
}

TEST_CASE("critical coupling") {
    CHECK(critical_coupling(massless(0.5)) == doctest::Approx(1 / std::sqrt(20 * pi)).epsilon(1e-10));
    CHECK(critical_coupling(massless(0.5, 2.0)) == doctest::Approx(1 / std::sqrt(40 * pi)).epsilon(1e-10));
    const ModelSpec s = massless(0.37);
    CHECK(critical_coupling(s) == critical_coupling(s));
    ModelSpec bad = massless(0.5);
    bad.dimension = 2;  // v square integrable, ω^{-1/2}v not
    CHECK_THROWS_AS(critical_coupling(bad), ModelClassError);
}

TEST_CASE("mass regularization") {
    const ModelSpec shifted = regularize_mass(massless(0.5), 0.5, MassScheme::shift);
    CHECK(shifted.omega(1.0) == doctest::Approx(1.5));
    CHECK(shifted.dispersion.infimum() == doctest::Approx(0.5));
    const ModelSpec quad = regularize_mass(massless(0.5), 0.5, MassScheme::quadrature);
    CHECK(quad.omega(0.0) == doctest::Approx(0.5));
    CHECK(quad.omega(1.0) == doctest::Approx(std::sqrt(1.25)));
    CHECK_THROWS_AS(regularize_mass(shifted, 0.1, MassScheme::quadrature), Error);
    CHECK_THROWS(regularize_mass(massless(0.5), -1.0, MassScheme::shift));
}

TEST_CASE("decreasing mass lowers the smallest discrete frequency") {
    for (MassScheme scheme : {MassScheme::shift, MassScheme::quadrature}) {
        double previous = INFINITY;
        for (int n = 1; n <= 6; ++n) {
            const ModelSpec s = regularize_mass(massless(0.5), std::ldexp(1.0, -n), scheme);
            const double lowest = discretize(s, 16, DiscretizationScheme::uniform_radial).min_omega();
            CHECK(lowest < previous);
            previous = lowest;
        }
    }
}

TEST_CASE("discretization reproduces continuum norms") {
    const ModelSpec s = regularize_mass(massless(0.5), 0.2, MassScheme::shift);
    const DiscreteModes modes = discretize(s, 32, DiscretizationScheme::gauss_legendre);
    CHECK(modes.size() == 32);
    const double exact = weighted_norm_squared(s, 0.5);
    CHECK(std::abs(modes.sum([](double w) { return 1 / w; }) - exact) <= 5e-3 * exact);

    // The uniform radial rule: the error in Σ v_j²/ω_j must shrink as modes double.
    const double l2 = exact;
    double previous = INFINITY;
    for (std::size_t n : {8, 16, 32, 64}) {
        const DiscreteModes m = discretize(s, n, DiscretizationScheme::uniform_radial);
        const double err = std::abs(m.sum([](double w) { return 1 / w; }) - l2);
        CHECK(err < previous);
        previous = err;
    }
}

TEST_CASE("manual single mode passthrough") {
    const DiscreteModes m = DiscreteModes::manual({1.0}, {1.0});
    CHECK(m.size() == 1);
    CHECK(m.scheme == DiscretizationScheme::manual);
    CHECK(m.min_omega() == 1.0);
    CHECK_THROWS(DiscreteModes::manual({1.0, 2.0}, {1.0}));
}

TEST_CASE("log-radial grid covers the support and writes CSV") {
    const ModelSpec s = regularize_mass(massless(0.5), 1e-3, MassScheme::shift);
    const DiscreteModes m = discretize(s, 24, DiscretizationScheme::log_radial);
    CHECK(m.min_omega() < 0.01);
    CHECK(m.max_omega() <= 1.0 + 1e-3 + 1e-12);
    std::ostringstream os;
    write_modes_csv(m, os);
    CHECK(os.str().rfind("mode,omega,v\n", 0) == 0);
}

TEST_CASE("validation rejects bad specs") {
    ModelSpec s = massless(1.2);
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = massless(0.5);
    s.cutoff.parameter = 0.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK_THROWS_AS(discretize(massless(0.5), 8, DiscretizationScheme::gauss_legendre), Error);
}

TEST_CASE("enum round trips") {
    for (auto k : {DiscretizationScheme::uniform_radial, DiscretizationScheme::log_radial,
                   DiscretizationScheme::gauss_legendre})
        CHECK(parse_discretization(to_string(k)) == k);
    for (auto k : {MassScheme::shift, MassScheme::quadrature}) CHECK(parse_mass_scheme(to_string(k)) == k);
    CHECK_THROWS_AS(parse_cutoff("bogus"), ConfigError);
}
