#include <doctest.h>

#include <cmath>
#include <vector>

#include "spinboson/estimate.hpp"
#include "spinboson/parallel.hpp"
#include "spinboson/rng.hpp"

using namespace spinboson;

TEST_CASE("Philox4x32-10 known answers") {
    // Published Random123 test vectors.
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxBlock{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({~0U, ~0U, ~0U, ~0U}, {~0U, ~0U}) ==
          PhiloxBlock{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          PhiloxBlock{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    Philox a(7, stream_id(StreamKind::chain, 3));
    Philox b(7, stream_id(StreamKind::chain, 3));
    Philox c(7, stream_id(StreamKind::chain, 4));
    int same = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        same += x == c() ? 1 : 0;
    }
    CHECK(same == 0);
    CHECK(stream_id(StreamKind::partition_block, 5) != stream_id(StreamKind::chain, 5));
}

TEST_CASE("uniform and exponential moments") {
    Philox rng(11, 0);
    const int n = 200000;
    double su = 0, se = 0, min_u = 1, max_u = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        su += u;
        min_u = std::min(min_u, u);
        max_u = std::max(max_u, u);
        se += rng.exponential();
    }
    CHECK(min_u > 0.0);
    CHECK(max_u < 1.0);
    CHECK(std::abs(su / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
    CHECK(std::abs(se / n - 1.0) < 4 * std::sqrt(1.0 / n));
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
    for (int k : counts) CHECK(std::abs(k - 10000) < 500);
}

TEST_CASE("iid estimate") {
    const Estimate e = estimate_iid(10.0, 30.0, 4);  // samples with mean 2.5, E[x²] 7.5
    CHECK(e.value == doctest::Approx(2.5));
    CHECK(e.error == doctest::Approx(std::sqrt((7.5 - 6.25) * 4.0 / 3.0 / 4.0)));
    CHECK(e.tau_int == 0.5);
    const Estimate constant = estimate_iid(4.0, 4.0, 4);
    CHECK(constant.error == 0.0);
}

TEST_CASE("autocorrelation of an AR(1) series") {
    // x_{k+1} = ρ x_k + noise has τ_int = (1 + ρ) / (2(1 − ρ)).
    const double rho = 0.8;
    Philox rng(5, 0);
    std::vector<double> xs(400000);
    double x = 0;
    for (double& v : xs) {
        const double g = std::sqrt(-2 * std::log(rng.uniform())) * std::cos(2 * M_PI * rng.uniform());
        x = rho * x + g;
        v = x;
    }
    const Estimate e = estimate_series(xs);
    const double tau = (1 + rho) / (2 * (1 - rho));
    CHECK(e.tau_int == doctest::Approx(tau).epsilon(0.1));
    CHECK(e.n_eff == doctest::Approx(xs.size() / (2 * e.tau_int)));
    CHECK(std::abs(e.value) < 4 * e.error);
}

TEST_CASE("combining independent estimates") {
    Estimate a, b;
    a.value = 1.0;
    a.error = 0.3;
    a.samples = 10;
    b.value = 2.0;
    b.error = 0.4;
    b.samples = 10;
    const std::vector<Estimate> parts{a, b};
    const Estimate c = combine_independent(parts);
    CHECK(c.value == doctest::Approx(1.5));
    CHECK(c.error == doctest::Approx(0.25));
    CHECK(c.samples == 20);
    CHECK(sigma_distance(1.0, 0.3, 1.0 + 1.5, 0.4) == doctest::Approx(3.0));
    CHECK(std::isinf(sigma_distance(1.0, 0.0, 2.0, 0.0)));
}

TEST_CASE("parallel_for fills every index and propagates errors") {
    std::vector<int> out(1000, 0);
    parallel_for(out.size(), 3, [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) * 2);
    CHECK_THROWS(parallel_for(10, 2, [](std::size_t i) {
        if (i == 7) throw std::runtime_error("boom");
    }));
}
