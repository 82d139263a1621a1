#include <doctest.h>

#include <cmath>
#include <numeric>

#include "spinboson/errors.hpp"
#include "spinboson/fock.hpp"
#include "spinboson/ising_mc.hpp"

using namespace spinboson;

namespace {

const DiscreteModes kSingle = DiscreteModes::manual({1.0}, {1.0});

// W = e^{-2|t|}.
KernelTable exp_table(double t_max) { return build_table(KernelSource(DiscreteModes::manual({2.0}, {2.0})), t_max); }

KernelTable single_table(double t_max) { return build_table(KernelSource(kSingle), t_max); }

McConfig small_config(double horizon) {
    McConfig cfg;
    cfg.horizon = horizon;
    cfg.samples = 40000;
    cfg.sweeps = 20000;
    cfg.chains = 2;
    cfg.threads = 1;
    cfg.seed = 1234;
    return cfg;
}

double ed_partition(const DiscreteModes& modes, int cap, double lambda, double mu, double t) {
    const FockBasis b = build_basis(modes, cap, cap);
    return std::exp(-t) * semigroup_amplitude(hamiltonian(b, modes, lambda, mu), b, t);
}

}  // namespace

TEST_CASE("field convention names") {
    CHECK(coupling_factor(FieldConvention::standard) == 2.0);
    CHECK(coupling_factor(FieldConvention::symmetrized) == 1.0);
    CHECK(parse_field_convention(to_string(FieldConvention::symmetrized)) == FieldConvention::symmetrized);
    CHECK_THROWS_AS(parse_field_convention("other"), ConfigError);
}

TEST_CASE("spin paths") {
    SpinPath p{4.0, -1, {}};
    CHECK(magnetization(p) == -4.0);
    p.jumps = {2.0};
    CHECK(magnetization(p) == 0.0);
    CHECK(p.spin_at(1.0) == -1);
    CHECK(p.spin_at(3.0) == 1);
    CHECK(p.final_spin() == 1);
    p.jumps = {0.5, 1.25, 3.0};
    SpinPath flipped = p;
    flipped.initial_spin = 1;
    CHECK(magnetization(flipped) == -magnetization(p));
    p.jumps = {2.0, 1.0};
    CHECK_THROWS_AS(p.validate(), ArgumentError);
    p.jumps = {4.0};
    CHECK_THROWS_AS(p.validate(), ArgumentError);
}

TEST_CASE("action values") {
    const KernelTable table = exp_table(3.0);
    const SpinPath constant{1.0, 1, {}};
    CHECK(action(constant, 0.5, 0.0, table, FieldConvention::symmetrized) ==
          doctest::Approx(0.25 * (1 - (1 - std::exp(-2.0)) / 2)).epsilon(1e-9));
    CHECK(action(constant, 0.5, 0.0, table) ==
          doctest::Approx(0.5 * (1 - (1 - std::exp(-2.0)) / 2)).epsilon(1e-9));
    const SpinPath up{2.0, 1, {}};
    CHECK(action(up, 0.0, 0.3, table) == doctest::Approx(-0.6));
    Philox rng(3, 0);
    for (int i = 0; i < 20; ++i) CHECK(action(sample_free_path(2.5, rng), 0.0, 0.0, table) == 0.0);
    CHECK_THROWS_AS(interaction_integral(SpinPath{5.0, 1, {}}, table), RangeError);
}

TEST_CASE("interaction integral matches a fine Riemann sum") {
    const KernelTable table = single_table(3.0);
    const SpinPath p{3.0, 1, {0.4, 1.1, 2.3}};
    const int n = 1500;
    const double h = 3.0 / n;
    double sum = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double t = (i + 0.5) * h, s = (j + 0.5) * h;
            sum += 0.25 * std::exp(-std::abs(t - s)) * p.spin_at(t) * p.spin_at(s);
        }
    CHECK(interaction_integral(p, table) == doctest::Approx(sum * h * h).epsilon(1e-4));
}

TEST_CASE("free process statistics") {
    Philox rng(42, 0);
    const int n = 100000;
    int same = 0;
    double jumps = 0, corr = 0;
    for (int i = 0; i < n; ++i) {
        const SpinPath p1 = sample_free_path(1.0, rng);
        same += p1.final_spin() == p1.initial_spin ? 1 : 0;
        const SpinPath p3 = sample_free_path(3.0, rng);
        jumps += static_cast<double>(p3.jumps.size());
        corr += p3.spin_at(1.0) * p3.spin_at(1.5);
    }
    const double p_same = (1 + std::exp(-2.0)) / 2;
    CHECK(std::abs(same / double(n) - p_same) < 3 * std::sqrt(p_same * (1 - p_same) / n));
    CHECK(std::abs(jumps / n - 3.0) < 3 * std::sqrt(3.0 / n));
    const double c = std::exp(-1.0);
    CHECK(std::abs(corr / n - c) < 3 * std::sqrt((1 - c * c) / n));
}

TEST_CASE("partition function against closed forms") {
    const KernelTable table = single_table(10.0);
    McConfig cfg = small_config(5.0);
    const Estimate free = estimate_partition(0.0, 0.0, table, cfg);
    CHECK(free.value == 1.0);
    CHECK(free.error == 0.0);
    CHECK(estimate_energy(0.0, 0.0, table, cfg).value == -1.0);

    const double nu = 1.25;
    const double exact = std::exp(-5.0) * (std::cosh(5 * nu) + std::sinh(5 * nu) / nu);
    const Estimate z = estimate_partition(0.0, 0.75, table, cfg);
    CHECK(sigma_distance(z.value, z.error, exact, 0.0) < 3.0);

    const Estimate coupled = estimate_partition(0.2, 0.0, table, cfg);
    CHECK(coupled.relative_error() <= 0.01);
    CHECK(sigma_distance(coupled.value, coupled.error, ed_partition(kSingle, 20, 0.2, 0.0, 5.0), 0.0) < 3.0);
}

TEST_CASE("energy from long horizons") {
    const KernelTable table = single_table(20.0);
    McConfig cfg = small_config(20.0);
    cfg.samples = 200000;
    const Estimate e = estimate_energy(0.0, 0.75, table, cfg);
    const double bias = std::log(2.0) / 20.0;  // overlap of Ω↓ with the ground state
    CHECK(std::abs(e.value + 1.25) < 3 * e.error + bias);
}

TEST_CASE("partition runs are reproducible across thread counts") {
    const KernelTable table = single_table(5.0);
    McConfig cfg = small_config(3.0);
    cfg.samples = 20000;
    cfg.block_size = 1000;
    cfg.threads = 1;
    const Estimate a = estimate_partition(0.3, 0.2, table, cfg);
    cfg.threads = 3;
    const Estimate b = estimate_partition(0.3, 0.2, table, cfg);
    CHECK(a.value == b.value);
    CHECK(a.error == b.error);
    cfg.seed += 1;
    CHECK(estimate_partition(0.3, 0.2, table, cfg).value != a.value);
}

TEST_CASE("MCMC observables of the free measure") {
    const KernelTable table = single_table(10.0);
    McConfig cfg = small_config(10.0);
    const McmcResult r = mcmc_run({[](const SpinPath& p) { return magnetization(p); },
                                   [](const SpinPath& p) { return magnetization(p) * magnetization(p); }},
                                  0.0, 0.0, table, cfg);
    CHECK(std::abs(r.estimates[0].value) < 3 * r.estimates[0].error);
    const double m2 = 10 - (1 - std::exp(-20.0)) / 2;
    CHECK(sigma_distance(r.estimates[1].value, r.estimates[1].error, m2, 0.0) < 3.0);
    CHECK(r.acceptance_rate > kMinAcceptance);
    CHECK(r.mean_jumps == doctest::Approx(10.0).epsilon(0.05));

    const Estimate m = mcmc_expectation([](const SpinPath& p) { return magnetization(p); }, 0.2, 0.0,
                                        single_table(10.0), cfg);
    CHECK(std::abs(m.value) < 3 * m.error);
}

TEST_CASE("free susceptibility") {
    const KernelTable table = single_table(10.0);
    const Estimate chi = estimate_susceptibility(0.0, table, small_config(10.0));
    CHECK(sigma_distance(chi.value, chi.error, 1 - (1 - std::exp(-20.0)) / 20, 0.0) < 3.0);
}

TEST_CASE("MCMC jump-count distribution matches the brute-force sectors") {
    // Detailed balance check: the stationary law of the jump count equals the
    // normalized sector weights of the exact path integral.
    struct Case {
        double lambda, mu, horizon;
    };
    for (const Case c : {Case{0.3, 0.5, 1.0}, Case{0.6, 0.0, 1.5}}) {
        const KernelTable table = single_table(2.0);
        const BruteForceResult bf = brute_force_partition(c.lambda, c.mu, table, c.horizon, 8, 1e-4);
        std::vector<Observable> obs;
        for (int k = 0; k < 4; ++k)
            obs.push_back([k](const SpinPath& p) { return p.jumps.size() == std::size_t(k) ? 1.0 : 0.0; });
        McConfig cfg = small_config(c.horizon);
        cfg.sweeps = 60000;
        const McmcResult r = mcmc_run(obs, c.lambda, c.mu, table, cfg);
        for (int k = 0; k < 4; ++k) {
            const double expected = bf.sector_weights[k] / bf.value;
            CAPTURE(k);
            CHECK(sigma_distance(r.estimates[k].value, r.estimates[k].error, expected, 0.0) < 4.0);
        }
    }
}

TEST_CASE("brute-force oracle") {
    const KernelTable table = single_table(2.0);
    const BruteForceResult free = brute_force_partition(0.0, 0.0, table, 1.0, 8);
    CHECK(std::abs(free.value - 1.0) <= free.truncation_bound + 1e-13);

    const double nu = std::sqrt(1.25);
    const double exact = std::exp(-1.0) * (std::cosh(nu) + std::sinh(nu) / nu);
    // At T = 1 the omitted sectors beyond four jumps carry about 3.7e-3, so
    // four jumps meet only their own truncation bound; six meet 1e-3.
    const BruteForceResult cap4 = brute_force_partition(0.0, 0.5, table, 1.0, 4, 1e-2);
    CHECK(std::abs(cap4.value - exact) <= cap4.truncation_bound);
    CHECK(std::abs(brute_force_partition(0.0, 0.5, table, 1.0, 6).value - exact) < 1e-3);

    const double ed = ed_partition(kSingle, 20, 0.3, 0.0, 1.0);
    const BruteForceResult coupled4 = brute_force_partition(0.3, 0.0, table, 1.0, 4, 1e-2);
    CHECK(std::abs(coupled4.value - ed) <= coupled4.truncation_bound);
    CHECK(std::abs(brute_force_partition(0.3, 0.0, table, 1.0, 6).value - ed) < 1e-3);
    CHECK_THROWS_AS(brute_force_partition(0.3, 0.0, table, 1.0, 2, 1e-6), NumericalError);
}

TEST_CASE("weighted slope") {
    const auto [slope, err] = weighted_slope({1, 2, 3, 4}, {3, 5, 7, 9}, {0.1, 0.1, 0.1, 0.1});
    CHECK(slope == doctest::Approx(2.0));
    CHECK(err > 0);
    const auto [s2, e2] = weighted_slope({10, 20}, {1.0, 1.5}, {0.1, 0.1});
    CHECK(s2 == doctest::Approx(0.05));
    CHECK(e2 == doctest::Approx(std::sqrt(0.02) / 10));
}

TEST_CASE("coupling scan on a free column") {
    const KernelTable table = single_table(20.0);
    McConfig cfg = small_config(10.0);
    cfg.sweeps = 10000;
    const ScanResult scan = coupling_scan({0.0}, table, cfg, {10.0, 20.0});
    REQUIRE(scan.cells.size() == 2);
    for (const ScanCell& c : scan.cells) {
        CHECK(c.error.empty());
        CHECK(c.l1_diag == 0.0);
        CHECK(sigma_distance(c.chi.value, c.chi.error, 1 - (1 - std::exp(-2 * c.horizon)) / (2 * c.horizon), 0.0) <
              3.5);
    }
    REQUIRE(scan.slopes.size() == 1);
    CHECK(sigma_distance(scan.slopes[0].slope, scan.slopes[0].slope_error, (0.975 - 0.95) / 10, 0.0) < 3.0);
}

TEST_CASE("configuration validation") {
    McConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.horizon = -1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = McConfig{};
    cfg.moves.delete_pair = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = McConfig{};
    cfg.burn_in = -0.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK(McConfig{}.moves_per_sweep() == 10);
}
