#include <doctest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "spinboson/errors.hpp"
#include "spinboson/fock.hpp"
#include "spinboson/rng.hpp"

using namespace spinboson;

namespace {

Eigen::MatrixXd dense(const SparseOperator& op) { return Eigen::MatrixXd(op.matrix()); }

const DiscreteModes kSingle = DiscreteModes::manual({1.0}, {1.0});
const DiscreteModes kPair = DiscreteModes::manual({0.5, 2.0}, {1.0, 0.7});

}  // namespace

TEST_CASE("basis dimensions") {
    CHECK(FockBasis(1, 3, 3).dimension() == 8);
    CHECK(FockBasis(2, 2, 2).dimension() == 12);
    CHECK(FockBasis(5, 4, 0).dimension() == 2);
    CHECK(FockBasis::count_tuples(12, 20, 12) == 2704156);  // C(24, 12)
    CHECK_THROWS_AS(FockBasis(40, 10, 40, 1000), CapacityError);
}

TEST_CASE("basis ordering and lookup") {
    const FockBasis b(2, 2, 2);
    CHECK(b.vacuum_down() == 0);
    for (std::size_t t = 0; t < b.n_tuples(); ++t) {
        const auto occ = b.occupations(t);
        CHECK(b.find_tuple(occ) == t);
        CHECK(b.find(Spin::up, occ) == FockBasis::ordinal(Spin::up, t));
    }
    const std::uint8_t bad[2] = {2, 1};
    CHECK_FALSE(b.find_tuple(bad).has_value());
}

TEST_CASE("number-weighted operator") {
    const FockBasis b(1, 3, 3);
    const double w[1] = {0.7};
    const SparseOperator n = number_weighted_op(b, w);
    const std::uint8_t two[1] = {2};
    const std::size_t i = *b.find(Spin::down, two);
    CHECK(n.matrix().coeff(i, i) == doctest::Approx(1.4));
    const double ones[1] = {1.0};
    const SparseOperator count = number_weighted_op(b, ones);
    CHECK(count.matrix().coeff(0, 0) == 0.0);
    CHECK(commutator_max_norm(n, count) == 0.0);
}

TEST_CASE("field operator") {
    const FockBasis b(1, 2, 2);
    const double v[1] = {1.0};
    const Eigen::MatrixXd phi = dense(field_op(b, v));
    CHECK(phi(FockBasis::ordinal(Spin::down, 1), 0) == doctest::Approx(1.0));
    CHECK(phi(FockBasis::ordinal(Spin::down, 2), FockBasis::ordinal(Spin::down, 1)) ==
          doctest::Approx(std::sqrt(2.0)));
    CHECK((phi - phi.transpose()).cwiseAbs().maxCoeff() == 0.0);

    const FockBasis b2(2, 3, 3);
    const Eigen::MatrixXd phi2 = dense(field_op(b2, kPair.v));
    CHECK((phi2 * phi2)(0, 0) == doctest::Approx(1.0 + 0.49).epsilon(1e-14));
}

TEST_CASE("annihilation operator lowers occupation") {
    const FockBasis b(2, 3, 4);
    const Eigen::MatrixXd a = dense(annihilation_op(b, 1));
    const std::uint8_t from[2] = {1, 3};
    const std::uint8_t to[2] = {1, 2};
    CHECK(a(*b.find(Spin::up, to), *b.find(Spin::up, from)) == doctest::Approx(std::sqrt(3.0)));
    CHECK(a.col(0).norm() == 0.0);
}

TEST_CASE("free and spin-only Hamiltonians") {
    const FockBasis b = build_basis(kPair, 3, 3);
    const SparseOperator h0 = hamiltonian(b, kPair, 0.0, 0.0);
    const Eigen::MatrixXd d = dense(h0);
    CHECK((d - Eigen::MatrixXd(d.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.diagonal().minCoeff() == -1.0);
    CHECK(d(0, 0) == -1.0);

    const GroundStateResult gs = ground_state(h0);
    CHECK(gs.energy == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(gs.gap == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::abs(gs.state[0]) == doctest::Approx(1.0).epsilon(1e-12));

    const FockBasis spin_only = build_basis(kPair, 3, 0);
    const SparseOperator h = hamiltonian(spin_only, kPair, 0.4, 0.75);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(h));
    CHECK(es.eigenvalues()[0] == doctest::Approx(-1.25).epsilon(1e-14));
    CHECK(es.eigenvalues()[1] == doctest::Approx(1.25).epsilon(1e-14));
    const GroundStateResult g2 = ground_state(h);
    CHECK(g2.energy == doctest::Approx(-1.25).epsilon(1e-12));
    CHECK(sigma_x_expectation(spin_only, g2.state) == doctest::Approx(-0.6).epsilon(1e-12));
}

TEST_CASE("parity symmetry") {
    const FockBasis b = build_basis(kSingle, 8, 8);
    const SparseOperator p = parity_op(b);
    CHECK(p.matrix().coeff(0, 0) == -1.0);
    CHECK(commutator_max_norm(hamiltonian(b, kSingle, 0.1, 0.0), p) < 1e-14);
    for (double mu : {0.3, -0.8})
        CHECK(commutator_max_norm(hamiltonian(b, kSingle, 0.1, mu), p) == doctest::Approx(2 * std::abs(mu)));
}

TEST_CASE("sigma_x expectation") {
    const FockBasis b = build_basis(kSingle, 8, 8);
    Vector omega = Vector::Zero(static_cast<Eigen::Index>(b.dimension()));
    omega[0] = 1.0;
    CHECK(sigma_x_expectation(b, omega) == 0.0);
    const GroundStateResult gs = ground_state(hamiltonian(b, kSingle, 0.1, 0.0));
    CHECK(std::abs(sigma_x_expectation(b, gs.state)) < 1e-10);
}

TEST_CASE("second-order ground energy of the single-mode model") {
    // E = −1 − λ²/3 + O(λ⁴): the rescaled remainder must stay bounded and
    // settle as λ shrinks.
    const FockBasis b = build_basis(kSingle, 8, 8);
    std::vector<double> remainder;
    for (double lambda : {0.2, 0.1, 0.05}) {
        const double e = ground_state(hamiltonian(b, kSingle, lambda, 0.0), 1e-12).energy;
        remainder.push_back((e + 1 + lambda * lambda / 3) / std::pow(lambda, 4));
    }
    for (double r : remainder) CHECK(std::abs(r) < 1.5);
    CHECK(std::abs(remainder[2] - remainder[1]) < std::abs(remainder[1] - remainder[0]) + 1e-3);
    const double e = ground_state(hamiltonian(b, kSingle, 0.1, 0.0), 1e-12).energy;
    CHECK(std::abs(e - (-1 - 0.01 / 3)) <= std::pow(0.1, 4));
}

TEST_CASE("Krylov path agrees with dense diagonalization") {
    const DiscreteModes modes = DiscreteModes::manual({0.4, 0.9, 1.7, 2.5}, {0.8, 0.6, 0.5, 0.3});
    const FockBasis b = build_basis(modes, 8, 8);
    REQUIRE(b.dimension() > linalg::kDenseThreshold);
    const SparseOperator h = hamiltonian(b, modes, 0.3, 0.2);
    const GroundStateResult gs = ground_state(h);
    CHECK_FALSE(gs.dense);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(h), Eigen::EigenvaluesOnly);
    CHECK(gs.energy == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-10));
    CHECK(gs.second_energy == doctest::Approx(es.eigenvalues()[1]).epsilon(1e-8));
    CHECK(gs.residual < 1e-9);
}

TEST_CASE("semigroup amplitude") {
    const FockBasis b = build_basis(kPair, 3, 3);
    for (double t : {0.5, 3.0})
        CHECK(semigroup_amplitude(hamiltonian(b, kPair, 0.0, 0.0), b, t) ==
              doctest::Approx(std::exp(t)).epsilon(1e-11));
    const FockBasis spin_only = build_basis(kPair, 3, 0);
    for (double mu : {0.5, 0.75}) {
        const double nu = std::hypot(1.0, mu);
        for (double t : {1.0, 5.0})
            CHECK(semigroup_amplitude(hamiltonian(spin_only, kPair, 0.0, mu), spin_only, t) ==
                  doctest::Approx(std::cosh(t * nu) + std::sinh(t * nu) / nu).epsilon(1e-11));
    }
    // −(1/T) ln amplitude decreases toward E from above.
    const FockBasis bs = build_basis(kSingle, 12, 12);
    const SparseOperator h = hamiltonian(bs, kSingle, 0.3, 0.0);
    const double e = ground_state(h).energy;
    double previous = INFINITY;
    for (double t : {5.0, 10.0, 20.0}) {
        const double approx = -std::log(semigroup_amplitude(h, bs, t)) / t;
        CHECK(approx >= e - 1e-12);
        CHECK(approx <= previous);
        previous = approx;
    }
}

TEST_CASE("pull-through residual") {
    const FockBasis b0 = build_basis(kPair, 4, 4);
    const SparseOperator h0 = hamiltonian(b0, kPair, 0.0, 0.0);
    const GroundStateResult g0 = ground_state(h0);
    CHECK(pull_through_residual(h0, g0.energy, g0.state, b0, kPair, 0.0).max_residual < 1e-12);

    auto residual = [](double lambda, int cap) {
        const FockBasis b = build_basis(kSingle, cap, cap);
        const SparseOperator h = hamiltonian(b, kSingle, lambda, 0.0);
        const GroundStateResult g = ground_state(h, 1e-13);
        return pull_through_residual(h, g.energy, g.state, b, kSingle, lambda).max_residual;
    };
    CHECK(residual(0.05, 12) < 1e-4);
    // Truncation-limited: raising the caps improves the identity.
    double previous = INFINITY;
    for (int cap : {2, 4, 6, 8}) {
        const double r = residual(0.05, cap);
        CHECK(r < previous);
        previous = r;
    }
    // The truncation residual falls faster than linearly in λ.
    CHECK(residual(0.025, 4) < 0.5 * residual(0.05, 4));
}

TEST_CASE("resolvent bound") {
    const FockBasis b0 = build_basis(kPair, 3, 3);
    const SparseOperator h0 = hamiltonian(b0, kPair, 0.0, 0.0);
    const GroundStateResult g0 = ground_state(h0);
    const auto free = resolvent_norm_check(h0, g0.energy, g0.state, b0, kPair, 1.0);
    for (std::size_t j = 0; j < kPair.size(); ++j) {
        CHECK(free[j].lhs == doctest::Approx(1 / (2 + kPair.omega[j])).epsilon(1e-9));
        CHECK(free[j].rhs == doctest::Approx(1 / std::sqrt(kPair.omega[j])).epsilon(1e-12));
        CHECK(free[j].passes);
        CHECK(free[j].lowest_shifted == doctest::Approx(kPair.omega[j]).epsilon(1e-9));
        CHECK(free[j].standard_bound);
    }
    const FockBasis b = build_basis(kSingle, 10, 10);
    const SparseOperator h = hamiltonian(b, kSingle, 0.1, 0.0);
    const GroundStateResult g = ground_state(h);
    const double chi = -susceptibility_fd(kSingle, 0.1, 1e-3, 10, 10).value;
    for (const auto& c : resolvent_norm_check(h, g.energy, g.state, b, kSingle, chi)) {
        CHECK(c.passes);
        CHECK(c.standard_bound);
    }
}

TEST_CASE("finite-difference susceptibility") {
    const SusceptibilityFd free = susceptibility_fd(kPair, 0.0, 1e-2, 2, 2);
    CHECK(free.value == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(std::abs(free.fine - free.coarse) < 1e-4);
    const SusceptibilityFd coupled = susceptibility_fd(kSingle, 0.1, 1e-3, 10, 10);
    CHECK(coupled.value < -1.0);
    CHECK_FALSE(coupled.low_confidence);
}

TEST_CASE("eigenvector dump round trip") {
    Vector v(5);
    v << 1.0, -0.5, 1e-300, 3.25, -0.0;
    std::stringstream ss;
    write_eigenvector(ss, v);
    CHECK(ss.str().substr(0, 8) == "SBEVEC01");
    const Vector back = read_eigenvector(ss);
    CHECK(back == v);
    std::stringstream junk("NOTAVECTOR");
    CHECK_THROWS(read_eigenvector(junk));
}

TEST_CASE("operator invariants on random two-mode models") {
    // Exact symmetry and a converged ground state for arbitrary parameters.
    Philox rng(99, 0);
    for (int trial = 0; trial < 10; ++trial) {
        const DiscreteModes m =
            DiscreteModes::manual({rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0)}, {rng.uniform(0, 1), rng.uniform(0, 1)});
        const double lambda = rng.uniform(-0.5, 0.5);
        const FockBasis b = build_basis(m, 4, 5);
        const SparseOperator h = hamiltonian(b, m, lambda, rng.uniform(-1, 1));
        CHECK(h.is_self_adjoint());
        const Eigen::MatrixXd d = dense(h);
        CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
        const GroundStateResult gs = ground_state(h);
        CHECK(gs.residual < 1e-9);
        CHECK(gs.gap >= 0.0);
    }
}
