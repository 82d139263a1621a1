// fock.cpp

#include "spinboson/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include "spinboson/errors.hpp"

namespace spinboson {

namespace {

std::string key_of(std::span<const std::uint8_t> occ) {
    return {reinterpret_cast<const char*>(occ.data()), occ.size()};
}

SparseMatrix from_triplets(std::size_t dim, const std::vector<Eigen::Triplet<double>>& triplets) {
    SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

std::size_t flip(std::size_t ordinal) noexcept { return ordinal ^ 1U; }

void check_length(const FockBasis& basis, std::size_t n, const char* what) {
    if (n != basis.n_modes())
        throw ArgumentError(std::string(what) + ": expected " + std::to_string(basis.n_modes()) +
                            " entries, got " + std::to_string(n));
}

// Visits every (tuple, mode, tuple with one more boson in that mode) link.
template <class F>
void for_each_raising(const FockBasis& basis, F&& f) {
    std::vector<std::uint8_t> work(basis.n_modes());
    for (std::size_t t = 0; t < basis.n_tuples(); ++t) {
        const auto occ = basis.occupations(t);
        if (basis.total_bosons(t) >= basis.N_max()) continue;
        std::copy(occ.begin(), occ.end(), work.begin());
        for (std::size_t j = 0; j < basis.n_modes(); ++j) {
            if (occ[j] >= basis.n_max()) continue;
            ++work[j];
            const auto up = basis.find_tuple(work);
            --work[j];
            if (up) f(t, j, *up, static_cast<double>(occ[j]) + 1.0);
        }
    }
}

}  // namespace

std::size_t FockBasis::count_tuples(std::size_t n_modes, int n_max, int N_max) {
    if (N_max < 0 || n_max < 0) return 0;
    const std::size_t saturate = std::numeric_limits<std::size_t>::max();
    // ways[k] = number of tuples over the modes processed so far with total k
    std::vector<std::size_t> ways(static_cast<std::size_t>(N_max) + 1, 0);
    ways[0] = 1;
    for (std::size_t m = 0; m < n_modes; ++m) {
        std::vector<std::size_t> next(ways.size(), 0);
        for (std::size_t k = 0; k < ways.size(); ++k) {
            if (ways[k] == 0) continue;
            for (int o = 0; o <= n_max && k + static_cast<std::size_t>(o) < ways.size(); ++o) {
                std::size_t& slot = next[k + static_cast<std::size_t>(o)];
                slot = (saturate - slot < ways[k]) ? saturate : slot + ways[k];
            }
        }
        ways = std::move(next);
    }
    std::size_t total = 0;
    for (std::size_t w : ways) total = (saturate - total < w) ? saturate : total + w;
    return total;
}

FockBasis::FockBasis(std::size_t n_modes, int n_max, int N_max, std::size_t max_dimension)
    : n_modes_(n_modes), n_max_(n_max), N_max_(N_max) {
    if (n_max < 0 || N_max < 0) throw ArgumentError("occupation caps must be nonnegative");
    if (n_max > 255) throw ArgumentError("n_max above 255 is not supported");
    const std::size_t tuples = count_tuples(n_modes, n_max, N_max);
    if (tuples > max_dimension / 2)
        throw CapacityError("Fock dimension " +
                            (tuples == std::numeric_limits<std::size_t>::max()
                                 ? std::string("(overflow)")
                                 : std::to_string(2 * tuples)) +
                            " exceeds budget " + std::to_string(max_dimension));
    n_tuples_ = tuples;
    occ_.reserve(tuples * n_modes);
    totals_.reserve(tuples);
    lookup_.reserve(tuples);

    // Lexicographic odometer: bump the last position that can grow, zero the rest.
    std::vector<std::uint8_t> cur(n_modes, 0);
    int total = 0;
    while (true) {
        lookup_.emplace(key_of(cur), totals_.size());
        occ_.insert(occ_.end(), cur.begin(), cur.end());
        totals_.push_back(total);
        bool advanced = false;
        for (std::size_t j = n_modes; j-- > 0;) {
            int suffix = 0;
            for (std::size_t i = j + 1; i < n_modes; ++i) suffix += cur[i];
            if (cur[j] < n_max && total - suffix + 1 <= N_max) {
                ++cur[j];
                for (std::size_t i = j + 1; i < n_modes; ++i) cur[i] = 0;
                total = total - suffix + 1;
                advanced = true;
                break;
            }
        }
        if (!advanced) break;
    }
    if (totals_.size() != n_tuples_) throw NumericalError("basis", "tuple enumeration count mismatch");
}

std::optional<std::size_t> FockBasis::find_tuple(std::span<const std::uint8_t> occ) const {
    if (occ.size() != n_modes_) return std::nullopt;
    const auto it = lookup_.find(key_of(occ));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> FockBasis::find(Spin s, std::span<const std::uint8_t> occ) const {
    const auto t = find_tuple(occ);
    if (!t) return std::nullopt;
    return ordinal(s, *t);
}

FockBasis build_basis(const DiscreteModes& modes, int n_max, int N_max, std::size_t max_dimension) {
    return FockBasis(modes.size(), n_max, N_max, max_dimension);
}

SparseOperator::SparseOperator(SparseMatrix matrix, bool self_adjoint)
    : matrix_(std::move(matrix)), self_adjoint_(self_adjoint) {
    if (matrix_.rows() != matrix_.cols()) throw ArgumentError("operator must be square");
    if (self_adjoint_) {
        const SparseMatrix transposed = matrix_.transpose();
        const SparseMatrix diff = matrix_ - transposed;
        for (Eigen::Index k = 0; k < diff.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(diff, k); it; ++it)
                if (it.value() != 0.0)
                    throw NumericalError("asymmetric", "operator flagged self-adjoint is not symmetric");
    }
}

double commutator_max_norm(const SparseOperator& a, const SparseOperator& b) {
    const SparseMatrix c = SparseMatrix(a.matrix() * b.matrix()) - SparseMatrix(b.matrix() * a.matrix());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < c.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(c, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
}

SparseOperator number_weighted_op(const FockBasis& basis, std::span<const double> weights) {
    check_length(basis, weights.size(), "number_weighted_op");
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(basis.dimension());
    for (std::size_t t = 0; t < basis.n_tuples(); ++t) {
        const auto occ = basis.occupations(t);
        double value = 0.0;
        for (std::size_t j = 0; j < occ.size(); ++j) value += weights[j] * occ[j];
        for (Spin s : {Spin::down, Spin::up}) {
            const auto i = static_cast<Eigen::Index>(FockBasis::ordinal(s, t));
            triplets.emplace_back(i, i, value);
        }
    }
    return {from_triplets(basis.dimension(), triplets), true};
}

SparseOperator field_op(const FockBasis& basis, std::span<const double> couplings) {
    check_length(basis, couplings.size(), "field_op");
    std::vector<Eigen::Triplet<double>> triplets;
    for_each_raising(basis, [&](std::size_t lo, std::size_t j, std::size_t hi, double n) {
        const double value = couplings[j] * std::sqrt(n);
        for (Spin s : {Spin::down, Spin::up}) {
            const auto a = static_cast<Eigen::Index>(FockBasis::ordinal(s, lo));
            const auto b = static_cast<Eigen::Index>(FockBasis::ordinal(s, hi));
            triplets.emplace_back(a, b, value);
            triplets.emplace_back(b, a, value);
        }
    });
    return {from_triplets(basis.dimension(), triplets), true};
}

SparseOperator annihilation_op(const FockBasis& basis, std::size_t mode) {
    if (mode >= basis.n_modes()) throw ArgumentError("annihilation_op: mode index out of range");
    std::vector<Eigen::Triplet<double>> triplets;
    for_each_raising(basis, [&](std::size_t lo, std::size_t j, std::size_t hi, double n) {
        if (j != mode) return;
        for (Spin s : {Spin::down, Spin::up})
            triplets.emplace_back(static_cast<Eigen::Index>(FockBasis::ordinal(s, lo)),
                                  static_cast<Eigen::Index>(FockBasis::ordinal(s, hi)), std::sqrt(n));
    });
    return {from_triplets(basis.dimension(), triplets), false};
}

SparseOperator sigma_x_op(const FockBasis& basis) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(basis.dimension());
    for (std::size_t i = 0; i < basis.dimension(); ++i)
        triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(flip(i)), 1.0);
    return {from_triplets(basis.dimension(), triplets), true};
}

SparseOperator sigma_z_op(const FockBasis& basis) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(basis.dimension());
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        const double s = FockBasis::spin_of(i) == Spin::up ? 1.0 : -1.0;
        triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), s);
    }
    return {from_triplets(basis.dimension(), triplets), true};
}

SparseOperator parity_op(const FockBasis& basis) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(basis.dimension());
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        const double s = FockBasis::spin_of(i) == Spin::up ? 1.0 : -1.0;
        const double n = basis.total_bosons(FockBasis::tuple_of(i)) % 2 == 0 ? 1.0 : -1.0;
        triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), s * n);
    }
    return {from_triplets(basis.dimension(), triplets), true};
}

SparseOperator hamiltonian(const FockBasis& basis, const DiscreteModes& modes, double lambda,
                           double mu) {
    check_length(basis, modes.size(), "hamiltonian");
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(basis.dimension() * (2 * basis.n_modes() + 2));
    for (std::size_t t = 0; t < basis.n_tuples(); ++t) {
        const auto occ = basis.occupations(t);
        double boson = 0.0;
        for (std::size_t j = 0; j < occ.size(); ++j) boson += modes.omega[j] * occ[j];
        const auto dn = static_cast<Eigen::Index>(FockBasis::ordinal(Spin::down, t));
        const auto up = static_cast<Eigen::Index>(FockBasis::ordinal(Spin::up, t));
        triplets.emplace_back(dn, dn, boson - 1.0);
        triplets.emplace_back(up, up, boson + 1.0);
        if (mu != 0.0) {
            triplets.emplace_back(dn, up, mu);
            triplets.emplace_back(up, dn, mu);
        }
    }
    if (lambda != 0.0) {
        // σ_x ⊗ λφ: spin flips, one boson created or destroyed.
        for_each_raising(basis, [&](std::size_t lo, std::size_t j, std::size_t hi, double n) {
            const double value = lambda * modes.v[j] * std::sqrt(n);
            for (Spin s : {Spin::down, Spin::up}) {
                const Spin other = s == Spin::down ? Spin::up : Spin::down;
                const auto a = static_cast<Eigen::Index>(FockBasis::ordinal(s, lo));
                const auto b = static_cast<Eigen::Index>(FockBasis::ordinal(other, hi));
                triplets.emplace_back(a, b, value);
                triplets.emplace_back(b, a, value);
            }
        });
    }
    return {from_triplets(basis.dimension(), triplets), true};
}

GroundStateResult ground_state(const SparseOperator& h, double tol) {
    if (!h.is_self_adjoint()) throw PreconditionError("ground_state requires a self-adjoint operator");
    const auto n = static_cast<Eigen::Index>(h.dimension());
    Vector start = Vector::Zero(n);
    start(0) = 1.0;
    linalg::EigenOptions opts;
    opts.tolerance = tol;
    const int count = n >= 2 ? 2 : 1;
    const auto pairs = linalg::lowest_eigenpairs(h.matrix(), count, opts, start);

    GroundStateResult out;
    out.energy = pairs.values[0];
    out.state = pairs.vectors[0];
    out.residual = pairs.residuals[0];
    out.iterations = pairs.iterations;
    out.dense = pairs.dense;
    out.converged = pairs.converged && out.residual <= tol;
    if (count == 2) {
        out.second_energy = pairs.values[1];
        out.gap = std::max(0.0, pairs.values[1] - pairs.values[0]);
    }
    out.degenerate = count == 2 && out.gap < kDegeneracyGap;
    if (!out.converged)
        throw NumericalError("eigensolver", "ground state not converged, best residual " +
                                                std::to_string(out.residual));

    Eigen::Index pivot = 0;
    if (std::abs(out.state(0)) < 1e-8) out.state.cwiseAbs().maxCoeff(&pivot);
    if (out.state(pivot) < 0.0) out.state = -out.state;
    return out;
}

SemigroupResult semigroup_amplitude_detail(const SparseOperator& h, const FockBasis& basis, double t) {
    if (!(t > 0.0)) throw ArgumentError("semigroup_amplitude: T must be positive");
    Vector b = Vector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    b(static_cast<Eigen::Index>(basis.vacuum_down())) = 1.0;
    const auto q = linalg::exp_quadratic_form(h.matrix(), b, t, 1e-13);
    SemigroupResult out{q.value, q.error_estimate, q.krylov_dimension};
    if (!(q.value > 0.0) || q.error_estimate > kSemigroupTolerance * q.value)
        throw NumericalError("propagation", "semigroup amplitude error estimate " +
                                                std::to_string(q.error_estimate / q.value) +
                                                " exceeds tolerance");
    return out;
}

double semigroup_amplitude(const SparseOperator& h, const FockBasis& basis, double t) {
    return semigroup_amplitude_detail(h, basis, t).value;
}

double sigma_x_expectation(const FockBasis& basis, const Vector& psi) {
    if (static_cast<std::size_t>(psi.size()) != basis.dimension())
        throw ArgumentError("sigma_x_expectation: vector length does not match basis");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < psi.size(); ++i)
        sum += psi(i) * psi(static_cast<Eigen::Index>(flip(static_cast<std::size_t>(i))));
    return sum;
}

PullThrough pull_through_residual(const SparseOperator& h, double energy, const Vector& psi,
                                  const FockBasis& basis, const DiscreteModes& modes, double lambda) {
    check_length(basis, modes.size(), "pull_through_residual");
    const Vector flipped = sigma_x_op(basis).apply(psi);
    PullThrough out;
    for (std::size_t j = 0; j < modes.size(); ++j) {
        if (!(modes.omega[j] > 0.0)) throw PreconditionError("pull-through needs positive mode frequencies");
        const auto solve = linalg::solve_shifted_spd(h.matrix(), modes.omega[j] - energy, flipped, 1e-13);
        const Vector lhs = annihilation_op(basis, j).apply(psi) + lambda * modes.v[j] * solve.x;
        out.residuals.push_back(lhs.norm());
        out.max_residual = std::max(out.max_residual, out.residuals.back());
    }
    return out;
}

std::vector<ResolventCheck> resolvent_norm_check(const SparseOperator& h, double energy,
                                                 const Vector& psi, const FockBasis& basis,
                                                 const DiscreteModes& modes, double chi) {
    if (chi < 0.0) throw ArgumentError("resolvent_norm_check: susceptibility must be nonnegative");
    check_length(basis, modes.size(), "resolvent_norm_check");
    const Vector flipped = sigma_x_op(basis).apply(psi);
    linalg::EigenOptions opts;
    opts.tolerance = 1e-11;
    const double bottom = linalg::lowest_eigenpairs(h.matrix(), 1, opts).values[0];
    std::vector<ResolventCheck> out;
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const double w = modes.omega[j];
        if (!(w > 0.0)) throw PreconditionError("resolvent check needs positive mode frequencies");
        ResolventCheck c;
        c.lhs = linalg::solve_shifted_spd(h.matrix(), w - energy, flipped, 1e-13).x.norm();
        c.rhs = std::sqrt(chi / w);
        c.passes = c.lhs <= c.rhs * (1.0 + kResolventSlack);
        c.lowest_shifted = bottom - energy + w;
        c.standard_bound = c.lowest_shifted >= w - 1e-9;
        out.push_back(c);
    }
    return out;
}

SusceptibilityFd susceptibility_fd(const DiscreteModes& modes, double lambda, double h, int n_max,
                                   int N_max, double tol) {
    if (!(h > 0.0)) throw ArgumentError("susceptibility_fd: step must be positive");
    const FockBasis basis = build_basis(modes, n_max, N_max);
    const auto energy = [&](double mu) { return ground_state(hamiltonian(basis, modes, lambda, mu), tol).energy; };
    SusceptibilityFd out;
    out.energy0 = energy(0.0);
    // E is even in μ, so the central quotient needs only +h.
    const double half = 0.5 * h;
    out.coarse = 2.0 * (energy(h) - out.energy0) / (h * h);
    out.fine = 2.0 * (energy(half) - out.energy0) / (half * half);
    out.value = (4.0 * out.fine - out.coarse) / 3.0;
    out.error_estimate = std::abs(out.fine - out.coarse) / 3.0;
    out.low_confidence = out.error_estimate > kFdConfidenceThreshold;
    return out;
}

namespace {

constexpr char kMagic[8] = {'S', 'B', 'E', 'V', 'E', 'C', '0', '1'};

template <class T>
T to_little(T value) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, &value, sizeof(T));
        std::reverse(bytes, bytes + sizeof(T));
        std::memcpy(&value, bytes, sizeof(T));
    }
    return value;
}

}  // namespace

void write_eigenvector(std::ostream& os, const Vector& psi) {
    os.write(kMagic, sizeof(kMagic));
    const std::uint64_t dim = to_little(static_cast<std::uint64_t>(psi.size()));
    os.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        const double x = to_little(psi(i));
        os.write(reinterpret_cast<const char*>(&x), sizeof(x));
    }
}

Vector read_eigenvector(std::istream& is) {
    char magic[8];
    std::uint64_t dim = 0;
    is.read(magic, sizeof(magic));
    is.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    if (!is || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw ArgumentError("not an eigenvector dump");
    dim = to_little(dim);
    Vector psi(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        double x = 0.0;
        is.read(reinterpret_cast<char*>(&x), sizeof(x));
        psi(i) = to_little(x);
    }
    if (!is) throw ArgumentError("truncated eigenvector dump");
    return psi;
}

}  // namespace spinboson
