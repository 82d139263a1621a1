// fock.hpp: truncated Fock space over a finite mode list, the spin-boson
// Hamiltonian as a sparse matrix, and exact-diagonalization diagnostics.
//
// States are (spin, o_1..o_n) with o_j ≤ n_max and Σ o_j ≤ N_max. Occupation
// tuples are enumerated lexicographically; the ordinal of a state is
// 2·tuple + spin with spin ↓ = 0, so the vacuum with spin down is ordinal 0.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "spinboson/eigensolver.hpp"
#include "spinboson/model.hpp"

namespace spinboson {

using linalg::SparseMatrix;
using linalg::Vector;

enum class Spin : std::uint8_t { down = 0, up = 1 };

// Largest Hilbert-space dimension build_basis will allocate.
inline constexpr std::size_t kDefaultMaxDimension = 4'000'000;

class FockBasis {
public:
    FockBasis(std::size_t n_modes, int n_max, int N_max,
              std::size_t max_dimension = kDefaultMaxDimension);

    std::size_t n_modes() const noexcept { return n_modes_; }
    int n_max() const noexcept { return n_max_; }
    int N_max() const noexcept { return N_max_; }
    std::size_t n_tuples() const noexcept { return n_tuples_; }
    std::size_t dimension() const noexcept { return 2 * n_tuples_; }

    std::span<const std::uint8_t> occupations(std::size_t tuple) const noexcept {
        return {occ_.data() + tuple * n_modes_, n_modes_};
    }
    int total_bosons(std::size_t tuple) const noexcept { return totals_[tuple]; }

    static std::size_t ordinal(Spin s, std::size_t tuple) noexcept {
        return 2 * tuple + static_cast<std::size_t>(s);
    }
    static Spin spin_of(std::size_t ordinal) noexcept { return static_cast<Spin>(ordinal & 1U); }
    static std::size_t tuple_of(std::size_t ordinal) noexcept { return ordinal >> 1; }

    std::optional<std::size_t> find_tuple(std::span<const std::uint8_t> occ) const;
    std::optional<std::size_t> find(Spin s, std::span<const std::uint8_t> occ) const;

    // Ω↓: spin down, no bosons.
    std::size_t vacuum_down() const noexcept { return 0; }

    // Number of occupation tuples for the given caps, saturating at SIZE_MAX.
    static std::size_t count_tuples(std::size_t n_modes, int n_max, int N_max);

private:
    std::size_t n_modes_;
    int n_max_;
    int N_max_;
    std::size_t n_tuples_{0};
    std::vector<std::uint8_t> occ_;
    std::vector<int> totals_;
    std::unordered_map<std::string, std::size_t> lookup_;
};

FockBasis build_basis(const DiscreteModes& modes, int n_max, int N_max,
                      std::size_t max_dimension = kDefaultMaxDimension);

// Real sparse matrix on a FockBasis. When constructed as self-adjoint the
// stored matrix is checked for exact symmetry.
class SparseOperator {
public:
    SparseOperator() = default;
    SparseOperator(SparseMatrix matrix, bool self_adjoint);

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
    const SparseMatrix& matrix() const noexcept { return matrix_; }
    bool is_self_adjoint() const noexcept { return self_adjoint_; }
    Vector apply(const Vector& x) const { return matrix_ * x; }

private:
    SparseMatrix matrix_;
    bool self_adjoint_{false};
};

// Largest |entry| of AB − BA.
double commutator_max_norm(const SparseOperator& a, const SparseOperator& b);

// Diagonal Σ_j w_j o_j; w = ω gives dΓ(ω), w = 1 the number operator.
SparseOperator number_weighted_op(const FockBasis& basis, std::span<const double> weights);
// φ(v) = a(v) + a(v)* with projection truncation at the caps.
SparseOperator field_op(const FockBasis& basis, std::span<const double> couplings);
// a_j on the truncated space (not self-adjoint).
SparseOperator annihilation_op(const FockBasis& basis, std::size_t mode);
SparseOperator sigma_x_op(const FockBasis& basis);
SparseOperator sigma_z_op(const FockBasis& basis);
// σ_z ⊗ (−1)^N.
SparseOperator parity_op(const FockBasis& basis);

// σ_z ⊗ 1 + 1 ⊗ dΓ(ω) + σ_x ⊗ (λ φ(v) + μ).
SparseOperator hamiltonian(const FockBasis& basis, const DiscreteModes& modes, double lambda,
                           double mu);

inline constexpr double kDegeneracyGap = 1e-10;

struct GroundStateResult {
    double energy{0.0};
    Vector state;
    double second_energy{0.0};
    double gap{0.0};
    double residual{0.0};
    int iterations{0};
    bool converged{false};
    bool degenerate{false};
    bool dense{false};
};

// Lowest eigenpair plus the next eigenvalue. The eigenvector sign is fixed so
// that its Ω↓ component (or, if that vanishes, its largest component) is
// positive. Throws NumericalError("eigensolver") if the residual stays above
// tol.
GroundStateResult ground_state(const SparseOperator& h, double tol = 1e-10);

struct SemigroupResult {
    double value{0.0};
    double error_estimate{0.0};
    int krylov_dimension{0};
};

inline constexpr double kSemigroupTolerance = 1e-10;

// ⟨Ω↓, e^{-T H} Ω↓⟩ by Lanczos quadrature. Throws NumericalError("propagation")
// when the relative error estimate exceeds kSemigroupTolerance.
SemigroupResult semigroup_amplitude_detail(const SparseOperator& h, const FockBasis& basis, double t);
double semigroup_amplitude(const SparseOperator& h, const FockBasis& basis, double t);

double sigma_x_expectation(const FockBasis& basis, const Vector& psi);

struct PullThrough {
    std::vector<double> residuals;  // per mode
    double max_residual{0.0};
};

// r_j = ‖a_j ψ + λ v_j (H − E + ω_j)^{-1} (σ_x ⊗ 1) ψ‖.
PullThrough pull_through_residual(const SparseOperator& h, double energy, const Vector& psi,
                                  const FockBasis& basis, const DiscreteModes& modes, double lambda);

struct ResolventCheck {
    double lhs{0.0};   // ‖(H − E + ω_j)^{-1} σ_x ψ‖
    double rhs{0.0};   // √χ ω_j^{-1/2}
    bool passes{false};
    double lowest_shifted{0.0};  // smallest eigenvalue of H − E + ω_j
    bool standard_bound{false};  // lowest_shifted ≥ ω_j within tolerance
};

inline constexpr double kResolventSlack = 1e-6;

std::vector<ResolventCheck> resolvent_norm_check(const SparseOperator& h, double energy,
                                                 const Vector& psi, const FockBasis& basis,
                                                 const DiscreteModes& modes, double chi);

struct SusceptibilityFd {
    double value{0.0};           // ∂²_μ E at μ = 0 (Richardson-combined)
    double coarse{0.0};          // difference quotient at step h
    double fine{0.0};            // difference quotient at step h/2
    double error_estimate{0.0};  // |fine − coarse| / 3
    bool low_confidence{false};
    double energy0{0.0};
};

inline constexpr double kFdConfidenceThreshold = 1e-4;

// Second μ-derivative of the ED ground energy at μ = 0 from the even
// difference quotient 2(E(h) − E(0))/h², combined over h and h/2.
SusceptibilityFd susceptibility_fd(const DiscreteModes& modes, double lambda, double h, int n_max,
                                   int N_max, double tol = 1e-12);

// Flat dump: 8-byte magic "SBEVEC01", uint64 dimension, then little-endian doubles.
void write_eigenvector(std::ostream& os, const Vector& psi);
Vector read_eigenvector(std::istream& is);

}  // namespace spinboson
