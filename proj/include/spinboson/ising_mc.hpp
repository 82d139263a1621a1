// ising_mc.hpp: continuous-time Ising paths and their Monte Carlo estimators
//
// A path is a ±1 valued step function on [0, T] that flips at rate 1. With the
// kernel W from kernel.hpp its action is
//
//   S[X] = c λ² ∫∫ W(t − s) X_t X_s ds dt − μ ∫ X_t dt,
//
// and Z_T = E[e^S] over the free process equals e^{-T} ⟨Ω↓, e^{-TH} Ω↓⟩.
// The prefactor c depends on how the field is normalized (FieldConvention).

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spinboson/estimate.hpp"
#include "spinboson/kernel.hpp"
#include "spinboson/rng.hpp"

namespace spinboson {

// standard: φ = a + a*, which makes c = 2 for the Hamiltonian in fock.hpp.
// symmetrized: c = 1, the value obtained if φ carries an extra 1/√2.
enum class FieldConvention { standard, symmetrized };

double coupling_factor(FieldConvention convention) noexcept;
std::string to_string(FieldConvention convention);
FieldConvention parse_field_convention(const std::string& text);

struct SpinPath {
    double horizon{1.0};
    int initial_spin{1};
    std::vector<double> jumps;  // strictly increasing, inside (0, horizon)

    int spin_at(double t) const;
    std::size_t segment_count() const noexcept { return jumps.size() + 1; }
    int final_spin() const noexcept { return jumps.size() % 2 == 0 ? initial_spin : -initial_spin; }
    // Throws ArgumentError if the invariants do not hold.
    void validate() const;
};

// Rate-1 jump process on [0, T] with uniform initial spin.
SpinPath sample_free_path(double horizon, Philox& rng);

// ∫∫ W(t − s) X_t X_s over [0, T]², exact for the piecewise constant path.
double interaction_integral(const SpinPath& path, const KernelTable& table);
double action(const SpinPath& path, double lambda, double mu, const KernelTable& table,
              FieldConvention convention = FieldConvention::standard);
double magnetization(const SpinPath& path);

struct MoveWeights {
    double insert_pair{1.0};
    double delete_pair{1.0};
    double shift{1.0};
    double global_flip{0.2};
    double tail{0.5};  // single-jump insert/remove at the end; changes jump parity

    bool operator==(const MoveWeights&) const = default;
};

enum class Move : std::size_t { insert_pair, delete_pair, shift, global_flip, tail, count };

struct McConfig {
    double horizon{5.0};
    std::size_t samples{100000};  // independent paths for Z_T
    std::size_t sweeps{20000};    // recorded sweeps per chain
    double burn_in{0.1};          // discarded sweeps, as a fraction of `sweeps`
    std::uint64_t seed{1};
    MoveWeights moves;
    std::size_t thinning{1};
    std::size_t chains{4};
    std::size_t block_size{4096};
    unsigned threads{0};
    FieldConvention convention{FieldConvention::standard};

    // Throws ConfigError.
    void validate() const;
    // Move attempts per sweep.
    std::size_t moves_per_sweep() const noexcept;

    bool operator==(const McConfig&) const = default;
};

// Share of the total importance weight above which a run is flagged.
inline constexpr double kHeavyTailFraction = 0.05;

struct PartitionResult {
    Estimate estimate;
    double max_weight_fraction{0.0};
    bool heavy_tail{false};
};

// Z_T = E[e^S] by independent free paths.
PartitionResult estimate_partition_detail(double lambda, double mu, const KernelTable& table,
                                          const McConfig& cfg);
Estimate estimate_partition(double lambda, double mu, const KernelTable& table, const McConfig& cfg);

// E = −1 − ln(Z_T)/T. Throws NumericalError("estimation") if Z_T ≤ 0.
Estimate estimate_energy(double lambda, double mu, const KernelTable& table, const McConfig& cfg);

using Observable = std::function<double(const SpinPath&)>;

inline constexpr double kMinAcceptance = 0.05;
inline constexpr double kMaxAcceptance = 0.95;

struct McmcResult {
    std::vector<Estimate> estimates;  // one per observable, chains combined
    double acceptance_rate{0.0};
    std::array<double, static_cast<std::size_t>(Move::count)> move_acceptance{};
    double mean_jumps{0.0};
    std::vector<std::string> warnings;
};

// Metropolis-Hastings on path space with target ∝ e^S relative to the free
// measure. Chains use disjoint streams and are combined in chain order.
McmcResult mcmc_run(const std::vector<Observable>& observables, double lambda, double mu,
                    const KernelTable& table, const McConfig& cfg);
Estimate mcmc_expectation(const Observable& observable, double lambda, double mu,
                          const KernelTable& table, const McConfig& cfg);

// (1/T) ⟨⟨M²⟩⟩ at μ = 0.
Estimate estimate_susceptibility(double lambda, const KernelTable& table, const McConfig& cfg);

struct BruteForceResult {
    double value{0.0};
    double truncation_bound{0.0};
    std::vector<double> sector_weights;  // contribution of paths with n jumps
    std::vector<int> nodes_per_axis;
};

inline constexpr int kMaxBruteForceJumps = 8;

// Z_T summed over jump counts ≤ jump_cap, each sector integrated over the
// ordered simplex by tensor Gauss-Legendre. Throws NumericalError("truncation")
// when the bound on the omitted sectors exceeds `tolerance`.
BruteForceResult brute_force_partition(double lambda, double mu, const KernelTable& table,
                                       double horizon, int jump_cap, double tolerance = 1e-3,
                                       FieldConvention convention = FieldConvention::standard);

struct ScanCell {
    double lambda{0.0};
    double horizon{0.0};
    Estimate chi;
    double l1_diag{0.0};  // c λ² ‖W‖₁, compared with 1/5
    std::string error;    // nonempty if the cell failed
};

struct ScanSlope {
    double lambda{0.0};
    double slope{0.0};  // weighted least-squares d chi / d T
    double slope_error{0.0};
    // 2 chi(2T) − chi(T) for each doubling pair present in the grid.
    std::vector<double> extrapolated;
    std::vector<double> extrapolated_error;
};

struct ScanResult {
    std::vector<ScanCell> cells;
    std::vector<ScanSlope> slopes;
};

inline constexpr double kSmallCouplingThreshold = 0.2;

ScanResult coupling_scan(const std::vector<double>& lambdas, const KernelTable& table,
                         const McConfig& cfg, const std::vector<double>& horizons);

// Weighted least-squares slope of y against x with its standard error.
std::pair<double, double> weighted_slope(const std::vector<double>& x, const std::vector<double>& y,
                                         const std::vector<double>& sigma);

}  // namespace spinboson
