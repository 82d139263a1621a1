// kernel.hpp: the Ising interaction kernel W(t) and its antiderivatives
//
//   W(t) = ¼ ∫ |v(k)|² e^{-|t| ω(k)} dk        (even)
//   Φ(u) = ∫_0^u W                             (odd)
//   V(u) = ∫_0^u Φ                             (even, V'' = W)
//
// W is stored without any coupling factor; the path action applies it.
// V lets the double integral of W over a rectangle be evaluated with four
// lookups (segment_pair_integral), which is what the Monte Carlo inner loop
// spends its time on.

#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "spinboson/model.hpp"

namespace spinboson {

// Either a continuum model (radial quadrature) or a finite mode list (exact sums).
class KernelSource {
public:
    KernelSource(ModelSpec spec);  // NOLINT(google-explicit-constructor)
    KernelSource(DiscreteModes modes);  // NOLINT(google-explicit-constructor)

    bool is_discrete() const noexcept { return std::holds_alternative<DiscreteModes>(source_); }
    const ModelSpec* spec() const noexcept { return std::get_if<ModelSpec>(&source_); }
    const DiscreteModes* modes() const noexcept { return std::get_if<DiscreteModes>(&source_); }

    // Direct evaluation; all are evaluated at |t| and extended by parity.
    double W(double t) const;
    double dW(double t) const;  // derivative of W for t ≥ 0, odd extension
    double Phi(double t) const;
    double V(double t) const;

    // ½ ||ω^{-1/2} v||² (continuum) or ½ Σ v_j²/ω_j: ∫_R W by Fubini.
    double l1_fubini() const;

    // Largest frequency on the support; sets the time resolution.
    double omega_scale() const;
    // Infimum of the dispersion (0 for a massless continuum).
    double mass() const;

private:
    std::variant<ModelSpec, DiscreteModes> source_;
};

double kernel_value(const KernelSource& source, double t);

struct L1Norm {
    double fubini{0.0};           // ½ ||ω^{-1/2} v||²
    double time_quadrature{0.0};  // ∫_R W(t) dt by quadrature in t
    double relative_difference{0.0};
    double value() const noexcept { return fubini; }
};

inline constexpr double kL1ConsistencyTolerance = 1e-8;

// ∫_R W(t) dt two ways; throws NumericalError("l1_inconsistent") when they
// disagree beyond kL1ConsistencyTolerance.
L1Norm l1_norm(const KernelSource& source);

enum class TailKind { exact, power_law, exponential };

// Large-t model used beyond the tabulated range.
struct TailModel {
    TailKind kind{TailKind::exact};
    double t0{0.0};      // matching point (t_max)
    double w0{0.0};      // W(t0)
    double exponent{0.0};  // p for power_law, γ for exponential
    double coefficient{0.0};  // C in C t^{-p}
    double phi0{0.0};
    double v0{0.0};
};

inline constexpr double kDefaultTableTolerance = 1e-9;

class KernelTable {
public:
    // Use build_table().
    KernelTable(KernelSource source, double t_max, double tolerance);

    const KernelSource& source() const noexcept { return source_; }
    double t_max() const noexcept { return t_max_; }
    double tolerance() const noexcept { return tolerance_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    const TailModel& tail() const noexcept { return tail_; }
    int refinements() const noexcept { return refinements_; }
    double max_probe_error() const noexcept { return max_probe_error_; }

    double W(double t) const noexcept;
    double Phi(double t) const noexcept;
    double V(double t) const noexcept;

    struct Node {
        double t, w, dw, phi, v;
    };
    const std::vector<Node>& nodes() const noexcept { return nodes_; }

private:
    void sample(double h0, double ratio);
    double probe(int n_probes) const;
    std::size_t locate(double t) const noexcept;
    double tail_W(double t) const noexcept;
    double tail_Phi(double t) const noexcept;
    double tail_V(double t) const noexcept;

    KernelSource source_;
    double t_max_;
    double tolerance_;
    double t_switch_{0.0};
    std::size_t n_uniform_{0};
    double h0_{0.0};
    double log_ratio_{0.0};
    std::vector<Node> nodes_;
    TailModel tail_;
    int refinements_{0};
    double max_probe_error_{0.0};
};

// Tabulates W, Φ, V on a hybrid grid (uniform near 0, geometric tail) with
// exact-derivative Hermite interpolation and refines until 10³ random probes
// meet |interp − direct| ≤ tolerance·max(W(0), |direct|). Throws
// NumericalError("tabulation") if the refinement cap is hit.
KernelTable build_table(const KernelSource& source, double t_max,
                        double tolerance = kDefaultTableTolerance);

// ∫_a^b ∫_c^d W(t − s) ds dt. Throws RangeError outside [0, t_max],
// ArgumentError for empty intervals.
double segment_pair_integral(const KernelTable& table, double a, double b, double c, double d);

// Same without range or ordering checks; used by the Monte Carlo loop.
inline double segment_pair_integral_unchecked(const KernelTable& table, double a, double b,
                                              double c, double d) noexcept {
    // Grouped so that swapping the two intervals gives the identical result.
    return (table.V(b - c) + table.V(a - d)) - (table.V(a - c) + table.V(b - d));
}

struct TailFit {
    double exponent{0.0};     // p in W ~ C t^{-p}
    double coefficient{0.0};  // C
    double max_relative_deviation{0.0};
    bool conclusive{false};
    std::string note;
};

// Least-squares fit of log W against log t over [t_max/2, t_max].
TailFit tail_asymptote(const KernelSource& source, double t_max = 50.0);

std::string to_string(TailKind kind);

}  // namespace spinboson
