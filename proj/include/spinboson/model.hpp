// model.hpp: continuum spin-boson model data and its discretization
//
// A ModelSpec describes a radial dispersion ω(|k|) and form factor
// v(k) = κ(|k|)|k|^{-α} on R^d. Everything downstream (weighted norms, the
// Ising kernel, the Fock-space Hamiltonian) only needs radial integrals
//
//     ∫ |v(k)|² g(ω(k)) dk = S_{d-1} ∫_0^R r^{d-1-2α} κ(r)² g(ω(r)) dr,
//
// which radial_integral() evaluates with the leading power singularity at
// r = 0 removed by substitution.

#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spinboson {

enum class DispersionKind { massless, massive_shift, massive_quadrature };

struct Dispersion {
    DispersionKind kind{DispersionKind::massless};
    double mass{0.0};

    double operator()(double r) const noexcept;
    // Essential infimum over k, i.e. m_ω.
    double infimum() const noexcept;
    bool operator==(const Dispersion&) const = default;
};

enum class CutoffKind { sharp, gaussian };

struct Cutoff {
    CutoffKind kind{CutoffKind::sharp};
    double parameter{1.0};  // radius Λ (sharp) or c in e^{-c|k|²} (gaussian)

    double operator()(double r) const noexcept;
    // Radius beyond which κ vanishes (sharp) or κ² < 1e-16 (gaussian).
    double support_radius() const noexcept;
    bool operator==(const Cutoff&) const = default;
};

struct ModelSpec {
    int dimension{3};
    Dispersion dispersion{};
    double alpha{0.5};
    Cutoff cutoff{};
    double lambda{0.0};
    double mu{0.0};

    // Throws ConfigError when α ∉ [0,1), the cutoff is nonpositive, the mass
    // is negative, or v fails to be square integrable.
    void validate() const;

    double omega(double r) const noexcept { return dispersion(r); }
    double form_factor(double r) const noexcept;

    // Same quantities evaluated at a momentum vector; radial by construction.
    double omega_at(std::span<const double> k) const noexcept;
    double form_factor_at(std::span<const double> k) const noexcept;

    double support_radius() const noexcept { return cutoff.support_radius(); }

    bool operator==(const ModelSpec&) const = default;
};

// Surface area of the unit sphere S^{d-1}.
double sphere_area(int dimension);

// S_{d-1} ∫_0^R r^{d-1-2α+extra_power} κ(r)² g(r) dr.
//
// `extra_power` must keep the integrand integrable at 0. `scale` is a
// characteristic radius where g varies (e.g. 1/t for e^{-t r}); breakpoints
// are placed geometrically down to it. 0 means "no special scale".
double radial_integral(const ModelSpec& spec, const std::function<double(double)>& g,
                       double extra_power = 0.0, double scale = 0.0,
                       double rel_tol = 1e-12);

// Same integral restricted to r ∈ [inner_radius, R].
double radial_integral_from(const ModelSpec& spec, double inner_radius,
                            const std::function<double(double)>& g, double extra_power = 0.0,
                            double rel_tol = 1e-12);

// True when the radial integrand of ||ω^{-s} v||² diverges at r = 0.
bool weighted_norm_diverges(const ModelSpec& spec, double s);

// ||ω^{-s} v||₂, +∞ when divergent.
double weighted_norm(const ModelSpec& spec, double s);
double weighted_norm_squared(const ModelSpec& spec, double s);

// ∫_{|k| ≥ inner_radius} |ω^{-s} v|² dk; finite for every inner_radius > 0.
double weighted_norm_squared_partial(const ModelSpec& spec, double s, double inner_radius);

enum class IrClass { infrared_regular, infrared_critical };

IrClass ir_classify(const ModelSpec& spec);

// λ_c = ||ω^{-1/2} v||₂^{-1} / √5. Throws ModelClassError if the norm is infinite.
double critical_coupling(const ModelSpec& spec);

enum class MassScheme { shift, quadrature };

// ω → ω + m (shift) or √(ω² + m²) (quadrature). Regularizing an already
// regularized spec composes within the same scheme; mixing schemes throws.
ModelSpec regularize_mass(const ModelSpec& spec, double mass, MassScheme scheme);

enum class DiscretizationScheme { uniform_radial, log_radial, gauss_legendre, manual };

struct DiscreteModes {
    std::vector<double> omega;
    std::vector<double> v;
    DiscretizationScheme scheme{DiscretizationScheme::manual};
    std::optional<ModelSpec> parent;

    std::size_t size() const noexcept { return omega.size(); }
    double min_omega() const;
    double max_omega() const;

    // Σ_j v_j² g(ω_j), the discrete stand-in for ∫|v|² g(ω) dk.
    double sum(const std::function<double(double)>& g) const;

    // Passthrough constructor for hand-built test models.
    static DiscreteModes manual(std::vector<double> omega, std::vector<double> v);
};

// Lower limit of the log-radial grid relative to the support radius.
inline constexpr double kLogRadialInnerFraction = 1e-4;

DiscreteModes discretize(const ModelSpec& spec, std::size_t n_modes,
                         DiscretizationScheme scheme);

// CSV with header `mode,omega,v`.
void write_modes_csv(const DiscreteModes& modes, std::ostream& os);

std::string to_string(DispersionKind kind);
std::string to_string(CutoffKind kind);
std::string to_string(IrClass c);
std::string to_string(MassScheme s);
std::string to_string(DiscretizationScheme s);

DispersionKind parse_dispersion(const std::string& s);
CutoffKind parse_cutoff(const std::string& s);
MassScheme parse_mass_scheme(const std::string& s);
DiscretizationScheme parse_discretization(const std::string& s);

}  // namespace spinboson
