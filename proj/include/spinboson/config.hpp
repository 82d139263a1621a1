// config.hpp: INI run configuration
//
//   [model]          dimension, dispersion, mass, alpha, cutoff, cutoff_parameter, lambda, mu
//   [discretization] n_modes, scheme, omega, v, n_max, N_max, regularize_mass, regularize_scheme
//   [kernel]         source, t_max, tolerance
//   [mc]             T, samples, sweeps, burn_in, seed, thinning, chains, block_size,
//                    convention, w_insert, w_delete, w_shift, w_flip, w_tail
//   [ed]             tolerance, fd_step
//   [scan]           lambdas, horizons, lambda_units
//   [output]         dir, format
//
// Unknown sections or keys are rejected. Lists are comma separated.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "spinboson/ising_mc.hpp"
#include "spinboson/kernel.hpp"
#include "spinboson/model.hpp"

namespace spinboson {

struct DiscretizationSettings {
    std::size_t n_modes{8};
    DiscretizationScheme scheme{DiscretizationScheme::gauss_legendre};
    std::vector<double> omega;  // manual scheme only
    std::vector<double> v;
    int n_max{6};
    int N_max{6};
    double regularize_mass{0.0};  // 0: no regularization
    MassScheme regularize_scheme{MassScheme::shift};

    bool operator==(const DiscretizationSettings&) const = default;
};

enum class KernelSourceKind { discrete, continuum };

struct KernelSettings {
    KernelSourceKind source{KernelSourceKind::discrete};
    double t_max{50.0};
    double tolerance{kDefaultTableTolerance};

    bool operator==(const KernelSettings&) const = default;
};

struct EdSettings {
    double tolerance{1e-10};
    double fd_step{1e-3};

    bool operator==(const EdSettings&) const = default;
};

enum class LambdaUnits { absolute, critical };

struct ScanSettings {
    std::vector<double> lambdas{0.0};
    std::vector<double> horizons{10.0, 20.0};
    LambdaUnits lambda_units{LambdaUnits::absolute};

    bool operator==(const ScanSettings&) const = default;
};

struct OutputSettings {
    std::string dir;
    std::string format{"json"};

    bool operator==(const OutputSettings&) const = default;
};

struct RunConfig {
    ModelSpec model;
    DiscretizationSettings discretization;
    KernelSettings kernel;
    McConfig mc;
    EdSettings ed;
    ScanSettings scan;
    OutputSettings output;

    bool operator==(const RunConfig&) const = default;

    // Throws ConfigError on inconsistent values.
    void validate() const;

    // Mode list: the manual lists, or the (regularized) model discretized.
    DiscreteModes modes() const;
    // Kernel source selected by [kernel] source.
    KernelSource kernel_source() const;
};

// Parses INI text; `overrides` are dotted keys ("mc.T", "10") applied on top.
RunConfig parse_config(std::istream& in,
                       const std::vector<std::pair<std::string, std::string>>& overrides = {});
RunConfig parse_config_text(const std::string& text,
                            const std::vector<std::pair<std::string, std::string>>& overrides = {});
RunConfig load_config(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides = {});

// Canonical INI: every key, fixed order, shortest round-trip number format.
std::string emit_config(const RunConfig& cfg);

// FNV-1a 64 of emit_config, as 16 hex digits.
std::string config_digest(const RunConfig& cfg);

// "key=value" → pair; throws ConfigError if there is no '='.
std::pair<std::string, std::string> split_override(const std::string& text);

std::string format_double(double x);

std::string to_string(KernelSourceKind kind);
std::string to_string(LambdaUnits units);

}  // namespace spinboson
