#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ufm/experiments.hpp"

namespace ufm {

// Command-line values layered on top of a config file. Only fields the user
// actually set are populated; they override file values, which override the
// documented defaults. The UFM_SEED environment variable, when set, overrides
// the seed from every other source.
struct ConfigOverrides {
    std::optional<int> k;
    std::optional<double> R;
    std::optional<int> n_min;
    std::optional<int> d;
    std::optional<std::string> weighting;  // "vanilla" | "reweighted"
    std::optional<double> gamma;
    std::optional<std::string> init_kind;  // "spectral" | "random"
    std::optional<double> delta;
    std::optional<std::uint64_t> seed;
    std::optional<double> eta;
    std::optional<long> steps;
    std::optional<long> record_every;
    std::optional<std::vector<std::string>> outputs;
};

// Load (optionally) a JSON config file, apply overrides and the UFM_SEED
// environment variable, fill in defaults (gamma = 0.5, delta = 8, d = 2k,
// eta = 0.01/(sigma_max lambda_max), steps = ceil(3 T_max delta / eta)),
// and validate. Unknown keys and invariant violations raise ConfigError
// naming the offender.
ExperimentConfig parse_config(const std::optional<std::string>& config_path,
                              const ConfigOverrides& overrides);

// Canonical JSON serialization of a resolved config; parse_config on its
// output reproduces the config exactly (round-trip at double precision).
std::string config_to_json(const ExperimentConfig& cfg);

// FNV-1a 64-bit content hash of the canonical serialization, as fixed-width hex.
std::string config_digest(const ExperimentConfig& cfg);

const char* weighting_name(WeightingMode mode);
const char* init_kind_name(InitKind kind);

}  // namespace ufm
