// config.hpp — Flat typed key-value scenario configuration: parsing,
// validation, bundled presets.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "ohe/baths.hpp"
#include "ohe/fock.hpp"

namespace ohe::config {

enum class Pipeline { oracle, analytic, compare };

struct StateEntry {
    std::string label;
    hilbert::StateSpec spec;
};

struct ScenarioConfig {
    std::string name = "scenario";
    baths::EngineParams params;
    std::vector<StateEntry> states;
    double t_end = 10.0;
    std::size_t samples = 101;
    Pipeline pipeline = Pipeline::analytic;
    std::size_t dim_o = 6;
    std::size_t dim_m = 20;
    unsigned long seed = 1;

    // raw key-value view, kept for parameter sweeps
    std::map<std::string, std::string> raw;

    std::vector<double> time_grid() const;
};

// Parses the flat `key = value` format ('#' comments, dotted sections).
// Unknown keys are rejected; all module-level preconditions checkable at
// parse time are enforced here. Throws std::invalid_argument with key paths.
ScenarioConfig parse_config(const std::string& text, const std::string& name = "scenario");

// Rebuild a config from a patched key-value map (used by sweeps).
ScenarioConfig config_from_map(std::map<std::string, std::string> kv,
                               const std::string& name = "scenario");

// Resolves a bundled preset name or reads a file.
ScenarioConfig load_config(const std::string& path_or_name);

std::vector<std::string> bundled_names();
const std::string& bundled_text(const std::string& name); // throws if unknown

// True if `key` names a sweepable scalar (floating-point) config entry.
bool is_scalar_key(const std::string& key);

} // namespace ohe::config
