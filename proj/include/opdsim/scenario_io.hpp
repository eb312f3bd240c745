#pragma once

#include <string>
#include <vector>

#include "opdsim/bifurcation.hpp"
#include "opdsim/engine.hpp"

namespace opdsim {

struct SweepSpec {
    ThresholdParam param = ThresholdParam::u;
    std::vector<double> values;
};

// Full parsed configuration document: a scenario plus the analysis sections.
struct Config {
    Scenario scenario;
    BifurcationProblem bifurcation;
    SweepSpec sweep;
    bool has_sweep = false;
};

// Parse a config JSON document; throws std::invalid_argument with a
// field-qualified message on malformed input.
Config parse_config(const std::string& json_text);
Config load_config(const std::string& path);

// Apply "dotted.path=value" overrides to the raw JSON before parsing.
std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& overrides);

// Canonical JSON for the built-in defaults; re-parses to an identical config.
std::string dump_default_config();

// Serialize a config back to canonical JSON.
std::string dump_config(const Config& cfg);

}  // namespace opdsim
