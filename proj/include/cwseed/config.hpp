#pragma once

// Scenario configuration files (strict JSON schema with mandatory units).
//
// Dimensional values are objects {"value": ..., "unit": "..."}; a bare number
// in a dimensional field is rejected, as is any key the schema does not
// define. Everything is converted to km, s, rad, kg on load.

#include "cwseed/trajectory_builder.hpp"

#include <filesystem>
#include <string>

namespace cwseed {

struct OutputSettings {
    std::string dir = "out";
    int control_samples_per_segment = 10;
    int seed_steps_per_rev = 10;
    int trajectory_min_rows = 1000;
    int trajectory_rows_per_rev = 20;

    friend bool operator==(const OutputSettings&, const OutputSettings&) = default;
};

struct ScenarioConfig {
    Scenario scenario;
    SolverSettings solver;
    OutputSettings output;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Throws ParseError for malformed JSON and ValidationError (naming the
/// offending key) for schema, unit or invariant violations.
ScenarioConfig parse_scenario_config(const std::string& text);

ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// Convenience wrapper returning only the scenario.
Scenario load_scenario(const std::filesystem::path& path);

/// Serializes in canonical units (km, s, rad) so that reloading yields an
/// identical configuration.
std::string format_scenario_config(const ScenarioConfig& config);

void write_scenario_config(const ScenarioConfig& config, const std::filesystem::path& path);

ScenarioKind parse_kind(const std::string& text);

}  // namespace cwseed
