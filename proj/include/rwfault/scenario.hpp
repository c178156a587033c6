#pragma once

#include "rwfault/controller.hpp"
#include "rwfault/guidance.hpp"
#include "rwfault/plant.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rwfault {

struct ScenarioConfig {
    std::string name;
    RwaConfig rwa;
    VecX phi_true;
    ControllerGains gains;
    VecX theta_init;
    OrbitConfig orbit;
    GuidanceSchedule schedule;
    PlantState initial;
    double dt = 0.1;
    double duration = 4000.0;
    int controller_decimation = 1; ///< plant steps per controller update
    double mass = 25.0;            ///< [kg], informational only
    std::string output;            ///< default telemetry path, may be empty

    int n_wheels() const { return rwa.n_wheels(); }
};

struct PresetInfo {
    std::string name;
    std::string description;
};

namespace scenario {

const std::vector<PresetInfo>& presets();

/// Throws ValidationError for unknown names.
ScenarioConfig preset(std::string_view name);

/// Parses and validates a JSON scenario document.
ScenarioConfig load_config_text(std::string_view text);

/// Loads `path_or_preset`: a preset name if one matches, otherwise a file.
ScenarioConfig load_config(const std::string& path_or_preset);

/// Enforces every invariant of the scenario. Throws ValidationError naming the field.
void validate(const ScenarioConfig& cfg);

/// Dimension and sign checks only; used by the engine so that degenerate
/// runs (e.g. zero duration) are still possible.
void validate_structure(const ScenarioConfig& cfg);

std::string to_json(const ScenarioConfig& cfg);

} // namespace scenario
} // namespace rwfault
