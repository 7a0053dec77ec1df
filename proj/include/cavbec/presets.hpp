#pragma once

// Frozen figure presets. Each preset is a list of scenarios, one per emitted
// curve, plus the qualitative features the curves are expected to show.

#include <string>
#include <string_view>
#include <vector>

#include "cavbec/config.hpp"

namespace cavbec {

inline constexpr std::string_view preset_version = "1";

struct PresetCurve {
    std::string label;
    Scenario scenario;
};

struct FigurePreset {
    std::string name;
    std::string description;
    std::vector<PresetCurve> curves;
    std::vector<std::string> expected;   // qualitative features
    std::vector<std::string> notes;
};

const std::vector<std::string>& preset_names();

// Throws Error{UnknownPreset}.
FigurePreset figure_preset(std::string_view name);

// Laboratory block of the collision study at a given omega_sw (omega_R).
PhysicalParams collision_lab(double swave);

// Laboratory block with the Stark-shifted detuning pinned to a multiple of omega_m.
PhysicalParams detuning_lab(double swave, double kappa, double detuning_over_mechanical);

}  // namespace cavbec
