#pragma once

// JSON scenario configs. Frequencies are unit-tagged objects
//   {"value": 24, "unit": "omega_R"}      unit in {"rad_s", "omega_R", "kappa"}
// Lengths, masses and the bare optical frequencies are plain SI numbers.

#include <optional>
#include <string>

#include "cavbec/calib.hpp"
#include "cavbec/params.hpp"
#include "cavbec/serialize.hpp"
#include "cavbec/spectra.hpp"
#include "cavbec/steady.hpp"

namespace cavbec {

Frequency frequency_from_json(const json& j, const std::string& field);
json to_json(const Frequency& f);

PhysicalParams physical_from_json(const json& j);
json to_json(const PhysicalParams& p);

ModelInputs model_inputs_from_json(const json& j);

BranchPolicy branch_from_json(const json& j);
json to_json(const BranchPolicy& b);

enum class Task { Spectrum, StabilitySweep, Calibration, SteadyState };

std::string_view to_string(Task t);
Task parse_task(std::string_view s);

struct SweepSpec {
    double min = 0.0;
    double max = 120.0;
    std::size_t points = 121;
};

struct Scenario {
    Task task = Task::Spectrum;
    // exactly one of these is set
    std::optional<PhysicalParams> physical;
    std::optional<ModelInputs> model;

    SpectrumKind spectrum_kind = SpectrumKind::PhaseNoise;
    std::optional<double> squeezing_phase;   // fixed-phase squeezing when set
    Grid grid;
    EvalOptions eval;
    BranchPolicy branch;
    std::optional<SweepSpec> sweep;          // stability_sweep, calibration
    std::string basename;                    // output file stem

    ModelParams model_params() const;
    ModelParams model_params_at_swave(double swave) const;
};

// Throws Error{InvalidParameter} with the offending field on schema errors.
// implied supplies the task when the config omits it; a config naming a
// different task is rejected.
Scenario parse_scenario(const json& j, std::optional<Task> implied = std::nullopt);

CalibrationProtocol protocol_from_json(const json& j);
json to_json(const CalibrationProtocol& p);

}  // namespace cavbec
