#include "cavbec/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "cavbec/error.hpp"

namespace cavbec {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    fail(ErrorKind::InvalidParameter, field + ": " + what, field);
}

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void require_object(const json& j, const std::string& field) {
    if (!j.is_object()) bad(field.empty() ? "config" : field, "expected an object");
}

void only_keys(const json& j, const std::string& prefix, std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : j.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; })) {
            bad(join(prefix, k), "unknown key");
        }
    }
}

double get_number(const json& j, const std::string& field) {
    if (!j.is_number()) bad(field, "expected a number");
    return j.get<double>();
}

std::string get_string(const json& j, const std::string& field) {
    if (!j.is_string()) bad(field, "expected a string");
    return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& field) {
    if (!j.is_boolean()) bad(field, "expected true or false");
    return j.get<bool>();
}

std::size_t get_count(const json& j, const std::string& field) {
    if (!j.is_number_integer() || j.get<long long>() < 0) bad(field, "expected a non-negative integer");
    return j.get<std::size_t>();
}

template <class F>
void maybe(const json& j, const char* key, F&& f) {
    if (j.contains(key)) f(j.at(key));
}

}  // namespace

Frequency frequency_from_json(const json& j, const std::string& field) {
    require_object(j, field);
    only_keys(j, field, {"value", "unit"});
    if (!j.contains("value")) bad(join(field, "value"), "missing");
    if (!j.contains("unit")) bad(join(field, "unit"), "missing unit tag");
    Frequency f;
    f.value = get_number(j.at("value"), join(field, "value"));
    const std::string unit = get_string(j.at("unit"), join(field, "unit"));
    if (unit == "rad_s") f.unit = FrequencyUnit::RadPerSecond;
    else if (unit == "omega_R") f.unit = FrequencyUnit::Recoil;
    else if (unit == "kappa") f.unit = FrequencyUnit::Kappa;
    else bad(join(field, "unit"), "unknown unit '" + unit + "' (rad_s, omega_R, kappa)");
    return f;
}

json to_json(const Frequency& f) {
    json j;
    j["value"] = f.value;
    j["unit"] = std::string(to_string(f.unit));
    return j;
}

PhysicalParams physical_from_json(const json& j) {
    const std::string p = "physical";
    require_object(j, p);
    only_keys(j, p, {"atom_count", "cavity_length", "pump_wavelength", "cavity_frequency", "atomic_frequency",
                     "vacuum_rabi", "mode_waist", "atom_mass", "cavity_decay", "bec_decay", "drive",
                     "detuning", "swave"});
    PhysicalParams out;
    maybe(j, "atom_count", [&](const json& v) { out.atom_count = get_number(v, "atom_count"); });
    maybe(j, "cavity_length", [&](const json& v) { out.cavity_length_m = get_number(v, "cavity_length"); });
    maybe(j, "pump_wavelength", [&](const json& v) { out.pump_wavelength_m = get_number(v, "pump_wavelength"); });
    maybe(j, "cavity_frequency",
          [&](const json& v) { out.cavity_frequency_rad_s = get_number(v, "cavity_frequency"); });
    maybe(j, "atomic_frequency",
          [&](const json& v) { out.atomic_frequency_rad_s = get_number(v, "atomic_frequency"); });
    maybe(j, "vacuum_rabi", [&](const json& v) { out.vacuum_rabi_rad_s = get_number(v, "vacuum_rabi"); });
    maybe(j, "mode_waist", [&](const json& v) { out.mode_waist_m = get_number(v, "mode_waist"); });
    maybe(j, "atom_mass", [&](const json& v) { out.atom_mass_kg = get_number(v, "atom_mass"); });
    maybe(j, "cavity_decay", [&](const json& v) { out.cavity_decay = frequency_from_json(v, "cavity_decay"); });
    maybe(j, "bec_decay", [&](const json& v) { out.bec_decay = frequency_from_json(v, "bec_decay"); });
    maybe(j, "drive", [&](const json& v) { out.drive = frequency_from_json(v, "drive"); });
    maybe(j, "detuning", [&](const json& v) {
        require_object(v, "detuning");
        if (v.size() != 1) bad("detuning", "give exactly one of cavity_pump, stark, stark_shift_fraction");
        only_keys(v, "detuning", {"cavity_pump", "stark", "stark_shift_fraction"});
        if (v.contains("cavity_pump")) {
            out.detuning = CavityPumpDetuning{frequency_from_json(v.at("cavity_pump"), "detuning.cavity_pump")};
        } else if (v.contains("stark")) {
            out.detuning = StarkDetuning{frequency_from_json(v.at("stark"), "detuning.stark")};
        } else {
            out.detuning = StarkShiftFraction{
                get_number(v.at("stark_shift_fraction"), "detuning.stark_shift_fraction")};
        }
    });
    maybe(j, "swave", [&](const json& v) {
        require_object(v, "swave");
        if (v.size() != 1) bad("swave", "give exactly one of frequency, scattering_length");
        only_keys(v, "swave", {"frequency", "scattering_length"});
        if (v.contains("frequency")) {
            out.swave = SwaveDirect{frequency_from_json(v.at("frequency"), "swave.frequency")};
        } else {
            out.swave = SwaveFromScatteringLength{get_number(v.at("scattering_length"), "swave.scattering_length")};
        }
    });
    validate(out);
    return out;
}

json to_json(const PhysicalParams& p) {
    json j;
    j["atom_count"] = p.atom_count;
    j["cavity_length"] = p.cavity_length_m;
    j["pump_wavelength"] = p.pump_wavelength_m;
    j["cavity_frequency"] = p.cavity_frequency_rad_s;
    j["atomic_frequency"] = p.atomic_frequency_rad_s;
    j["vacuum_rabi"] = p.vacuum_rabi_rad_s;
    j["mode_waist"] = p.mode_waist_m;
    j["atom_mass"] = p.atom_mass_kg;
    j["cavity_decay"] = to_json(p.cavity_decay);
    j["bec_decay"] = to_json(p.bec_decay);
    j["drive"] = to_json(p.drive);
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, CavityPumpDetuning>) {
                j["detuning"] = {{"cavity_pump", to_json(d.value)}};
            } else if constexpr (std::is_same_v<T, StarkDetuning>) {
                j["detuning"] = {{"stark", to_json(d.value)}};
            } else {
                j["detuning"] = {{"stark_shift_fraction", d.fraction}};
            }
        },
        p.detuning);
    if (const auto* s = std::get_if<SwaveDirect>(&p.swave)) {
        j["swave"] = {{"frequency", to_json(s->value)}};
    } else {
        j["swave"] = {{"scattering_length", std::get<SwaveFromScatteringLength>(p.swave).scattering_length_m}};
    }
    return j;
}

ModelInputs model_inputs_from_json(const json& j) {
    require_object(j, "model");
    only_keys(j, "model", {"recoil_rad_s", "atom_count", "lattice_depth", "stark_detuning", "swave", "kappa",
                           "gamma", "eta"});
    ModelInputs in;
    // recoil units throughout; recoil_rad_s only labels the SI scale
    in.recoil_rad_s = recoil_frequency(780e-9, constants::rb87_mass);
    maybe(j, "recoil_rad_s", [&](const json& v) { in.recoil_rad_s = get_number(v, "recoil_rad_s"); });
    maybe(j, "atom_count", [&](const json& v) { in.atom_count = get_number(v, "atom_count"); });
    for (const char* key : {"lattice_depth", "stark_detuning", "kappa", "gamma", "eta"}) {
        if (!j.contains(key)) bad(join("model", key), "missing");
    }
    in.lattice_depth = get_number(j.at("lattice_depth"), "lattice_depth");
    in.stark_detuning = get_number(j.at("stark_detuning"), "stark_detuning");
    in.kappa = get_number(j.at("kappa"), "kappa");
    in.gamma = get_number(j.at("gamma"), "gamma");
    in.eta = get_number(j.at("eta"), "eta");
    maybe(j, "swave", [&](const json& v) { in.swave = get_number(v, "swave"); });
    if (!(in.recoil_rad_s > 0.0)) bad("recoil_rad_s", "must be > 0");
    make_model_params(in);   // validates
    return in;
}

BranchPolicy branch_from_json(const json& j) {
    require_object(j, "branch");
    only_keys(j, "branch", {"rule", "index", "fallback_to_lowest"});
    BranchPolicy b;
    maybe(j, "rule", [&](const json& v) {
        const std::string r = get_string(v, "branch.rule");
        if (r == "only_stable") b.rule = BranchRule::OnlyStable;
        else if (r == "lowest_stable") b.rule = BranchRule::LowestStable;
        else if (r == "highest_stable") b.rule = BranchRule::HighestStable;
        else if (r == "index") b.rule = BranchRule::Index;
        else bad("branch.rule", "unknown rule '" + r + "'");
    });
    maybe(j, "index", [&](const json& v) { b.index = get_count(v, "branch.index"); });
    maybe(j, "fallback_to_lowest",
          [&](const json& v) { b.fallback_to_lowest = get_bool(v, "branch.fallback_to_lowest"); });
    return b;
}

json to_json(const BranchPolicy& b) {
    static const char* names[] = {"only_stable", "lowest_stable", "highest_stable", "index"};
    json j;
    j["rule"] = names[static_cast<int>(b.rule)];
    j["index"] = b.index;
    j["fallback_to_lowest"] = b.fallback_to_lowest;
    return j;
}

std::string_view to_string(Task t) {
    switch (t) {
        case Task::Spectrum: return "spectrum";
        case Task::StabilitySweep: return "stability_sweep";
        case Task::Calibration: return "calibration";
        case Task::SteadyState: return "steady_state";
    }
    return "?";
}

Task parse_task(std::string_view s) {
    if (s == "spectrum") return Task::Spectrum;
    if (s == "stability_sweep") return Task::StabilitySweep;
    if (s == "calibration") return Task::Calibration;
    if (s == "steady_state") return Task::SteadyState;
    bad("task", "unknown task '" + std::string(s) + "'");
}

ModelParams Scenario::model_params() const {
    if (physical) return derive_model_params(*physical);
    return make_model_params(*model);
}

ModelParams Scenario::model_params_at_swave(double swave) const {
    if (physical) {
        PhysicalParams p = *physical;
        p.swave = SwaveDirect{Frequency::recoil(swave)};
        return derive_model_params(p);
    }
    ModelInputs in = *model;
    in.swave = swave;
    return make_model_params(in);
}

namespace {

Grid grid_from_json(const json& j) {
    require_object(j, "grid");
    only_keys(j, "grid", {"min", "max", "points", "unit"});
    Grid g;
    maybe(j, "min", [&](const json& v) { g.min = get_number(v, "grid.min"); });
    maybe(j, "max", [&](const json& v) { g.max = get_number(v, "grid.max"); });
    maybe(j, "points", [&](const json& v) {
        const std::size_t n = get_count(v, "grid.points");
        if (n > 10'000'000) bad("grid.points", "too many points");
        g.points = static_cast<int>(n);
    });
    maybe(j, "unit", [&](const json& v) { g.unit = parse_grid_unit(get_string(v, "grid.unit")); });
    g.validate();
    if (g.min == -g.max && g.points % 2 == 0) bad("grid.points", "symmetric grids need an odd point count");
    return g;
}

SweepSpec sweep_from_json(const json& j) {
    require_object(j, "sweep");
    only_keys(j, "sweep", {"min", "max", "points"});
    SweepSpec s;
    maybe(j, "min", [&](const json& v) { s.min = get_number(v, "sweep.min"); });
    maybe(j, "max", [&](const json& v) { s.max = get_number(v, "sweep.max"); });
    maybe(j, "points", [&](const json& v) { s.points = get_count(v, "sweep.points"); });
    if (!(s.min >= 0.0) || !(s.max >= s.min)) bad("sweep.min", "omega_sw range must satisfy 0 <= min <= max");
    if (s.points < 1 || s.points > 100'000) bad("sweep.points", "must be in [1, 100000]");
    return s;
}

void spectrum_from_json(const json& j, Scenario& s) {
    require_object(j, "spectrum");
    only_keys(j, "spectrum", {"kind", "phase", "route", "assembly"});
    maybe(j, "kind", [&](const json& v) {
        const std::string k = get_string(v, "spectrum.kind");
        if (k == "phase_noise") s.spectrum_kind = SpectrumKind::PhaseNoise;
        else if (k == "intensity") s.spectrum_kind = SpectrumKind::Intensity;
        else if (k == "squeezing") s.spectrum_kind = SpectrumKind::SqueezeOptimal;
        else bad("spectrum.kind", "unknown kind '" + k + "' (phase_noise, intensity, squeezing)");
    });
    maybe(j, "phase", [&](const json& v) {
        s.squeezing_phase = get_number(v, "spectrum.phase");
        if (!std::isfinite(*s.squeezing_phase)) bad("spectrum.phase", "must be finite");
    });
    if (s.squeezing_phase && s.spectrum_kind != SpectrumKind::SqueezeOptimal) {
        bad("spectrum.phase", "only meaningful for kind squeezing");
    }
    if (s.squeezing_phase) s.spectrum_kind = SpectrumKind::SqueezeFixedPhase;
    maybe(j, "route", [&](const json& v) {
        const std::string r = get_string(v, "spectrum.route");
        if (r == "closed_form") s.eval.route = Route::ClosedForm;
        else if (r == "transfer_matrix") s.eval.route = Route::TransferMatrix;
        else bad("spectrum.route", "unknown route '" + r + "'");
    });
    maybe(j, "assembly", [&](const json& v) {
        const std::string a = get_string(v, "spectrum.assembly");
        if (a == "full_input_output") s.eval.assembly = SqueezingAssembly::FullInputOutput;
        else if (a == "drop_input_cross_terms") s.eval.assembly = SqueezingAssembly::DropInputCrossTerms;
        else bad("spectrum.assembly", "unknown assembly '" + a + "'");
    });
}

}  // namespace

Scenario parse_scenario(const json& j, std::optional<Task> implied) {
    require_object(j, "");
    only_keys(j, "", {"task", "physical", "model", "spectrum", "grid", "branch", "sweep", "output"});
    Scenario s;
    if (j.contains("task")) {
        s.task = parse_task(get_string(j.at("task"), "task"));
        if (implied && *implied != s.task) {
            bad("task", "config task '" + std::string(to_string(s.task)) + "' does not match the command ('" +
                            std::string(to_string(*implied)) + "')");
        }
    } else if (implied) {
        s.task = *implied;
    } else {
        bad("task", "missing");
    }

    if (j.contains("physical") == j.contains("model")) {
        bad("physical", "give exactly one of a physical or a model block");
    }
    if (j.contains("physical")) s.physical = physical_from_json(j.at("physical"));
    else s.model = model_inputs_from_json(j.at("model"));

    maybe(j, "branch", [&](const json& v) { s.branch = branch_from_json(v); });
    maybe(j, "output", [&](const json& v) {
        s.basename = get_string(v, "output");
        if (s.basename.empty() || s.basename.find('/') != std::string::npos) {
            bad("output", "must be a plain file stem");
        }
    });

    switch (s.task) {
        case Task::Spectrum:
            if (j.contains("sweep")) bad("sweep", "not used by task spectrum");
            if (j.contains("spectrum")) spectrum_from_json(j.at("spectrum"), s);
            if (j.contains("grid")) s.grid = grid_from_json(j.at("grid"));
            if (s.basename.empty()) s.basename = "spectrum";
            break;
        case Task::StabilitySweep:
        case Task::Calibration:
            if (j.contains("spectrum")) bad("spectrum", "only used by task spectrum");
            if (j.contains("grid")) bad("grid", "only used by task spectrum");
            s.sweep = j.contains("sweep") ? sweep_from_json(j.at("sweep")) : SweepSpec{};
            if (s.task == Task::Calibration && !s.physical) {
                bad("physical", "calibration needs a physical block");
            }
            if (s.basename.empty()) s.basename = s.task == Task::Calibration ? "calibration" : "stability";
            break;
        case Task::SteadyState:
            if (j.contains("spectrum")) bad("spectrum", "only used by task spectrum");
            if (j.contains("grid")) bad("grid", "only used by task spectrum");
            if (j.contains("sweep")) bad("sweep", "not used by task steady_state");
            if (s.basename.empty()) s.basename = "steady";
            break;
    }
    // resolve kappa-tagged quantities now so errors surface as validation errors
    s.model_params();
    return s;
}

CalibrationProtocol protocol_from_json(const json& j) {
    require_object(j, "protocol");
    only_keys(j, "protocol", {"lab", "branch"});
    CalibrationProtocol p;
    if (!j.contains("lab")) bad("protocol.lab", "missing");
    p.lab = physical_from_json(j.at("lab"));
    maybe(j, "branch", [&](const json& v) { p.branch = branch_from_json(v); });
    return p;
}

json to_json(const CalibrationProtocol& p) {
    json j;
    j["lab"] = to_json(p.lab);
    j["branch"] = to_json(p.branch);
    return j;
}

}  // namespace cavbec
