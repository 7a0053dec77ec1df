#include "cavbec/params.hpp"

#include <bit>
#include <cmath>

#include "cavbec/error.hpp"

namespace cavbec {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidParameter: return "InvalidParameter";
        case ErrorKind::UnknownPreset: return "UnknownPreset";
        case ErrorKind::NoStableBranch: return "NoStableBranch";
        case ErrorKind::AmbiguousBranch: return "AmbiguousBranch";
        case ErrorKind::InconsistentStability: return "InconsistentStability";
        case ErrorKind::OverdampedMode: return "OverdampedMode";
        case ErrorKind::ComplexRoot: return "ComplexRoot";
        case ErrorKind::NegativeSquare: return "NegativeSquare";
        case ErrorKind::PoleOnGrid: return "PoleOnGrid";
        case ErrorKind::SingularResolvent: return "SingularResolvent";
        case ErrorKind::EmptyCurve: return "EmptyCurve";
        case ErrorKind::OutOfRange: return "OutOfRange";
    }
    return "Unknown";
}

bool is_validation(ErrorKind kind) {
    return kind == ErrorKind::InvalidParameter || kind == ErrorKind::UnknownPreset;
}

std::string_view to_string(FrequencyUnit unit) {
    switch (unit) {
        case FrequencyUnit::RadPerSecond: return "rad_s";
        case FrequencyUnit::Recoil: return "omega_R";
        case FrequencyUnit::Kappa: return "kappa";
    }
    return "?";
}

FrequencyUnit parse_frequency_unit(std::string_view tag) {
    if (tag == "rad_s") return FrequencyUnit::RadPerSecond;
    if (tag == "omega_R") return FrequencyUnit::Recoil;
    if (tag == "kappa") return FrequencyUnit::Kappa;
    fail(ErrorKind::InvalidParameter, "unknown frequency unit '" + std::string(tag) + "'", "unit");
}

namespace {

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) fail(ErrorKind::InvalidParameter, std::string(field) + ": " + what, field);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

// Converts a tagged frequency to recoil units. kappa_recoil is NaN while the
// decay rate itself is being resolved.
double to_recoil(const Frequency& f, double recoil_rad_s, double kappa_recoil, const char* field) {
    switch (f.unit) {
        case FrequencyUnit::RadPerSecond: return f.value / recoil_rad_s;
        case FrequencyUnit::Recoil: return f.value;
        case FrequencyUnit::Kappa:
            require(std::isfinite(kappa_recoil), field, "cannot be expressed in units of kappa");
            return f.value * kappa_recoil;
    }
    return f.value;
}

}  // namespace

void validate(const PhysicalParams& p) {
    require(std::isfinite(p.atom_count) && p.atom_count >= 1.0, "atom_count", "must be >= 1");
    require(finite_positive(p.cavity_length_m), "cavity_length", "must be > 0");
    require(finite_positive(p.pump_wavelength_m), "pump_wavelength", "must be > 0");
    require(finite_positive(p.mode_waist_m), "mode_waist", "must be > 0");
    require(finite_positive(p.atom_mass_kg), "atom_mass", "must be > 0");
    require(finite_positive(p.vacuum_rabi_rad_s), "vacuum_rabi", "must be > 0");
    require(std::isfinite(p.cavity_frequency_rad_s) && std::isfinite(p.atomic_frequency_rad_s),
            "cavity_frequency", "must be finite");
    require(p.cavity_frequency_rad_s > p.atomic_frequency_rad_s, "atomic_frequency",
            "dispersive regime requires cavity_frequency > atomic_frequency");
    require(p.cavity_decay.unit != FrequencyUnit::Kappa, "cavity_decay", "cannot be given in units of kappa");
    require(finite_positive(p.cavity_decay.value), "cavity_decay", "must be > 0");
    require(finite_positive(p.bec_decay.value), "bec_decay", "must be > 0");
    require(std::isfinite(p.drive.value) && p.drive.value >= 0.0, "drive", "must be >= 0");
    if (const auto* s = std::get_if<SwaveDirect>(&p.swave)) {
        require(std::isfinite(s->value.value) && s->value.value >= 0.0, "swave", "must be >= 0");
    } else {
        const double a = std::get<SwaveFromScatteringLength>(p.swave).scattering_length_m;
        require(std::isfinite(a) && a >= 0.0, "scattering_length", "must be >= 0");
    }
    if (const auto* f = std::get_if<StarkShiftFraction>(&p.detuning)) {
        require(std::isfinite(f->fraction), "detuning", "fraction must be finite");
    }
}

double recoil_frequency(double wavelength_m, double mass_kg) {
    const double k = 2.0 * constants::pi / wavelength_m;
    return constants::hbar * k * k / (2.0 * mass_kg);
}

double mechanical_frequency(double swave, double recoil) {
    if (!(swave >= 0.0)) fail(ErrorKind::InvalidParameter, "omega_sw must be >= 0", "swave");
    return std::sqrt((4.0 * recoil + 0.5 * swave) * (4.0 * recoil + 1.5 * swave));
}

double swave_from_scattering_length(double scattering_length_m, double atom_count,
                                    double mass_kg, double length_m, double waist_m) {
    return 8.0 * constants::pi * constants::hbar * scattering_length_m * atom_count /
           (mass_kg * length_m * waist_m * waist_m);
}

ModelParams make_model_params(const ModelInputs& in) {
    require(std::isfinite(in.atom_count) && in.atom_count >= 1.0, "atom_count", "must be >= 1");
    require(finite_positive(in.lattice_depth), "lattice_depth", "must be > 0");
    require(std::isfinite(in.swave) && in.swave >= 0.0, "swave", "must be >= 0");
    require(finite_positive(in.kappa), "kappa", "must be > 0");
    require(finite_positive(in.gamma), "gamma", "must be > 0");
    require(std::isfinite(in.eta) && in.eta >= 0.0, "eta", "must be >= 0");
    require(std::isfinite(in.stark_detuning), "stark_detuning", "must be finite");

    ModelParams m;
    m.recoil_rad_s = in.recoil_rad_s;
    m.atom_count = in.atom_count;
    m.lattice_depth = in.lattice_depth;
    m.stark_shift = 0.5 * in.atom_count * in.lattice_depth;
    m.stark_detuning = in.stark_detuning;
    m.swave = in.swave;
    m.bogoliubov = 4.0 + in.swave;
    m.bogoliubov_plus = m.bogoliubov + 0.5 * in.swave;
    m.bogoliubov_minus = m.bogoliubov - 0.5 * in.swave;
    m.mechanical = std::sqrt(m.bogoliubov_plus * m.bogoliubov_minus);
    m.coupling = 0.5 * std::sqrt(in.atom_count) * in.lattice_depth;
    m.kappa = in.kappa;
    m.gamma = in.gamma;
    m.eta = in.eta;
    return m;
}

ModelParams derive_model_params(const PhysicalParams& p) {
    validate(p);
    const double recoil = recoil_frequency(p.pump_wavelength_m, p.atom_mass_kg);
    // Delta_a taken at the cavity frequency; the pump offset is below 0.2%.
    const double atomic_detuning = p.cavity_frequency_rad_s - p.atomic_frequency_rad_s;

    ModelInputs in;
    in.recoil_rad_s = recoil;
    in.atom_count = p.atom_count;
    in.lattice_depth = p.vacuum_rabi_rad_s * p.vacuum_rabi_rad_s / atomic_detuning / recoil;
    in.kappa = to_recoil(p.cavity_decay, recoil, NAN, "cavity_decay");
    in.gamma = to_recoil(p.bec_decay, recoil, in.kappa, "bec_decay");
    in.eta = to_recoil(p.drive, recoil, in.kappa, "drive");

    if (const auto* s = std::get_if<SwaveDirect>(&p.swave)) {
        in.swave = to_recoil(s->value, recoil, in.kappa, "swave");
    } else {
        const double a = std::get<SwaveFromScatteringLength>(p.swave).scattering_length_m;
        in.swave = swave_from_scattering_length(a, p.atom_count, p.atom_mass_kg, p.cavity_length_m,
                                                p.mode_waist_m) / recoil;
    }

    const double stark_shift = 0.5 * in.atom_count * in.lattice_depth;
    in.stark_detuning = std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, CavityPumpDetuning>) {
                return -to_recoil(d.value, recoil, in.kappa, "detuning") + stark_shift;
            } else if constexpr (std::is_same_v<T, StarkDetuning>) {
                return to_recoil(d.value, recoil, in.kappa, "detuning");
            } else {
                return -d.fraction * stark_shift + stark_shift;
            }
        },
        p.detuning);

    return make_model_params(in);
}

PhysicalParams with_si_frequencies(const PhysicalParams& p, const ModelParams& m) {
    PhysicalParams out = p;
    const double w = m.recoil_rad_s;
    out.cavity_decay = Frequency::rad_s(m.kappa * w);
    out.bec_decay = Frequency::rad_s(m.gamma * w);
    out.drive = Frequency::rad_s(m.eta * w);
    out.swave = SwaveDirect{Frequency::rad_s(m.swave * w)};
    out.detuning = CavityPumpDetuning{Frequency::rad_s((m.stark_shift - m.stark_detuning) * w)};
    return out;
}

std::uint64_t ModelParams::hash() const {
    // FNV-1a over the raw bit patterns
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](double v) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    for (double v : {recoil_rad_s, atom_count, lattice_depth, stark_shift, stark_detuning, swave,
                     bogoliubov, bogoliubov_plus, bogoliubov_minus, mechanical, coupling, kappa,
                     gamma, eta}) {
        mix(v);
    }
    return h;
}

}  // namespace cavbec
