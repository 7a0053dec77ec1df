#pragma once

// Laboratory inputs and the dimensionless model parameters derived from them.
// Everything past this header works in recoil units (omega_R = 1).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace cavbec {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double rb87_mass = 86.909180527 * atomic_mass_unit;
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

enum class FrequencyUnit { RadPerSecond, Recoil, Kappa };

std::string_view to_string(FrequencyUnit unit);
// Accepts "rad_s", "omega_R", "kappa".
FrequencyUnit parse_frequency_unit(std::string_view tag);

// A frequency with an explicit unit tag. Kappa-tagged values need the cavity
// decay rate to resolve, so they cannot be used for kappa itself.
struct Frequency {
    double value = 0.0;
    FrequencyUnit unit = FrequencyUnit::Recoil;

    static Frequency rad_s(double v) { return {v, FrequencyUnit::RadPerSecond}; }
    static Frequency recoil(double v) { return {v, FrequencyUnit::Recoil}; }
    static Frequency kappa(double v) { return {v, FrequencyUnit::Kappa}; }
};

// Detuning variants: cavity-pump detuning Delta_c, Stark-shifted detuning
// delta_c, or Delta_c given as a fraction of the Stark shift Delta_0.
struct CavityPumpDetuning { Frequency value; };
struct StarkDetuning { Frequency value; };
struct StarkShiftFraction { double fraction = 1.0; };
using DetuningSpec = std::variant<CavityPumpDetuning, StarkDetuning, StarkShiftFraction>;

// s-wave scattering frequency given directly, or through the scattering
// length together with the waist, length, atom number and mass.
struct SwaveDirect { Frequency value; };
struct SwaveFromScatteringLength { double scattering_length_m = 0.0; };
using SwaveSpec = std::variant<SwaveDirect, SwaveFromScatteringLength>;

struct PhysicalParams {
    double atom_count = 1e5;
    double cavity_length_m = 187e-6;
    double pump_wavelength_m = 780e-9;
    double cavity_frequency_rad_s = 2.41494e15;
    double atomic_frequency_rad_s = 2.41419e15;
    double vacuum_rabi_rad_s = 2.0 * constants::pi * 14.1e6;
    double mode_waist_m = 25e-6;
    double atom_mass_kg = constants::rb87_mass;
    Frequency cavity_decay = Frequency::recoil(24.0);
    Frequency bec_decay = Frequency::kappa(1e-3);
    Frequency drive = Frequency::recoil(81.0);
    DetuningSpec detuning = StarkShiftFraction{0.994};
    SwaveSpec swave = SwaveDirect{Frequency::recoil(0.0)};
};

// Throws Error{InvalidParameter} naming the first offending field.
void validate(const PhysicalParams& p);

struct ModelParams {
    double recoil_rad_s = 0.0;       // omega_R in rad/s; all fields below are in units of it
    double atom_count = 0.0;
    double lattice_depth = 0.0;      // U_0
    double stark_shift = 0.0;        // Delta_0 = N U_0 / 2
    double stark_detuning = 0.0;     // delta_c
    double swave = 0.0;              // omega_sw
    double bogoliubov = 0.0;         // Omega_c = 4 + omega_sw
    double bogoliubov_plus = 0.0;    // Omega_c + omega_sw/2
    double bogoliubov_minus = 0.0;   // Omega_c - omega_sw/2
    double mechanical = 0.0;         // omega_m
    double coupling = 0.0;           // zeta = sqrt(N) U_0 / 2
    double kappa = 0.0;
    double gamma = 0.0;
    double eta = 0.0;

    // Stable digest of every field, for provenance metadata.
    std::uint64_t hash() const;
};

// Recoil-unit inputs for building ModelParams without a laboratory block.
struct ModelInputs {
    double recoil_rad_s = 0.0;
    double atom_count = 1e5;
    double lattice_depth = 0.0;
    double stark_detuning = 0.0;
    double swave = 0.0;
    double kappa = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
};

double recoil_frequency(double wavelength_m, double mass_kg);

// omega_m = sqrt((4 + omega_sw/2)(4 + 3 omega_sw/2)) in units of omega_R.
double mechanical_frequency(double swave, double recoil = 1.0);

// 8 pi hbar a_s N / (m_a L w^2), in rad/s.
double swave_from_scattering_length(double scattering_length_m, double atom_count,
                                    double mass_kg, double length_m, double waist_m);

ModelParams make_model_params(const ModelInputs& in);
ModelParams derive_model_params(const PhysicalParams& p);

// Same laboratory block with every tagged frequency (and the detuning and
// s-wave specs) re-expressed in rad/s from an already derived model.
PhysicalParams with_si_frequencies(const PhysicalParams& p, const ModelParams& m);

}  // namespace cavbec
