#pragma once

// Output-field spectra of the cavity: phase noise, intensity and quadrature
// squeezing. Two independent evaluation routes are provided:
//
//  * ClosedForm: scalar expressions in the susceptibility chi(omega) and the
//    input coefficients f_i / g_i.
//  * TransferMatrix: u(omega) = (i omega I - M)^-1 n(omega) from the drift
//    matrix, with all correlators assembled from the input diffusion matrix.
//
// Fourier convention: dF(t) = (1/2pi) int dF(omega) exp(+i omega t) d omega,
// so d/dt maps to +i omega. Delta functions are cancelled analytically; every
// spectrum is a density.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cavbec/lindyn.hpp"
#include "cavbec/params.hpp"
#include "cavbec/steady.hpp"

namespace cavbec {

using cplx = std::complex<double>;

// Input noise. Only the vacuum (both occupancies zero) is accepted by the
// spectrum functions; the fields exist so the restriction is explicit.
struct NoiseModel {
    double photon_occupancy = 0.0;      // n_ph
    double bogoliubov_occupancy = 0.0;  // n_c

    // <xi_i(w) xi_j(w')> = pi delta(w + w') V_ij over the input quadratures
    // (X_a^in, P_a^in, X_c^in, P_c^in).
    Eigen::Matrix4cd quadrature_correlation() const;
    void require_vacuum() const;
};

enum class SpectrumKind { PhaseNoise, Intensity, SqueezeFixedPhase, SqueezeOptimal, OptimalPhase };
enum class Route { ClosedForm, TransferMatrix };
enum class GridUnit { Recoil, Kappa, Mechanical };

// How the output-field correlators entering the squeezing spectrum are built
// from intracavity ones.
enum class SqueezingAssembly {
    // a_out = sqrt(2 kappa) a - a_in with all system/input cross-correlators.
    FullInputOutput,
    // C_out = 2 kappa C (+1 for the anti-normal term), cross terms dropped.
    DropInputCrossTerms,
};

std::string_view to_string(SpectrumKind kind);
std::string_view to_string(Route route);
std::string_view to_string(GridUnit unit);
GridUnit parse_grid_unit(std::string_view tag);   // "omega_R", "kappa", "omega_m"

struct Grid {
    double min = -6.0;
    double max = 6.0;
    int points = 4001;
    GridUnit unit = GridUnit::Kappa;

    static Grid symmetric(double half_width, int points, GridUnit unit) {
        return {-half_width, half_width, points, unit};
    }
    // Throws InvalidParameter for fewer than 3 points or min >= max.
    void validate() const;
    std::vector<double> values() const;   // in display units
    double step() const { return (max - min) / (points - 1); }
};

// Display unit -> omega_R.
double unit_scale(GridUnit unit, const ModelParams& m);

struct SpectrumSeries {
    SpectrumKind kind = SpectrumKind::PhaseNoise;
    double phase = 0.0;                 // SqueezeFixedPhase only
    GridUnit unit = GridUnit::Kappa;
    std::vector<double> omega;          // display units
    std::vector<double> values;
    std::uint64_t model_hash = 0;
    WorkingPoint working_point;
    Route route = Route::ClosedForm;
    // Grid indices where |C_aa^out| < 1e-14 and the optimal phase is undefined.
    std::vector<std::size_t> undefined_phase;
};

struct EvalOptions {
    Route route = Route::ClosedForm;
    SqueezingAssembly assembly = SqueezingAssembly::FullInputOutput;
    int threads = 1;
};

// ---- closed-form route, single frequency (omega in units of omega_R) ----

// chi = [(gamma + i w)^2 + w_m^2 + G^2 Delta_d Omega_- / (Delta_d^2 + (kappa + i w)^2)]^-1.
// Throws PoleOnGrid when |chi^-1| < 1e-12.
cplx susceptibility(double omega, const ModelParams& m, const WorkingPoint& wp);

// Phase-quadrature coefficients over (X_a^in, P_a^in, X_c^in, P_c^in).
std::array<cplx, 4> coeffs_f(double omega, const ModelParams& m, const WorkingPoint& wp);

// Field coefficients over (a_in, a_in^dag, X_c^in, P_c^in):
// da(w) = chi(w) sum_i g_i(w) in_i(w).
std::array<cplx, 4> coeffs_g(double omega, const ModelParams& m, const WorkingPoint& wp);

double phase_noise_at(double omega, const ModelParams& m, const WorkingPoint& wp);
double intensity_at(double omega, const ModelParams& m, const WorkingPoint& wp);

// Symmetrized output-field correlators C^(out)(omega).
struct FieldCorrelators {
    cplx aa;
    cplx adag_adag;
    cplx a_adag;
    cplx adag_a;
};

FieldCorrelators output_correlators(double omega, const ModelParams& m, const WorkingPoint& wp,
                                    SqueezingAssembly assembly = SqueezingAssembly::FullInputOutput);

struct SqueezingPoint {
    double optimal = 0.0;        // S_opt
    double optimal_phase = 0.0;  // phi_opt in (-pi/2, pi/2]
    bool phase_defined = true;
};

SqueezingPoint optimal_squeezing(const FieldCorrelators& c);
double squeezing_at_phase(const FieldCorrelators& c, double phase);

// ---- transfer-matrix route ----

struct TransferCorrelators {
    // C_xy over (X_a, P_a, X_c, P_c), symmetrized over +-omega.
    Eigen::Matrix4cd quadrature;
    FieldCorrelators intracavity;
    FieldCorrelators output;   // full input-output relation
};

// Throws SingularResolvent when i omega is an eigenvalue of M.
TransferCorrelators transfer_matrix_correlators(double omega, const DriftMatrix& m,
                                                const NoiseModel& noise = {});

double phase_noise_transfer(const TransferCorrelators& t, double kappa);
double intensity_transfer(const TransferCorrelators& t, double kappa);
FieldCorrelators output_from_transfer(const TransferCorrelators& t, double kappa,
                                      SqueezingAssembly assembly);

// ---- spectra on a grid ----

SpectrumSeries phase_noise_spectrum(const Grid& grid, const ModelParams& m, const WorkingPoint& wp,
                                    const NoiseModel& noise = {}, const EvalOptions& opt = {});
SpectrumSeries intensity_spectrum(const Grid& grid, const ModelParams& m, const WorkingPoint& wp,
                                  const NoiseModel& noise = {}, const EvalOptions& opt = {});

struct SqueezingSpectra {
    SpectrumSeries spectrum;        // SqueezeOptimal or SqueezeFixedPhase
    SpectrumSeries optimal_phase;   // OptimalPhase (empty values for fixed phase)
};

// std::nullopt phase selects the optimal quadrature.
SqueezingSpectra squeezing_spectrum(const Grid& grid, const ModelParams& m, const WorkingPoint& wp,
                                    std::optional<double> phase = std::nullopt,
                                    const NoiseModel& noise = {}, const EvalOptions& opt = {});

// Indices of strict local maxima / minima of a sampled series.
std::vector<std::size_t> local_maxima(const std::vector<double>& values);
std::vector<std::size_t> local_minima(const std::vector<double>& values);

}  // namespace cavbec
