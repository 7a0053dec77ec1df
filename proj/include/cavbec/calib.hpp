#pragma once

// Calibration of the s-wave scattering frequency from the normal-mode
// splitting of the phase-noise spectrum.
//
// A protocol freezes everything but omega_sw (cavity-pump detuning as a
// fraction of the Stark shift, drive, damping). build_curve() tabulates
// omega_sw -> splitting; estimate_omega_sw() inverts the tabulated map with a
// monotone cubic on the strictly monotone part of the curve.

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cavbec/params.hpp"
#include "cavbec/steady.hpp"

namespace cavbec {

struct CalibrationProtocol {
    PhysicalParams lab;      // swave is replaced per sample
    BranchPolicy branch;

    // N = 1e5 Rb-87, L = 187 um, 780 nm, eta = 81, kappa = 24, gamma = 1e-3 kappa,
    // Delta_c = 0.994 Delta_0.
    static CalibrationProtocol collision_study();
};

struct CalibrationSample {
    double swave = 0.0;            // omega_R
    bool stable = false;
    double split_numeric = NAN;    // omega_R
    double split_analytic = NAN;   // omega_R
    double mechanical = 0.0;       // omega_R
    double delta_d = NAN;          // omega_R
    double stark_detuning = 0.0;   // omega_R

    bool usable() const { return stable && std::isfinite(split_numeric); }
};

struct CalibrationCurve {
    CalibrationProtocol protocol;
    double recoil_rad_s = 0.0;
    double kappa = 0.0;            // omega_R
    std::vector<CalibrationSample> samples;
    // Inclusive sample-index range where the numeric splitting is strictly
    // monotone; empty below two usable samples.
    std::optional<std::pair<std::size_t, std::size_t>> monotone;
};

CalibrationSample calibration_sample(const CalibrationProtocol& protocol, double swave);

// Samples omega_sw uniformly on [swave_min, swave_max]. Throws EmptyCurve when
// no sample is stable.
CalibrationCurve build_curve(const CalibrationProtocol& protocol, double swave_min, double swave_max,
                             std::size_t n_samples, int threads = 1);

// Recomputes the monotone interval of an already tabulated curve.
std::optional<std::pair<std::size_t, std::size_t>> find_monotone_interval(
    const std::vector<CalibrationSample>& samples);

struct SwaveEstimate {
    double swave = 0.0;                 // omega_R
    double splitting = 0.0;             // the query, omega_R
    std::vector<double> preimages;      // every omega_sw with that splitting
    bool ambiguous = false;
    bool in_monotone_interval = false;
    std::size_t bracket_lower = 0;      // sample indices around the estimate
    std::size_t bracket_upper = 0;
    double sensitivity = 0.0;           // |d split / d omega_sw| at the estimate
};

// unit: RadPerSecond, Recoil or Kappa. Throws OutOfRange outside the
// tabulated splitting range and EmptyCurve for curves without usable samples.
SwaveEstimate estimate_omega_sw(const CalibrationCurve& curve, double measured_splitting, FrequencyUnit unit);

// Monotone piecewise-cubic interpolant through strictly increasing x.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;
    double derivative(double x) const;
    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }

private:
    std::vector<double> x_, y_;
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

}  // namespace cavbec
