#pragma once

// Linearized fluctuation dynamics u' = M u + n over the quadrature basis
// (dX_a, dP_a, dX_c, dP_c): drift matrix, stability, normal-mode peaks.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Core>

#include "cavbec/params.hpp"
#include "cavbec/steady.hpp"

namespace cavbec {

struct DriftMatrix {
    Eigen::Matrix4d drift;
    // Diagonal (2 kappa, 2 kappa, 2 gamma, 2 gamma): squared noise gains of
    // the input quadratures.
    Eigen::Vector4d noise_gain;
};

DriftMatrix drift_matrix(const ModelParams& m, const WorkingPoint& wp);

// det(lambda I - A) = lambda^4 + c[0] lambda^3 + c[1] lambda^2 + c[2] lambda + c[3],
// by Faddeev-LeVerrier.
std::array<double, 4> characteristic_polynomial(const Eigen::Matrix4d& a);

// Roots of the characteristic quartic (companion matrix, Newton-polished).
std::array<std::complex<double>, 4> eigenvalues(const DriftMatrix& m);

// Routh-Hurwitz test for the monic quartic above.
bool routh_hurwitz_stable(const std::array<double, 4>& c);

struct StabilityReport {
    bool stable = false;
    double margin = 0.0;          // max real part of the eigenvalues
    bool routh_hurwitz = false;
    std::array<std::complex<double>, 4> eigenvalues{};
};

// Real parts within 1e-10 of zero count as unstable. Throws
// InconsistentStability when the two routes disagree and |margin| > 1e-8.
StabilityReport is_stable(const DriftMatrix& m);

// Sets stable/stability_margin on every point.
void classify_stability(const ModelParams& m, std::vector<WorkingPoint>& points);

// Difference of the two positive imaginary parts. Throws OverdampedMode.
double numeric_splitting(const DriftMatrix& m);

struct AnalyticPeaks {
    double upper = 0.0;   // omega_+
    double lower = 0.0;   // omega_-
    double splitting() const { return upper - lower; }
};

// Damping-free roots of D(omega). Throws ComplexRoot / NegativeSquare.
AnalyticPeaks analytic_peaks(const ModelParams& m, const WorkingPoint& wp);

struct ModeReport {
    std::array<std::complex<double>, 4> eigenvalues{};
    bool stable = false;
    double margin = 0.0;
    std::vector<double> positive_imag_parts;   // descending
    double numeric_splitting = NAN;            // NaN when overdamped
    double analytic_upper = NAN;
    double analytic_lower = NAN;
    double analytic_splitting = NAN;           // NaN when the damping-free roots are not real
};

ModeReport mode_report(const ModelParams& m, const WorkingPoint& wp);

}  // namespace cavbec
