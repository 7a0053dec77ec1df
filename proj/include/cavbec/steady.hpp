#pragma once

// Mean-field fixed point (alpha, beta, Delta_d) of the driven cavity + BEC.

#include <cstddef>
#include <string>
#include <vector>

#include "cavbec/params.hpp"

namespace cavbec {

struct WorkingPoint {
    double alpha = 0.0;          // sqrt(photons), >= 0
    double beta = 0.0;           // Bogoliubov mean amplitude
    double delta_d = 0.0;        // effective detuning Delta_d
    double coupling = 0.0;       // G = sqrt(2) zeta alpha
    double photons = 0.0;        // alpha^2
    bool stable = false;         // filled by classify_stability()
    double stability_margin = 0.0;
    std::size_t branch_index = 0;
    // U_0 alpha^2 > 10 omega_R: outside the single-mode Bogoliubov regime.
    bool regime_warning = false;
};

struct SteadyState {
    std::vector<WorkingPoint> points;   // sorted by photon number
    int discarded_complex = 0;
    int discarded_negative = 0;
    int merged = 0;
};

// Coefficients of the photon-number cubic
//   c3 I^3 + c2 I^2 + c1 I + c0 = 0,  I (Delta_d(I)^2 + kappa^2) = eta^2,
// with Delta_d(I) = -delta_c - shift * I.
struct PhotonCubic {
    double shift = 0.0;
    double c3 = 0.0, c2 = 0.0, c1 = 0.0, c0 = 0.0;

    double operator()(double photons) const {
        return ((c3 * photons + c2) * photons + c1) * photons + c0;
    }
};

PhotonCubic photon_cubic(const ModelParams& m);

// Builds the full working point for a given photon number.
WorkingPoint working_point_from_photons(const ModelParams& m, double photons);

SteadyState solve_steady_state(const ModelParams& m);

enum class BranchRule { OnlyStable, LowestStable, HighestStable, Index };

struct BranchPolicy {
    BranchRule rule = BranchRule::OnlyStable;
    std::size_t index = 0;
    // Under OnlyStable with several stable branches, pick the lowest one and
    // record a warning instead of failing.
    bool fallback_to_lowest = true;

    static BranchPolicy strict_only_stable() { return {BranchRule::OnlyStable, 0, false}; }
};

struct BranchSelection {
    WorkingPoint point;
    std::vector<std::string> warnings;
};

// Needs stability flags already set. Throws NoStableBranch / AmbiguousBranch.
BranchSelection select_branch(const std::vector<WorkingPoint>& points, const BranchPolicy& policy = {});

}  // namespace cavbec
