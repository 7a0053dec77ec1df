#pragma once

#include <cmath>
#include <random>

#include "cavbec/lindyn.hpp"
#include "cavbec/presets.hpp"
#include "cavbec/spectra.hpp"
#include "cavbec/steady.hpp"

namespace testing {

using namespace cavbec;

struct Operating {
    ModelParams m;
    WorkingPoint wp;
};

inline Operating at(const PhysicalParams& lab) {
    Operating o;
    o.m = derive_model_params(lab);
    auto st = solve_steady_state(o.m);
    classify_stability(o.m, st.points);
    o.wp = select_branch(st.points).point;
    return o;
}

inline Operating collision(double swave) { return at(collision_lab(swave)); }

// Random stable operating point in recoil units. Rejection-samples until the
// selected branch is stable.
inline Operating random_stable(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        ModelInputs in;
        in.recoil_rad_s = 2.37e4;
        in.atom_count = 2e4 + 2e5 * u(rng);
        in.lattice_depth = 0.2 + 0.5 * u(rng);
        in.swave = 120.0 * u(rng);
        in.kappa = 10.0 + 70.0 * u(rng);
        in.gamma = in.kappa * std::pow(10.0, -3.0 + 2.0 * u(rng));
        in.eta = 10.0 + 140.0 * u(rng);
        const double wm = mechanical_frequency(in.swave);
        in.stark_detuning = wm * (0.3 + 3.0 * u(rng));
        Operating o;
        o.m = make_model_params(in);
        auto st = solve_steady_state(o.m);
        classify_stability(o.m, st.points);
        for (const auto& p : st.points) {
            if (p.stable) {
                o.wp = p;
                return o;
            }
        }
    }
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
