#include "cavbec/steady.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "cavbec/error.hpp"

namespace cavbec {

PhotonCubic photon_cubic(const ModelParams& m) {
    PhotonCubic c;
    // sqrt(2N) zeta beta = shift * alpha^2
    c.shift = m.atom_count * m.lattice_depth * m.lattice_depth /
              (4.0 * std::hypot(m.bogoliubov_plus, m.gamma));
    const double d = m.stark_detuning;
    c.c3 = c.shift * c.shift;
    c.c2 = 2.0 * d * c.shift;
    c.c1 = d * d + m.kappa * m.kappa;
    c.c0 = -m.eta * m.eta;
    return c;
}

WorkingPoint working_point_from_photons(const ModelParams& m, double photons) {
    WorkingPoint wp;
    wp.photons = photons;
    wp.alpha = std::sqrt(photons);
    wp.beta = std::sqrt(2.0) / 4.0 * m.lattice_depth * photons /
              std::hypot(m.bogoliubov_plus, m.gamma);
    wp.delta_d = -m.stark_detuning - std::sqrt(2.0 * m.atom_count) * m.coupling * wp.beta;
    wp.coupling = std::sqrt(2.0) * m.coupling * wp.alpha;
    wp.regime_warning = m.lattice_depth * photons > 10.0;
    return wp;
}

namespace {

double polish(const PhotonCubic& c, double x) {
    for (int it = 0; it < 60; ++it) {
        const double f = c(x);
        const double df = (3.0 * c.c3 * x + 2.0 * c.c2) * x + c.c1;
        if (df == 0.0) break;
        const double step = f / df;
        x -= step;
        if (std::abs(step) <= 1e-16 * std::max(std::abs(x), 1e-300)) break;
    }
    return x;
}

double residual_scale(const PhotonCubic& c, double x) {
    return std::abs(c.c3 * x * x * x) + std::abs(c.c2 * x * x) + std::abs(c.c1 * x) + std::abs(c.c0);
}

std::vector<std::complex<double>> cubic_roots(const PhotonCubic& c) {
    if (c.c3 == 0.0) {
        return {std::complex<double>(-c.c0 / c.c1, 0.0)};
    }
    Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    companion(0, 2) = -c.c0 / c.c3;
    companion(1, 2) = -c.c1 / c.c3;
    companion(2, 2) = -c.c2 / c.c3;
    Eigen::EigenSolver<Eigen::Matrix3d> es(companion, false);
    std::vector<std::complex<double>> roots;
    for (int i = 0; i < 3; ++i) roots.push_back(es.eigenvalues()(i));
    return roots;
}

}  // namespace

SteadyState solve_steady_state(const ModelParams& m) {
    SteadyState out;
    if (m.eta == 0.0) {
        out.points.push_back(working_point_from_photons(m, 0.0));
        out.discarded_complex = 2;
        return out;
    }

    const PhotonCubic cubic = photon_cubic(m);
    std::vector<double> photons;
    for (const auto& z : cubic_roots(cubic)) {
        const double mag = std::abs(z);
        if (std::abs(z.imag()) > 1e-6 * std::max(mag, 1e-12)) {
            ++out.discarded_complex;
            continue;
        }
        const double x = polish(cubic, z.real());
        if (!(std::abs(cubic(x)) <= 1e-10 * residual_scale(cubic, x))) {
            // nearly-real complex pair with no real root nearby
            ++out.discarded_complex;
            continue;
        }
        if (x < 0.0) {
            ++out.discarded_negative;
            continue;
        }
        photons.push_back(x);
    }
    std::sort(photons.begin(), photons.end());
    std::vector<double> unique;
    for (double x : photons) {
        if (!unique.empty() && std::abs(x - unique.back()) <= 1e-9 * std::max(std::abs(x), 1e-300)) {
            ++out.merged;
            continue;
        }
        unique.push_back(x);
    }
    for (std::size_t i = 0; i < unique.size(); ++i) {
        WorkingPoint wp = working_point_from_photons(m, unique[i]);
        wp.branch_index = i;
        out.points.push_back(wp);
    }
    return out;
}

BranchSelection select_branch(const std::vector<WorkingPoint>& points, const BranchPolicy& policy) {
    if (points.empty()) fail(ErrorKind::NoStableBranch, "no steady-state branches");
    BranchSelection sel;
    if (policy.rule == BranchRule::Index && policy.index >= points.size()) {
        fail(ErrorKind::InvalidParameter, "branch index out of range", "branch");
    }
    if (points.size() == 1) {
        sel.point = points.front();
        if (!sel.point.stable && policy.rule != BranchRule::Index) {
            fail(ErrorKind::NoStableBranch, "the only steady-state branch is unstable");
        }
        return sel;
    }

    std::vector<const WorkingPoint*> stable;
    for (const auto& p : points) {
        if (p.stable) stable.push_back(&p);
    }

    switch (policy.rule) {
        case BranchRule::Index:
            if (policy.index >= points.size()) {
                fail(ErrorKind::InvalidParameter, "branch index out of range", "branch");
            }
            sel.point = points[policy.index];
            if (!sel.point.stable) sel.warnings.push_back("selected branch is unstable");
            return sel;
        case BranchRule::LowestStable:
            if (stable.empty()) fail(ErrorKind::NoStableBranch, "all steady-state branches are unstable");
            sel.point = *stable.front();
            return sel;
        case BranchRule::HighestStable:
            if (stable.empty()) fail(ErrorKind::NoStableBranch, "all steady-state branches are unstable");
            sel.point = *stable.back();
            return sel;
        case BranchRule::OnlyStable:
            if (stable.empty()) fail(ErrorKind::NoStableBranch, "all steady-state branches are unstable");
            if (stable.size() > 1) {
                if (!policy.fallback_to_lowest) {
                    fail(ErrorKind::AmbiguousBranch,
                         std::to_string(stable.size()) + " stable branches coexist");
                }
                sel.warnings.push_back("AmbiguousBranch: " + std::to_string(stable.size()) +
                                       " stable branches, fell back to the lowest");
            }
            sel.point = *stable.front();
            return sel;
    }
    return sel;
}

}  // namespace cavbec
