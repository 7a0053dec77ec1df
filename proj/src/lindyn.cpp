#include "cavbec/lindyn.hpp"

#include <algorithm>
#include <functional>

#include <Eigen/Eigenvalues>

#include "cavbec/error.hpp"

namespace cavbec {

DriftMatrix drift_matrix(const ModelParams& m, const WorkingPoint& wp) {
    const double k = m.kappa, g = m.gamma, d = wp.delta_d, G = wp.coupling;
    DriftMatrix out;
    out.drift << -k, -d, 0.0, 0.0,
                  d, -k, -G, 0.0,
                  0.0, 0.0, -g, m.bogoliubov_minus,
                 -G, 0.0, -m.bogoliubov_plus, -g;
    out.noise_gain << 2.0 * k, 2.0 * k, 2.0 * g, 2.0 * g;
    return out;
}

std::array<double, 4> characteristic_polynomial(const Eigen::Matrix4d& a) {
    // M_k = A M_{k-1} + c_{k-1} I,  c_k = -tr(A M_k) / k
    std::array<double, 4> c{};
    Eigen::Matrix4d mk = Eigen::Matrix4d::Identity();
    double prev = 1.0;
    for (int k = 1; k <= 4; ++k) {
        if (k > 1) mk = a * mk + prev * Eigen::Matrix4d::Identity();
        const double ck = -(a * mk).trace() / k;
        c[k - 1] = ck;
        prev = ck;
    }
    return c;
}

std::array<std::complex<double>, 4> eigenvalues(const DriftMatrix& m) {
    Eigen::EigenSolver<Eigen::Matrix4d> es(m.drift, false);

    std::array<std::complex<double>, 4> out{};
    int n = 0;
    for (int i = 0; i < 4; ++i) {
        const auto z = es.eigenvalues()(i);
        if (z.imag() < 0.0) continue;
        out[n++] = z;
        if (z.imag() != 0.0) out[n++] = std::conj(z);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.imag() != b.imag() ? a.imag() > b.imag() : a.real() > b.real();
    });
    return out;
}

bool routh_hurwitz_stable(const std::array<double, 4>& c) {
    const double a1 = c[0], a2 = c[1], a3 = c[2], a4 = c[3];
    if (!(a1 > 0.0 && a2 > 0.0 && a3 > 0.0 && a4 > 0.0)) return false;
    const double h2 = a1 * a2 - a3;
    if (!(h2 > 0.0)) return false;
    return h2 * a3 - a1 * a1 * a4 > 0.0;
}

StabilityReport is_stable(const DriftMatrix& m) {
    StabilityReport r;
    r.eigenvalues = eigenvalues(m);
    r.margin = -INFINITY;
    for (const auto& z : r.eigenvalues) r.margin = std::max(r.margin, z.real());
    r.routh_hurwitz = routh_hurwitz_stable(characteristic_polynomial(m.drift));
    const bool by_eigen = r.margin < -1e-10;
    if (by_eigen != r.routh_hurwitz && std::abs(r.margin) > 1e-8) {
        fail(ErrorKind::InconsistentStability,
             "eigenvalue and Routh-Hurwitz stability verdicts disagree (margin " +
                 std::to_string(r.margin) + ")");
    }
    r.stable = by_eigen && r.routh_hurwitz;
    return r;
}

void classify_stability(const ModelParams& m, std::vector<WorkingPoint>& points) {
    for (auto& p : points) {
        const auto r = is_stable(drift_matrix(m, p));
        p.stable = r.stable;
        p.stability_margin = r.margin;
    }
}

namespace {

std::vector<double> positive_imag_parts(const std::array<std::complex<double>, 4>& ev) {
    double scale = 0.0;
    for (const auto& z : ev) scale = std::max(scale, std::abs(z));
    std::vector<double> out;
    for (const auto& z : ev) {
        if (z.imag() > 1e-12 * scale) out.push_back(z.imag());
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

}  // namespace

double numeric_splitting(const DriftMatrix& m) {
    const auto im = positive_imag_parts(eigenvalues(m));
    if (im.size() != 2) {
        fail(ErrorKind::OverdampedMode, "a normal mode is overdamped (real eigenvalue pair)");
    }
    return im.front() - im.back();
}

AnalyticPeaks analytic_peaks(const ModelParams& m, const WorkingPoint& wp) {
    const double wm2 = m.mechanical * m.mechanical;
    const double d2 = wp.delta_d * wp.delta_d;
    const double g2 = wp.coupling * wp.coupling;
    const double inner = (wm2 - d2) * (wm2 - d2) - 4.0 * g2 * wp.delta_d * m.bogoliubov_minus;
    if (inner < 0.0) {
        fail(ErrorKind::ComplexRoot, "normal-mode radicand is negative (" + std::to_string(inner) + ")");
    }
    const double root = std::sqrt(inner);
    const double upper2 = 0.5 * (wm2 + d2) + 0.5 * root;
    const double lower2 = 0.5 * (wm2 + d2) - 0.5 * root;
    if (upper2 < 0.0 || lower2 < 0.0) {
        fail(ErrorKind::NegativeSquare, "squared normal-mode frequency is negative");
    }
    return {std::sqrt(upper2), std::sqrt(lower2)};
}

ModeReport mode_report(const ModelParams& m, const WorkingPoint& wp) {
    const auto dm = drift_matrix(m, wp);
    const auto st = is_stable(dm);
    ModeReport r;
    r.eigenvalues = st.eigenvalues;
    r.stable = st.stable;
    r.margin = st.margin;
    r.positive_imag_parts = positive_imag_parts(st.eigenvalues);
    if (r.positive_imag_parts.size() == 2) {
        r.numeric_splitting = r.positive_imag_parts[0] - r.positive_imag_parts[1];
    }
    try {
        const auto peaks = analytic_peaks(m, wp);
        r.analytic_upper = peaks.upper;
        r.analytic_lower = peaks.lower;
        r.analytic_splitting = peaks.splitting();
    } catch (const Error&) {
        // left as NaN
    }
    return r;
}

}  // namespace cavbec
