#include "cavbec/spectra.hpp"

#include <cmath>
#include <thread>

#include <Eigen/LU>

#include "cavbec/error.hpp"

namespace cavbec {

namespace {

constexpr cplx I{0.0, 1.0};
const double kSqrt2 = std::sqrt(2.0);

using Vec4 = Eigen::Matrix<cplx, 4, 1>;

}  // namespace

Eigen::Matrix4cd NoiseModel::quadrature_correlation() const {
    Eigen::Matrix4cd v = Eigen::Matrix4cd::Zero();
    const double na = 2.0 * photon_occupancy + 1.0;
    const double nc = 2.0 * bogoliubov_occupancy + 1.0;
    v(0, 0) = na; v(1, 1) = na; v(0, 1) = I; v(1, 0) = -I;
    v(2, 2) = nc; v(3, 3) = nc; v(2, 3) = I; v(3, 2) = -I;
    return v;
}

void NoiseModel::require_vacuum() const {
    if (photon_occupancy != 0.0) {
        fail(ErrorKind::InvalidParameter, "thermal photon occupancy must be 0", "photon_occupancy");
    }
    if (bogoliubov_occupancy != 0.0) {
        fail(ErrorKind::InvalidParameter, "thermal Bogoliubov occupancy must be 0", "bogoliubov_occupancy");
    }
}

std::string_view to_string(SpectrumKind kind) {
    switch (kind) {
        case SpectrumKind::PhaseNoise: return "phase_noise";
        case SpectrumKind::Intensity: return "intensity";
        case SpectrumKind::SqueezeFixedPhase: return "squeezing_fixed_phase";
        case SpectrumKind::SqueezeOptimal: return "squeezing_optimal";
        case SpectrumKind::OptimalPhase: return "optimal_phase";
    }
    return "?";
}

std::string_view to_string(Route route) {
    return route == Route::ClosedForm ? "closed_form" : "transfer_matrix";
}

std::string_view to_string(GridUnit unit) {
    switch (unit) {
        case GridUnit::Recoil: return "omegaR";
        case GridUnit::Kappa: return "kappa";
        case GridUnit::Mechanical: return "omegam";
    }
    return "?";
}

GridUnit parse_grid_unit(std::string_view tag) {
    if (tag == "omega_R" || tag == "omegaR") return GridUnit::Recoil;
    if (tag == "kappa") return GridUnit::Kappa;
    if (tag == "omega_m" || tag == "omegam") return GridUnit::Mechanical;
    fail(ErrorKind::InvalidParameter, "unknown grid unit '" + std::string(tag) + "'", "grid.unit");
}

void Grid::validate() const {
    if (points < 3) fail(ErrorKind::InvalidParameter, "grid needs at least 3 points", "grid.points");
    if (!(std::isfinite(min) && std::isfinite(max) && min < max)) {
        fail(ErrorKind::InvalidParameter, "grid requires min < max", "grid.min");
    }
}

std::vector<double> Grid::values() const {
    validate();
    std::vector<double> out(static_cast<std::size_t>(points));
    const double h = step();
    for (int i = 0; i < points; ++i) out[i] = min + h * i;
    // symmetric grids sample +-omega at exactly mirrored values
    if (min == -max) {
        for (int i = 0; i < points / 2; ++i) out[points - 1 - i] = -out[i];
        if (points % 2 == 1) out[points / 2] = 0.0;
    }
    out.back() = max;
    return out;
}

double unit_scale(GridUnit unit, const ModelParams& m) {
    switch (unit) {
        case GridUnit::Recoil: return 1.0;
        case GridUnit::Kappa: return m.kappa;
        case GridUnit::Mechanical: return m.mechanical;
    }
    return 1.0;
}

// ---------------------------------------------------------------------------
// closed-form route

namespace {

cplx optical_denominator(double omega, const ModelParams& m, const WorkingPoint& wp) {
    const cplx kw = m.kappa + I * omega;
    const cplx den = wp.delta_d * wp.delta_d + kw * kw;
    if (std::abs(den) == 0.0) fail(ErrorKind::PoleOnGrid, "optical denominator vanishes");
    return den;
}

cplx inverse_susceptibility(double omega, const ModelParams& m, const WorkingPoint& wp) {
    const cplx gw = m.gamma + I * omega;
    return gw * gw + m.mechanical * m.mechanical +
           wp.coupling * wp.coupling * wp.delta_d * m.bogoliubov_minus / optical_denominator(omega, m, wp);
}

}  // namespace

cplx susceptibility(double omega, const ModelParams& m, const WorkingPoint& wp) {
    const cplx inv = inverse_susceptibility(omega, m, wp);
    if (std::abs(inv) < 1e-12) {
        fail(ErrorKind::PoleOnGrid, "undamped resonance at omega = " + std::to_string(omega));
    }
    return 1.0 / inv;
}

std::array<cplx, 4> coeffs_f(double omega, const ModelParams& m, const WorkingPoint& wp) {
    const cplx den = optical_denominator(omega, m, wp);
    const cplx kw = m.kappa + I * omega;
    const cplx gw = m.gamma + I * omega;
    const cplx mech = gw * gw + m.mechanical * m.mechanical;
    const double G = wp.coupling, d = wp.delta_d, om = m.bogoliubov_minus;
    const double sk = std::sqrt(2.0 * m.kappa), sg = std::sqrt(2.0 * m.gamma);
    return {
        sk * (d * mech + G * G * om) / den,
        sk * kw * mech / den,
        -G * sg * gw * kw / den,
        -G * sg * om * kw / den,
    };
}

std::array<cplx, 4> coeffs_g(double omega, const ModelParams& m, const WorkingPoint& wp) {
    // e_- = kappa + i(w - Delta_d) drives da, e_+ = kappa + i(w + Delta_d) drives da^dag.
    const cplx em = m.kappa + I * (omega - wp.delta_d);
    const cplx ep = m.kappa + I * (omega + wp.delta_d);
    const cplx gw = m.gamma + I * omega;
    const double G = wp.coupling, om = m.bogoliubov_minus, k = m.kappa, g = m.gamma;
    return {
        std::sqrt(2.0 * k) / em * (inverse_susceptibility(omega, m, wp) + I * om * G * G / 2.0 / em),
        I * G * G * std::sqrt(k) * om / (kSqrt2 * em * ep),
        -I * G * std::sqrt(g) * gw / em,
        -I * G * std::sqrt(g) * om / em,
    };
}

double phase_noise_at(double omega, const ModelParams& m, const WorkingPoint& wp) {
    const double chi2 = std::norm(susceptibility(omega, m, wp));
    double sum = 0.0;
    for (const auto& f : coeffs_f(omega, m, wp)) sum += std::norm(f);
    return 0.5 + m.kappa * chi2 * sum;
}

double intensity_at(double omega, const ModelParams& m, const WorkingPoint& wp) {
    const double chi2 = std::norm(susceptibility(omega, m, wp));
    const auto p = coeffs_g(omega, m, wp);
    const auto n = coeffs_g(-omega, m, wp);
    const cplx cross = I * std::conj(p[2]) * p[3] - I * std::conj(p[3]) * p[2] +
                       I * std::conj(n[2]) * n[3] - I * std::conj(n[3]) * n[2];
    const double bracket = 2.0 * std::norm(p[1]) + 2.0 * std::norm(n[1]) + std::norm(p[2]) +
                           std::norm(n[2]) + std::norm(p[3]) + std::norm(n[3]) + cross.real();
    return 0.5 * m.kappa * chi2 * bracket;
}

namespace {

// Correlation of the inputs (a_in, a_in^dag, X_c^in, P_c^in) in units of
// pi delta(w + w').
Eigen::Matrix4cd field_input_correlation() {
    Eigen::Matrix4cd w = Eigen::Matrix4cd::Zero();
    w(0, 1) = 2.0;
    w(2, 2) = 1.0; w(3, 3) = 1.0; w(2, 3) = I; w(3, 2) = -I;
    return w;
}

// (1/4pi) int dw' <A(w) B(w') + A(w') B(w)> for A = alpha . in, B = beta . in.
cplx symmetrized(const Vec4& alpha_p, const Vec4& alpha_m, const Vec4& beta_p, const Vec4& beta_m,
                 const Eigen::Matrix4cd& corr) {
    return 0.25 * (alpha_p.transpose() * corr * beta_m + alpha_m.transpose() * corr * beta_p)(0, 0);
}

// Coefficients of da(w) and da^dag(w) over the field inputs.
std::pair<Vec4, Vec4> field_vectors(double omega, const ModelParams& m, const WorkingPoint& wp) {
    const cplx chi_p = susceptibility(omega, m, wp);
    const cplx chi_m = susceptibility(-omega, m, wp);
    const auto gp = coeffs_g(omega, m, wp);
    const auto gm = coeffs_g(-omega, m, wp);
    Vec4 a, adag;
    for (int i = 0; i < 4; ++i) a(i) = chi_p * gp[i];
    // da^dag(w) = [da(-w)]^dag: a_in <-> a_in^dag swap, quadratures are Hermitian
    const cplx cm = std::conj(chi_m);
    adag << cm * std::conj(gm[1]), cm * std::conj(gm[0]), cm * std::conj(gm[2]), cm * std::conj(gm[3]);
    return {a, adag};
}

FieldCorrelators assemble(const Vec4& a_p, const Vec4& a_m, const Vec4& d_p, const Vec4& d_m,
                          const Eigen::Matrix4cd& corr) {
    FieldCorrelators c;
    c.aa = symmetrized(a_p, a_m, a_p, a_m, corr);
    c.adag_adag = symmetrized(d_p, d_m, d_p, d_m, corr);
    c.a_adag = symmetrized(a_p, a_m, d_p, d_m, corr);
    c.adag_a = symmetrized(d_p, d_m, a_p, a_m, corr);
    return c;
}

FieldCorrelators drop_cross_terms(const FieldCorrelators& intra, double kappa) {
    FieldCorrelators c;
    c.aa = 2.0 * kappa * intra.aa;
    c.adag_adag = 2.0 * kappa * intra.adag_adag;
    c.a_adag = 2.0 * kappa * intra.a_adag + 1.0;
    c.adag_a = 2.0 * kappa * intra.adag_a;
    return c;
}

}  // namespace

FieldCorrelators output_correlators(double omega, const ModelParams& m, const WorkingPoint& wp,
                                    SqueezingAssembly assembly) {
    auto [a_p, d_p] = field_vectors(omega, m, wp);
    auto [a_m, d_m] = field_vectors(-omega, m, wp);
    const auto corr = field_input_correlation();
    if (assembly == SqueezingAssembly::DropInputCrossTerms) {
        return drop_cross_terms(assemble(a_p, a_m, d_p, d_m, corr), m.kappa);
    }
    const double s = std::sqrt(2.0 * m.kappa);
    Vec4 e_in = Vec4::Zero(), e_dag = Vec4::Zero();
    e_in(0) = 1.0;
    e_dag(1) = 1.0;
    return assemble(s * a_p - e_in, s * a_m - e_in, s * d_p - e_dag, s * d_m - e_dag, corr);
}

SqueezingPoint optimal_squeezing(const FieldCorrelators& c) {
    SqueezingPoint p;
    const double mag = std::abs(c.aa);
    p.optimal = -2.0 * mag + c.a_adag.real() + c.adag_a.real();
    if (mag < 1e-14) {
        p.phase_defined = false;
        p.optimal_phase = 0.0;
    } else {
        // exp(2 i phi) = -C_aa / |C_aa|
        p.optimal_phase = 0.5 * std::arg(-c.aa);
    }
    return p;
}

double squeezing_at_phase(const FieldCorrelators& c, double phase) {
    const cplx v = std::exp(-2.0 * I * phase) * c.aa + std::exp(2.0 * I * phase) * c.adag_adag +
                   c.a_adag + c.adag_a;
    return v.real();
}

// ---------------------------------------------------------------------------
// transfer-matrix route

TransferCorrelators transfer_matrix_correlators(double omega, const DriftMatrix& m, const NoiseModel& noise) {
    const Eigen::Matrix4cd drift = m.drift.cast<cplx>();
    Eigen::Matrix4cd gain = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 4; ++i) gain(i, i) = std::sqrt(m.noise_gain(i));

    auto resolvent = [&](double w) {
        const Eigen::Matrix4cd a = I * w * Eigen::Matrix4cd::Identity() - drift;
        Eigen::FullPivLU<Eigen::Matrix4cd> lu(a);
        lu.setThreshold(1e-14);
        if (!lu.isInvertible()) {
            fail(ErrorKind::SingularResolvent, "i omega is an eigenvalue of the drift matrix");
        }
        return Eigen::Matrix4cd(lu.solve(gain));
    };
    const Eigen::Matrix4cd hp = resolvent(omega);
    const Eigen::Matrix4cd hm = resolvent(-omega);
    const Eigen::Matrix4cd v = noise.quadrature_correlation();

    TransferCorrelators t;
    t.quadrature = 0.25 * (hp * v * hm.transpose() + hm * v * hp.transpose());

    // rows over the input quadratures
    const Vec4 a_p = (hp.row(0) + I * hp.row(1)).transpose() / kSqrt2;
    const Vec4 a_m = (hm.row(0) + I * hm.row(1)).transpose() / kSqrt2;
    const Vec4 d_p = (hp.row(0) - I * hp.row(1)).transpose() / kSqrt2;
    const Vec4 d_m = (hm.row(0) - I * hm.row(1)).transpose() / kSqrt2;
    t.intracavity = assemble(a_p, a_m, d_p, d_m, v);

    const double s = std::sqrt(m.noise_gain(0));   // sqrt(2 kappa)
    Vec4 e_in = Vec4::Zero(), e_dag = Vec4::Zero();
    e_in(0) = 1.0 / kSqrt2; e_in(1) = I / kSqrt2;
    e_dag(0) = 1.0 / kSqrt2; e_dag(1) = -I / kSqrt2;
    t.output = assemble(s * a_p - e_in, s * a_m - e_in, s * d_p - e_dag, s * d_m - e_dag, v);
    return t;
}

double phase_noise_transfer(const TransferCorrelators& t, double kappa) {
    return 0.5 + 2.0 * kappa * t.quadrature(1, 1).real();
}

double intensity_transfer(const TransferCorrelators& t, double kappa) {
    return 2.0 * kappa * t.intracavity.adag_a.real();
}

FieldCorrelators output_from_transfer(const TransferCorrelators& t, double kappa, SqueezingAssembly assembly) {
    return assembly == SqueezingAssembly::FullInputOutput ? t.output : drop_cross_terms(t.intracavity, kappa);
}

// ---------------------------------------------------------------------------
// grids

namespace {

template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

SpectrumSeries make_series(SpectrumKind kind, const Grid& grid, const ModelParams& m, const WorkingPoint& wp,
                           const EvalOptions& opt) {
    SpectrumSeries s;
    s.kind = kind;
    s.unit = grid.unit;
    s.omega = grid.values();
    s.values.assign(s.omega.size(), 0.0);
    s.model_hash = m.hash();
    s.working_point = wp;
    s.route = opt.route;
    return s;
}

}  // namespace

SpectrumSeries phase_noise_spectrum(const Grid& grid, const ModelParams& m, const WorkingPoint& wp,
                                    const NoiseModel& noise, const EvalOptions& opt) {
    noise.require_vacuum();
    auto s = make_series(SpectrumKind::PhaseNoise, grid, m, wp, opt);
    const double scale = unit_scale(grid.unit, m);
    const auto dm = drift_matrix(m, wp);
    parallel_for(s.omega.size(), opt.threads, [&](std::size_t i) {
        const double w = s.omega[i] * scale;
        s.values[i] = opt.route == Route::ClosedForm
                          ? phase_noise_at(w, m, wp)
                          : phase_noise_transfer(transfer_matrix_correlators(w, dm, noise), m.kappa);
    });
    return s;
}

SpectrumSeries intensity_spectrum(const Grid& grid, const ModelParams& m, const WorkingPoint& wp,
                                  const NoiseModel& noise, const EvalOptions& opt) {
    noise.require_vacuum();
    auto s = make_series(SpectrumKind::Intensity, grid, m, wp, opt);
    const double scale = unit_scale(grid.unit, m);
    const auto dm = drift_matrix(m, wp);
    parallel_for(s.omega.size(), opt.threads, [&](std::size_t i) {
        const double w = s.omega[i] * scale;
        s.values[i] = opt.route == Route::ClosedForm
                          ? intensity_at(w, m, wp)
                          : intensity_transfer(transfer_matrix_correlators(w, dm, noise), m.kappa);
    });
    return s;
}

SqueezingSpectra squeezing_spectrum(const Grid& grid, const ModelParams& m, const WorkingPoint& wp,
                                    std::optional<double> phase, const NoiseModel& noise,
                                    const EvalOptions& opt) {
    noise.require_vacuum();
    SqueezingSpectra out;
    out.spectrum = make_series(phase ? SpectrumKind::SqueezeFixedPhase : SpectrumKind::SqueezeOptimal,
                               grid, m, wp, opt);
    out.spectrum.phase = phase.value_or(0.0);
    out.optimal_phase = make_series(SpectrumKind::OptimalPhase, grid, m, wp, opt);
    const double scale = unit_scale(grid.unit, m);
    const auto dm = drift_matrix(m, wp);
    std::vector<char> defined(out.spectrum.omega.size(), 1);

    parallel_for(out.spectrum.omega.size(), opt.threads, [&](std::size_t i) {
        const double w = out.spectrum.omega[i] * scale;
        const FieldCorrelators c =
            opt.route == Route::ClosedForm
                ? output_correlators(w, m, wp, opt.assembly)
                : output_from_transfer(transfer_matrix_correlators(w, dm, noise), m.kappa, opt.assembly);
        const auto best = optimal_squeezing(c);
        out.spectrum.values[i] = phase ? squeezing_at_phase(c, *phase) : best.optimal;
        out.optimal_phase.values[i] = best.optimal_phase;
        defined[i] = best.phase_defined ? 1 : 0;
    });
    for (std::size_t i = 0; i < defined.size(); ++i) {
        if (!defined[i]) out.optimal_phase.undefined_phase.push_back(i);
    }
    out.spectrum.undefined_phase = out.optimal_phase.undefined_phase;
    return out;
}

std::vector<std::size_t> local_maxima(const std::vector<double>& v) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] > v[i - 1] && v[i] > v[i + 1]) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> local_minima(const std::vector<double>& v) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] < v[i - 1] && v[i] < v[i + 1]) out.push_back(i);
    }
    return out;
}

}  // namespace cavbec
