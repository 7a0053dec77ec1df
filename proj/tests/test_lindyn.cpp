#include "doctest.h"

#include <random>

#include <Eigen/Dense>

#include "cavbec/error.hpp"
#include "support.hpp"

using namespace cavbec;
using testing::rel;

namespace {

ModelParams unstable_model() {
    ModelInputs in;
    in.recoil_rad_s = 2.37e4;
    in.lattice_depth = 0.4414;
    in.stark_detuning = -47.86;   // blue side: Delta_d > 0 at the fixed point
    in.swave = 50.0;
    in.kappa = 24.0;
    in.gamma = 0.024;
    in.eta = 20.0;
    return make_model_params(in);
}

// Bare drift-matrix inputs with random couplings.
std::pair<ModelParams, WorkingPoint> random_drift(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ModelParams m;
    m.swave = 120.0 * u(rng);
    m.bogoliubov = 4.0 + m.swave;
    m.bogoliubov_plus = m.bogoliubov + 0.5 * m.swave;
    m.bogoliubov_minus = m.bogoliubov - 0.5 * m.swave;
    m.mechanical = std::sqrt(m.bogoliubov_plus * m.bogoliubov_minus);
    m.kappa = 1.0 + 80.0 * u(rng);
    m.gamma = m.kappa * std::pow(10.0, -3.0 + 3.0 * u(rng));
    WorkingPoint wp;
    wp.delta_d = -300.0 + 600.0 * u(rng);
    wp.coupling = 150.0 * u(rng);
    return {m, wp};
}

}  // namespace

TEST_SUITE("lindyn") {

TEST_CASE("drift matrix entries") {
    const auto o = testing::collision(30.0);
    const auto d = drift_matrix(o.m, o.wp);
    const double k = o.m.kappa, g = o.m.gamma, dd = o.wp.delta_d, G = o.wp.coupling;
    Eigen::Matrix4d expected;
    expected << -k, -dd, 0, 0,
                dd, -k, -G, 0,
                0, 0, -g, o.m.bogoliubov_minus,
                -G, 0, -o.m.bogoliubov_plus, -g;
    CHECK((d.drift - expected).norm() == 0.0);
    CHECK(dd == doctest::Approx(-157.97).epsilon(2e-4));
    CHECK(d.noise_gain(0) == 2.0 * k);
    CHECK(d.noise_gain(3) == 2.0 * g);
    CHECK(d.drift.trace() == doctest::Approx(-2.0 * k - 2.0 * g).epsilon(1e-15));
}

TEST_CASE("uncoupled blocks") {
    PhysicalParams p = collision_lab(30.0);
    p.drive = Frequency::recoil(0.0);
    const auto m = derive_model_params(p);
    const auto wp = solve_steady_state(m).points.at(0);
    const auto ev = eigenvalues(drift_matrix(m, wp));
    // -kappa +- i|Delta_d| and -gamma +- i omega_m
    CHECK(ev[0].real() == doctest::Approx(-m.kappa));
    CHECK(ev[0].imag() == doctest::Approx(std::abs(wp.delta_d)).epsilon(1e-12));
    CHECK(ev[1].real() == doctest::Approx(-m.gamma).epsilon(1e-9));
    CHECK(ev[1].imag() == doctest::Approx(m.mechanical).epsilon(1e-12));
    CHECK(ev[2] == std::conj(ev[1]));
    CHECK(ev[3] == std::conj(ev[0]));
    const auto peaks = analytic_peaks(m, wp);
    CHECK(peaks.upper == doctest::Approx(std::abs(wp.delta_d)).epsilon(1e-12));
    CHECK(peaks.lower == doctest::Approx(m.mechanical).epsilon(1e-12));
}

TEST_CASE("characteristic polynomial against determinants") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        auto [m, wp] = random_drift(rng);
        const auto a = drift_matrix(m, wp).drift;
        const auto c = characteristic_polynomial(a);
        CHECK(c[0] == doctest::Approx(-a.trace()).epsilon(1e-12));
        CHECK(c[3] == doctest::Approx(a.determinant()).epsilon(1e-9));
        const std::complex<double> lam(100.0 * u(rng), 100.0 * u(rng));
        const Eigen::Matrix4cd shifted = lam * Eigen::Matrix4cd::Identity() - a.cast<std::complex<double>>();
        const std::complex<double> poly = (((lam + c[0]) * lam + c[1]) * lam + c[2]) * lam + c[3];
        CHECK(std::abs(poly - shifted.determinant()) <= 1e-9 * std::abs(shifted.determinant()) + 1e-6);
    }
}

TEST_CASE("Routh-Hurwitz agrees with an independent eigensolver") {
    std::mt19937_64 rng(1);
    int stable = 0, unstable = 0;
    for (int i = 0; i < 10000; ++i) {
        auto [m, wp] = random_drift(rng);
        const auto d = drift_matrix(m, wp);
        Eigen::EigenSolver<Eigen::Matrix4d> es(d.drift, false);
        double margin = -INFINITY;
        for (int k = 0; k < 4; ++k) margin = std::max(margin, es.eigenvalues()(k).real());
        if (std::abs(margin) < 1e-8) continue;
        const bool rh = routh_hurwitz_stable(characteristic_polynomial(d.drift));
        REQUIRE(rh == (margin < 0.0));
        const auto report = is_stable(d);
        CHECK(report.stable == (margin < 0.0));
        CHECK(report.margin == doctest::Approx(margin).epsilon(1e-6).scale(1.0));
        (margin < 0.0 ? stable : unstable)++;
    }
    CHECK(stable > 100);
    CHECK(unstable > 100);
}

TEST_CASE("unstable fixture") {
    const auto m = unstable_model();
    auto st = solve_steady_state(m);
    classify_stability(m, st.points);
    REQUIRE(st.points.size() == 1);
    CHECK(st.points[0].delta_d > 0.0);
    CHECK_FALSE(st.points[0].stable);
    CHECK(st.points[0].stability_margin > 1.0);
    CHECK_THROWS_AS(select_branch(st.points), Error);
}

TEST_CASE("collision preset is stable over omega_sw in [0, 120]") {
    for (int i = 0; i <= 120; ++i) {
        const auto m = derive_model_params(collision_lab(double(i)));
        auto st = solve_steady_state(m);
        classify_stability(m, st.points);
        REQUIRE(st.points.size() == 1);
        CHECK(st.points[0].stable);
    }
}

TEST_CASE("normal-mode splittings") {
    struct Row { double sw, numeric, analytic; };
    // numeric reference from a separate eigen-decomposition prototype
    for (const auto& r : {Row{30.0, 5.574, 5.583}, Row{60.0, 4.169, 4.190}, Row{120.0, 2.1246, 2.2646}}) {
        const auto o = testing::collision(r.sw);
        const double split = numeric_splitting(drift_matrix(o.m, o.wp)) / o.m.kappa;
        CHECK(split == doctest::Approx(r.numeric).epsilon(1e-3));
        CHECK(analytic_peaks(o.m, o.wp).splitting() / o.m.kappa == doctest::Approx(r.analytic).epsilon(1e-3));
    }
    CHECK(numeric_splitting(drift_matrix(testing::collision(30.0).m, testing::collision(30.0).wp)) /
              24.0 == doctest::Approx(5.6).epsilon(0.3 / 5.6));
}

TEST_CASE("analytic and numeric splittings stay within 10% on [10, 120]") {
    for (int i = 0; i < 100; ++i) {
        const double sw = 10.0 + 110.0 * i / 99.0;
        const auto o = testing::collision(sw);
        const auto r = mode_report(o.m, o.wp);
        REQUIRE(std::isfinite(r.numeric_splitting));
        REQUIRE(std::isfinite(r.analytic_splitting));
        CHECK(rel(r.analytic_splitting, r.numeric_splitting) <= 0.1);
    }
}

TEST_CASE("damping-free root failures") {
    const auto o = testing::collision(30.0);
    WorkingPoint wp = o.wp;
    // radicand (wm^2 - Dd^2)^2 - 4 G^2 Dd Om_- < 0 needs Dd > 0
    wp.delta_d = o.m.mechanical;
    wp.coupling = 10.0;
    CHECK_THROWS_WITH_AS(analytic_peaks(o.m, wp), doctest::Contains("radicand"), Error);
    try {
        analytic_peaks(o.m, wp);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ComplexRoot);
    }
    // lower root squared < 0: wm^2 Dd^2 + G^2 Dd Om_- < 0, needs Dd < 0 and large G
    wp.delta_d = o.wp.delta_d;
    wp.coupling = 200.0;
    try {
        analytic_peaks(o.m, wp);
        FAIL("expected NegativeSquare");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NegativeSquare);
    }
    const auto report = mode_report(o.m, wp);
    CHECK(std::isnan(report.analytic_splitting));
}

TEST_CASE("overdamped mode") {
    ModelParams m = derive_model_params(collision_lab(30.0));
    WorkingPoint wp;   // G = 0, Delta_d = 0: the optical pair is real
    CHECK_THROWS_AS(numeric_splitting(drift_matrix(m, wp)), Error);
    const auto r = mode_report(m, wp);
    CHECK(std::isnan(r.numeric_splitting));
    CHECK(r.positive_imag_parts.size() == 1);
}

}
