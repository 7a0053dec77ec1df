#include "doctest.h"

#include <random>

#include "cavbec/error.hpp"
#include "cavbec/serialize.hpp"
#include "support.hpp"

using namespace cavbec;

namespace {

const CalibrationCurve& reference_curve() {
    static const CalibrationCurve c = build_curve(CalibrationProtocol::collision_study(), 0.0, 120.0, 241, 4);
    return c;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::InvalidParameter;
}

CalibrationSample synthetic(double sw, double split) {
    CalibrationSample s;
    s.swave = sw;
    s.stable = true;
    s.split_numeric = split;
    s.split_analytic = split;
    return s;
}

}  // namespace

TEST_SUITE("calib") {

TEST_CASE("forward samples") {
    const auto p = CalibrationProtocol::collision_study();
    for (auto [sw, expected] : {std::pair{30.0, 5.6}, {60.0, 4.2}, {120.0, 2.1}}) {
        const auto s = calibration_sample(p, sw);
        CHECK(s.stable);
        CHECK(s.split_numeric / 24.0 == doctest::Approx(expected).epsilon(0.3 / expected));
    }
    const auto zero = calibration_sample(p, 0.0);
    CHECK(zero.mechanical == 4.0);
    CHECK(std::abs(zero.delta_d) == doctest::Approx(250.0).epsilon(0.05));
}

TEST_CASE("curve shape") {
    const auto& c = reference_curve();
    REQUIRE(c.samples.size() == 241);
    CHECK(c.kappa == 24.0);
    REQUIRE(c.monotone.has_value());
    CHECK(c.monotone->first == 0);
    CHECK(c.monotone->second == 240);
    for (std::size_t i = 1; i < c.samples.size(); ++i) {
        CHECK(c.samples[i].split_numeric < c.samples[i - 1].split_numeric);
        CHECK(c.samples[i].mechanical > c.samples[i - 1].mechanical);
    }
}

TEST_CASE("round trip at 45 omega_R") {
    const auto& c = reference_curve();
    const auto forward = calibration_sample(c.protocol, 45.0);
    const auto est = estimate_omega_sw(c, forward.split_numeric, FrequencyUnit::Recoil);
    CHECK(est.swave == doctest::Approx(45.0).epsilon(0.5 / 45.0));
    CHECK_FALSE(est.ambiguous);
    CHECK(est.in_monotone_interval);
    CHECK(est.sensitivity > 0.0);

    const auto via_si = estimate_omega_sw(c, forward.split_numeric * c.recoil_rad_s, FrequencyUnit::RadPerSecond);
    CHECK(via_si.swave == doctest::Approx(est.swave).epsilon(1e-12));
    const auto via_kappa = estimate_omega_sw(c, forward.split_numeric / c.kappa, FrequencyUnit::Kappa);
    CHECK(via_kappa.swave == doctest::Approx(est.swave).epsilon(1e-12));
}

TEST_CASE("quoted splittings map back to their omega_sw") {
    const auto c = build_curve(CalibrationProtocol::collision_study(), 0.0, 160.0, 161);
    CHECK(estimate_omega_sw(c, 4.2, FrequencyUnit::Kappa).swave == doctest::Approx(60.0).epsilon(3.0 / 60.0));
    CHECK(estimate_omega_sw(c, 5.6, FrequencyUnit::Kappa).swave == doctest::Approx(30.0).epsilon(3.0 / 30.0));
    CHECK(estimate_omega_sw(c, 2.1, FrequencyUnit::Kappa).swave == doctest::Approx(120.0).epsilon(3.0 / 120.0));
}

TEST_CASE("inverse consistency on random omega_sw") {
    const auto& c = reference_curve();
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(2.0, 119.0);
    for (int i = 0; i < 50; ++i) {
        const double sw = u(rng);
        const auto s = calibration_sample(c.protocol, sw);
        const auto est = estimate_omega_sw(c, s.split_numeric, FrequencyUnit::Recoil);
        CHECK(testing::rel(est.swave, sw) <= 0.01);
    }
}

TEST_CASE("out of range and bad input") {
    const auto& c = reference_curve();
    CHECK(kind_of([&] { estimate_omega_sw(c, 100.0, FrequencyUnit::Kappa); }) == ErrorKind::OutOfRange);
    CHECK(kind_of([&] { estimate_omega_sw(c, 1.0, FrequencyUnit::Kappa); }) == ErrorKind::OutOfRange);
    CHECK(kind_of([&] { estimate_omega_sw(c, 0.0, FrequencyUnit::Kappa); }) == ErrorKind::InvalidParameter);
    CHECK(kind_of([&] { estimate_omega_sw(c, -2.0, FrequencyUnit::Kappa); }) == ErrorKind::InvalidParameter);
    CHECK(kind_of([&] { build_curve(c.protocol, 0.0, 10.0, 0); }) == ErrorKind::InvalidParameter);
    CHECK(kind_of([&] { build_curve(c.protocol, 10.0, 0.0, 5); }) == ErrorKind::InvalidParameter);
}

TEST_CASE("single-sample curve") {
    const auto c = build_curve(CalibrationProtocol::collision_study(), 45.0, 45.0, 1);
    REQUIRE(c.samples.size() == 1);
    CHECK_FALSE(c.monotone.has_value());
    const auto est = estimate_omega_sw(c, c.samples[0].split_numeric, FrequencyUnit::Recoil);
    CHECK(est.swave == 45.0);
    CHECK(kind_of([&] { estimate_omega_sw(c, c.samples[0].split_numeric * 1.01, FrequencyUnit::Recoil); }) ==
          ErrorKind::OutOfRange);
}

TEST_CASE("curve without stable samples") {
    CalibrationProtocol p = CalibrationProtocol::collision_study();
    p.lab.detuning = StarkDetuning{Frequency::recoil(-47.86)};
    p.lab.drive = Frequency::recoil(20.0);
    CHECK(kind_of([&] { build_curve(p, 49.0, 51.0, 3); }) == ErrorKind::EmptyCurve);
}

TEST_CASE("non-monotone curves report every preimage") {
    CalibrationCurve c;
    c.kappa = 1.0;
    c.recoil_rad_s = 1.0;
    // rises on [0, 2], falls on [2, 8]
    const double split[] = {1.0, 2.0, 3.0, 2.6, 2.2, 1.8, 1.4, 1.0, 0.6};
    for (int i = 0; i < 9; ++i) c.samples.push_back(synthetic(i, split[i]));
    c.monotone = find_monotone_interval(c.samples);
    REQUIRE(c.monotone.has_value());
    CHECK(c.monotone->first == 2);
    CHECK(c.monotone->second == 8);

    const auto est = estimate_omega_sw(c, 1.5, FrequencyUnit::Recoil);
    CHECK(est.ambiguous);
    REQUIRE(est.preimages.size() == 2);
    CHECK(est.preimages[0] == doctest::Approx(0.5));
    CHECK(est.in_monotone_interval);
    CHECK(est.swave == doctest::Approx(5.75).epsilon(0.02));
    CHECK(est.swave == est.preimages[1]);

    const auto lone = estimate_omega_sw(c, 0.8, FrequencyUnit::Recoil);
    CHECK_FALSE(lone.ambiguous);
}

TEST_CASE("unstable samples split the monotone search") {
    std::vector<CalibrationSample> s;
    for (int i = 0; i < 10; ++i) s.push_back(synthetic(i, 10.0 - i));
    s[3].stable = false;
    const auto run = find_monotone_interval(s);
    REQUIRE(run.has_value());
    CHECK(run->first == 4);
    CHECK(run->second == 9);
    s[4].split_numeric = NAN;
    CHECK(find_monotone_interval(s)->first == 5);
    CHECK_FALSE(find_monotone_interval({synthetic(0, 1.0)}).has_value());
}

TEST_CASE("monotone cubic interpolant") {
    const std::vector<double> x = {0, 1, 2, 3, 4, 5};
    const std::vector<double> y = {0, 0.1, 0.2, 3.0, 3.1, 3.2};
    MonotoneCubic f(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(f(x[i]) == doctest::Approx(y[i]).epsilon(1e-14));
    double prev = -1.0;
    for (int i = 0; i <= 500; ++i) {
        const double v = f(0.01 * i);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(f(-1.0) == f(0.0));
    CHECK(f(9.0) == f(5.0));

    MonotoneCubic lin({0.0, 2.0, 3.0}, {1.0, 5.0, 6.0});
    CHECK(lin(1.0) == 3.0);
    CHECK(lin.derivative(2.5) == 1.0);
    CHECK_THROWS_AS(MonotoneCubic({0.0, 0.0}, {1.0, 2.0}), Error);
    CHECK_THROWS_AS(MonotoneCubic({0.0}, {1.0}), Error);
}

TEST_CASE("curve JSON round trip") {
    CalibrationCurve c = build_curve(CalibrationProtocol::collision_study(), 0.0, 120.0, 13);
    c.samples[2].split_analytic = NAN;
    const auto back = curve_from_json(json::parse(curve_to_json(c).dump()));
    REQUIRE(back.samples.size() == c.samples.size());
    CHECK(back.kappa == c.kappa);
    CHECK(back.recoil_rad_s == c.recoil_rad_s);
    CHECK(back.monotone == c.monotone);
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
        CHECK(back.samples[i].swave == c.samples[i].swave);
        CHECK(back.samples[i].split_numeric == c.samples[i].split_numeric);
        CHECK(back.samples[i].delta_d == c.samples[i].delta_d);
    }
    CHECK(std::isnan(back.samples[2].split_analytic));
    CHECK(estimate_omega_sw(back, 4.2, FrequencyUnit::Kappa).swave ==
          estimate_omega_sw(c, 4.2, FrequencyUnit::Kappa).swave);
}

TEST_CASE("curve CSV columns") {
    const auto c = build_curve(CalibrationProtocol::collision_study(), 0.0, 120.0, 3);
    const auto csv = curve_csv(c);
    CHECK(csv.rfind("omega_sw_over_omegaR,dsplit_numeric_over_kappa,dsplit_analytic_over_kappa,"
                    "omega_m_over_omegaR,delta_d_over_omegaR\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

}
