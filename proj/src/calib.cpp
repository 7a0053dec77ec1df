#include "cavbec/calib.hpp"

#include <algorithm>
#include <thread>

// pchip.hpp in Boost 1.74 calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "cavbec/error.hpp"
#include "cavbec/lindyn.hpp"

namespace cavbec {

CalibrationProtocol CalibrationProtocol::collision_study() {
    CalibrationProtocol p;
    p.lab = PhysicalParams{};
    p.lab.cavity_decay = Frequency::recoil(24.0);
    p.lab.bec_decay = Frequency::kappa(1e-3);
    p.lab.drive = Frequency::recoil(81.0);
    p.lab.detuning = StarkShiftFraction{0.994};
    return p;
}

// ---------------------------------------------------------------------------

struct MonotoneCubic::Impl {
    // pchip needs four knots; fewer fall back to linear segments
    std::optional<boost::math::interpolators::pchip<std::vector<double>>> spline;
};

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size() || x_.size() < 2) {
        fail(ErrorKind::InvalidParameter, "monotone cubic needs >= 2 matching knots");
    }
    for (std::size_t i = 1; i < x_.size(); ++i) {
        if (!(x_[i] > x_[i - 1])) fail(ErrorKind::InvalidParameter, "knots must be strictly increasing");
    }
    auto impl = std::make_shared<Impl>();
    if (x_.size() >= 4) impl->spline.emplace(std::vector<double>(x_), std::vector<double>(y_));
    impl_ = std::move(impl);
}

double MonotoneCubic::operator()(double x) const {
    x = std::clamp(x, x_.front(), x_.back());
    if (impl_->spline) return (*impl_->spline)(x);
    const auto it = std::upper_bound(x_.begin(), x_.end() - 1, x);
    const std::size_t i = std::max<std::ptrdiff_t>(it - x_.begin(), 1) - 1;
    const double t = (x - x_[i]) / (x_[i + 1] - x_[i]);
    return y_[i] + t * (y_[i + 1] - y_[i]);
}

double MonotoneCubic::derivative(double x) const {
    x = std::clamp(x, x_.front(), x_.back());
    if (impl_->spline) return impl_->spline->prime(x);
    const auto it = std::upper_bound(x_.begin(), x_.end() - 1, x);
    const std::size_t i = std::max<std::ptrdiff_t>(it - x_.begin(), 1) - 1;
    return (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
}

// ---------------------------------------------------------------------------

CalibrationSample calibration_sample(const CalibrationProtocol& protocol, double swave) {
    PhysicalParams lab = protocol.lab;
    lab.swave = SwaveDirect{Frequency::recoil(swave)};
    const ModelParams m = derive_model_params(lab);

    CalibrationSample s;
    s.swave = swave;
    s.mechanical = m.mechanical;
    s.stark_detuning = m.stark_detuning;

    auto steady = solve_steady_state(m);
    classify_stability(m, steady.points);
    WorkingPoint wp;
    try {
        wp = select_branch(steady.points, protocol.branch).point;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoStableBranch && e.kind() != ErrorKind::AmbiguousBranch) throw;
        return s;
    }
    s.stable = wp.stable;
    s.delta_d = wp.delta_d;
    const auto report = mode_report(m, wp);
    s.split_numeric = report.numeric_splitting;
    s.split_analytic = report.analytic_splitting;
    return s;
}

std::optional<std::pair<std::size_t, std::size_t>> find_monotone_interval(
    const std::vector<CalibrationSample>& samples) {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    std::size_t i = 0;
    while (i < samples.size()) {
        if (!samples[i].usable()) {
            ++i;
            continue;
        }
        // grow a run with a consistent sign of differences
        std::size_t j = i;
        int sign = 0;
        while (j + 1 < samples.size() && samples[j + 1].usable()) {
            const double d = samples[j + 1].split_numeric - samples[j].split_numeric;
            const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
            if (s == 0 || (sign != 0 && s != sign)) break;
            sign = s;
            ++j;
        }
        if (j > i && (!best || j - i > best->second - best->first)) best = std::make_pair(i, j);
        i = (j > i) ? j : i + 1;
    }
    return best;
}

CalibrationCurve build_curve(const CalibrationProtocol& protocol, double swave_min, double swave_max,
                             std::size_t n_samples, int threads) {
    if (n_samples == 0) fail(ErrorKind::InvalidParameter, "need at least one sample", "samples");
    if (!(swave_min >= 0.0) || !(swave_max >= swave_min)) {
        fail(ErrorKind::InvalidParameter, "omega_sw range must satisfy 0 <= min <= max", "swave_range");
    }
    CalibrationCurve curve;
    curve.protocol = protocol;
    const ModelParams base = derive_model_params(protocol.lab);
    curve.recoil_rad_s = base.recoil_rad_s;
    curve.kappa = base.kappa;
    curve.samples.resize(n_samples);

    auto at = [&](std::size_t i) {
        if (n_samples == 1) return swave_min;
        return swave_min + (swave_max - swave_min) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    };
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, n_samples);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n_samples; i += workers) {
                    curve.samples[i] = calibration_sample(protocol, at(i));
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    if (std::none_of(curve.samples.begin(), curve.samples.end(), [](const auto& s) { return s.stable; })) {
        fail(ErrorKind::EmptyCurve, "no stable sample in the omega_sw range");
    }
    curve.monotone = find_monotone_interval(curve.samples);
    return curve;
}

namespace {

double to_recoil_units(const CalibrationCurve& curve, double value, FrequencyUnit unit) {
    switch (unit) {
        case FrequencyUnit::RadPerSecond: return value / curve.recoil_rad_s;
        case FrequencyUnit::Recoil: return value;
        case FrequencyUnit::Kappa: return value * curve.kappa;
    }
    return value;
}

bool between(double v, double a, double b) { return v >= std::min(a, b) && v <= std::max(a, b); }

}  // namespace

SwaveEstimate estimate_omega_sw(const CalibrationCurve& curve, double measured_splitting, FrequencyUnit unit) {
    if (!(measured_splitting > 0.0)) {
        fail(ErrorKind::InvalidParameter, "splitting must be > 0", "splitting");
    }
    const auto& s = curve.samples;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& x : s) {
        if (!x.usable()) continue;
        lo = std::min(lo, x.split_numeric);
        hi = std::max(hi, x.split_numeric);
    }
    if (!std::isfinite(lo)) fail(ErrorKind::EmptyCurve, "curve has no usable samples");

    SwaveEstimate est;
    est.splitting = to_recoil_units(curve, measured_splitting, unit);
    if (est.splitting < lo || est.splitting > hi) {
        fail(ErrorKind::OutOfRange, "splitting " + std::to_string(est.splitting / curve.kappa) +
                                        " kappa is outside the tabulated range [" +
                                        std::to_string(lo / curve.kappa) + ", " +
                                        std::to_string(hi / curve.kappa) + "] kappa");
    }

    std::optional<MonotoneCubic> inverse, forward;
    if (curve.monotone) {
        std::vector<double> sw, sp;
        for (std::size_t i = curve.monotone->first; i <= curve.monotone->second; ++i) {
            sw.push_back(s[i].swave);
            sp.push_back(s[i].split_numeric);
        }
        forward.emplace(sw, sp);
        if (sp.front() > sp.back()) {
            std::reverse(sw.begin(), sw.end());
            std::reverse(sp.begin(), sp.end());
        }
        inverse.emplace(sp, sw);
    }

    auto in_interval = [&](std::size_t i) {
        return curve.monotone && i >= curve.monotone->first && i + 1 <= curve.monotone->second;
    };

    // every segment containing the value contributes a preimage
    std::vector<std::pair<double, std::size_t>> hits;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (!s[i].usable() || !s[i + 1].usable()) continue;
        const double a = s[i].split_numeric, b = s[i + 1].split_numeric;
        if (!between(est.splitting, a, b)) continue;
        double x;
        if (in_interval(i)) {
            x = (*inverse)(est.splitting);
        } else if (a == b) {
            x = s[i].swave;
        } else {
            x = s[i].swave + (est.splitting - a) / (b - a) * (s[i + 1].swave - s[i].swave);
        }
        if (!hits.empty() && std::abs(hits.back().first - x) <= 1e-9 * std::max(1.0, std::abs(x))) continue;
        hits.push_back({x, i});
    }
    if (hits.empty()) {
        // a lone usable sample can only match itself
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i].usable() && s[i].split_numeric == est.splitting) hits.push_back({s[i].swave, i});
        }
    }
    if (hits.empty()) fail(ErrorKind::OutOfRange, "splitting falls in a gap between usable samples");

    std::size_t pick = 0;
    for (std::size_t k = 0; k < hits.size(); ++k) {
        if (in_interval(hits[k].second)) {
            pick = k;
            est.in_monotone_interval = true;
            break;
        }
    }
    for (const auto& h : hits) est.preimages.push_back(h.first);
    est.ambiguous = hits.size() > 1;
    est.swave = hits[pick].first;
    est.bracket_lower = hits[pick].second;
    est.bracket_upper = std::min(hits[pick].second + 1, s.size() - 1);
    if (est.in_monotone_interval) {
        est.sensitivity = std::abs(forward->derivative(est.swave));
    } else if (est.bracket_upper != est.bracket_lower) {
        const auto& a = s[est.bracket_lower];
        const auto& b = s[est.bracket_upper];
        est.sensitivity = std::abs((b.split_numeric - a.split_numeric) / (b.swave - a.swave));
    }
    return est;
}

}  // namespace cavbec
