#include "cavbec/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "cavbec/config.hpp"
#include "cavbec/error.hpp"

namespace cavbec {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;   // no "-0"
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string csv_table(const std::vector<Column>& columns) {
    std::string out;
    std::size_t rows = 0;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ',';
        out += columns[c].name;
        rows = std::max(rows, columns[c].values.size());
    }
    out += '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ',';
            const auto& v = columns[c].values;
            out += r < v.size() ? format_number(v[r]) : "nan";
        }
        out += '\n';
    }
    return out;
}

std::string omega_column_name(GridUnit unit) { return "omega_over_" + std::string(to_string(unit)); }

std::string hex_hash(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// JSON has no NaN; encode as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num_from(const json& j) { return j.is_null() ? NAN : j.get<double>(); }

json complex_pair(std::complex<double> z) { return json::array({num(z.real()), num(z.imag())}); }

}  // namespace

json to_json(const ModelParams& m) {
    json j;
    j["recoil_rad_s"] = m.recoil_rad_s;
    j["atom_count"] = m.atom_count;
    j["lattice_depth"] = m.lattice_depth;
    j["stark_shift"] = m.stark_shift;
    j["stark_detuning"] = m.stark_detuning;
    j["swave"] = m.swave;
    j["bogoliubov"] = m.bogoliubov;
    j["bogoliubov_plus"] = m.bogoliubov_plus;
    j["bogoliubov_minus"] = m.bogoliubov_minus;
    j["mechanical"] = m.mechanical;
    j["coupling"] = m.coupling;
    j["kappa"] = m.kappa;
    j["gamma"] = m.gamma;
    j["eta"] = m.eta;
    j["hash"] = hex_hash(m.hash());
    return j;
}

json to_json(const WorkingPoint& wp) {
    json j;
    j["alpha"] = wp.alpha;
    j["beta"] = wp.beta;
    j["delta_d"] = wp.delta_d;
    j["coupling"] = wp.coupling;
    j["photons"] = wp.photons;
    j["stable"] = wp.stable;
    j["stability_margin"] = num(wp.stability_margin);
    j["branch_index"] = wp.branch_index;
    j["regime_warning"] = wp.regime_warning;
    return j;
}

json to_json(const SteadyState& s) {
    json j;
    j["points"] = json::array();
    for (const auto& p : s.points) j["points"].push_back(to_json(p));
    j["discarded_complex"] = s.discarded_complex;
    j["discarded_negative"] = s.discarded_negative;
    j["merged"] = s.merged;
    return j;
}

json to_json(const ModeReport& r) {
    json j;
    j["eigenvalues"] = json::array();
    for (const auto& e : r.eigenvalues) j["eigenvalues"].push_back(complex_pair(e));
    j["stable"] = r.stable;
    j["margin"] = num(r.margin);
    j["positive_imag_parts"] = json::array();
    for (double v : r.positive_imag_parts) j["positive_imag_parts"].push_back(num(v));
    j["numeric_splitting"] = num(r.numeric_splitting);
    j["analytic_upper"] = num(r.analytic_upper);
    j["analytic_lower"] = num(r.analytic_lower);
    j["analytic_splitting"] = num(r.analytic_splitting);
    return j;
}

json to_json(const Grid& g) {
    json j;
    j["min"] = g.min;
    j["max"] = g.max;
    j["points"] = g.points;
    j["unit"] = std::string(to_string(g.unit));
    return j;
}

json spectrum_sidecar(const SpectrumSeries& s, const ModelParams& m, const Grid& grid,
                      const std::vector<std::string>& warnings) {
    json j;
    j["kind"] = std::string(to_string(s.kind));
    if (s.kind == SpectrumKind::SqueezeFixedPhase) j["phase"] = s.phase;
    j["route"] = std::string(to_string(s.route));
    j["grid"] = to_json(grid);
    j["omega_column"] = omega_column_name(s.unit);
    j["model_hash"] = hex_hash(s.model_hash);
    j["model"] = to_json(m);
    j["working_point"] = to_json(s.working_point);
    j["undefined_phase"] = s.undefined_phase;
    j["warnings"] = warnings;
    return j;
}

std::string curve_csv(const CalibrationCurve& c) {
    std::vector<Column> cols(5);
    cols[0].name = "omega_sw_over_omegaR";
    cols[1].name = "dsplit_numeric_over_kappa";
    cols[2].name = "dsplit_analytic_over_kappa";
    cols[3].name = "omega_m_over_omegaR";
    cols[4].name = "delta_d_over_omegaR";
    for (const auto& s : c.samples) {
        cols[0].values.push_back(s.swave);
        cols[1].values.push_back(s.split_numeric / c.kappa);
        cols[2].values.push_back(s.split_analytic / c.kappa);
        cols[3].values.push_back(s.mechanical);
        cols[4].values.push_back(s.delta_d);
    }
    return csv_table(cols);
}

json curve_to_json(const CalibrationCurve& c) {
    json j;
    j["protocol"] = to_json(c.protocol);
    j["recoil_rad_s"] = c.recoil_rad_s;
    j["kappa"] = c.kappa;
    if (c.monotone) {
        j["monotone_interval"] = json::array({c.monotone->first, c.monotone->second});
    } else {
        j["monotone_interval"] = nullptr;
    }
    j["samples"] = json::array();
    for (const auto& s : c.samples) {
        json e;
        e["swave"] = s.swave;
        e["stable"] = s.stable;
        e["split_numeric"] = num(s.split_numeric);
        e["split_analytic"] = num(s.split_analytic);
        e["mechanical"] = s.mechanical;
        e["delta_d"] = num(s.delta_d);
        e["stark_detuning"] = s.stark_detuning;
        j["samples"].push_back(std::move(e));
    }
    return j;
}

CalibrationCurve curve_from_json(const json& j) {
    CalibrationCurve c;
    try {
        c.protocol = protocol_from_json(j.at("protocol"));
        c.recoil_rad_s = j.at("recoil_rad_s").get<double>();
        c.kappa = j.at("kappa").get<double>();
        for (const auto& e : j.at("samples")) {
            CalibrationSample s;
            s.swave = e.at("swave").get<double>();
            s.stable = e.at("stable").get<bool>();
            s.split_numeric = num_from(e.at("split_numeric"));
            s.split_analytic = num_from(e.at("split_analytic"));
            s.mechanical = e.at("mechanical").get<double>();
            s.delta_d = num_from(e.at("delta_d"));
            s.stark_detuning = e.at("stark_detuning").get<double>();
            c.samples.push_back(s);
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidParameter, std::string("malformed calibration curve: ") + e.what(), "curve");
    }
    if (!(c.kappa > 0.0)) fail(ErrorKind::InvalidParameter, "curve kappa must be > 0", "curve.kappa");
    for (std::size_t i = 1; i < c.samples.size(); ++i) {
        if (!(c.samples[i].swave > c.samples[i - 1].swave)) {
            fail(ErrorKind::InvalidParameter, "curve samples must be sorted by omega_sw", "curve.samples");
        }
    }
    c.monotone = find_monotone_interval(c.samples);
    return c;
}

json to_json(const SwaveEstimate& e, const CalibrationCurve& c) {
    json j;
    j["omega_sw_over_omegaR"] = e.swave;
    j["omega_sw_rad_s"] = e.swave * c.recoil_rad_s;
    j["splitting_over_kappa"] = e.splitting / c.kappa;
    j["splitting_over_omegaR"] = e.splitting;
    j["preimages_over_omegaR"] = e.preimages;
    j["ambiguous"] = e.ambiguous;
    j["in_monotone_interval"] = e.in_monotone_interval;
    j["bracket"] = {{"lower_omega_sw", c.samples[e.bracket_lower].swave},
                    {"upper_omega_sw", c.samples[e.bracket_upper].swave}};
    j["sensitivity_kappa_per_omegaR"] = e.sensitivity / c.kappa;
    return j;
}

}  // namespace cavbec
