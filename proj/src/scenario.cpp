#include "cavbec/scenario.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cavbec/error.hpp"
#include "cavbec/lindyn.hpp"

namespace cavbec {

OutputFormat parse_output_format(std::string_view s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    fail(ErrorKind::InvalidParameter, "unknown format '" + std::string(s) + "' (csv, json)", "format");
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::InvalidParameter, "cannot read " + path.string(), "config");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        fail(ErrorKind::InvalidParameter, path.string() + ": " + e.what(), "config");
    }
}

namespace {

struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json column_names(const std::vector<Column>& cols) {
    json a = json::array();
    for (const auto& c : cols) a.push_back(c.name);
    return a;
}

void emit_table(RunResult& r, const RunOptions& opt, const std::string& stem, const std::vector<Column>& cols,
                json meta) {
    meta["columns"] = column_names(cols);
    if (opt.format == OutputFormat::Csv) {
        meta["data_file"] = stem + ".csv";
        r.files.push_back({stem + ".csv", csv_table(cols)});
        r.files.push_back({stem + ".meta.json", dump(meta)});
        return;
    }
    json j;
    j["meta"] = std::move(meta);
    json data;
    for (const auto& c : cols) {
        json a = json::array();
        for (double v : c.values) a.push_back(num(v));
        data[c.name] = std::move(a);
    }
    j["data"] = std::move(data);
    r.files.push_back({stem + ".json", dump(j)});
}

BranchSelection pick_branch(const ModelParams& m, const BranchPolicy& policy) {
    auto steady = solve_steady_state(m);
    classify_stability(m, steady.points);
    auto sel = select_branch(steady.points, policy);
    if (sel.point.regime_warning) {
        sel.warnings.push_back("U_0 alpha^2 exceeds 10 omega_R: outside the single-mode Bogoliubov regime");
    }
    return sel;
}

json points_json(const std::vector<double>& omega, const std::vector<double>& values,
                 const std::vector<std::size_t>& idx) {
    json a = json::array();
    for (std::size_t i : idx) {
        if (omega[i] > 0.0) a.push_back({{"omega", omega[i]}, {"value", num(values[i])}});
    }
    return a;
}

json spectrum_features(const SpectrumSeries& s) {
    json f;
    const auto maxima = local_maxima(s.values);
    f["omega_unit"] = std::string(to_string(s.unit));
    f["peak_count"] = maxima.size();
    f["positive_peaks"] = points_json(s.omega, s.values, maxima);
    if (s.kind == SpectrumKind::SqueezeOptimal || s.kind == SpectrumKind::SqueezeFixedPhase) {
        std::vector<std::size_t> below;
        for (std::size_t i : local_minima(s.values)) {
            if (s.values[i] < 1.0) below.push_back(i);
        }
        f["dips_below_one"] = points_json(s.omega, s.values, below);
    }
    return f;
}

void evaluate_spectrum(const Scenario& s, const RunOptions& opt, RunResult& r, json& measured) {
    const ModelParams m = s.model_params();
    const auto sel = pick_branch(m, s.branch);
    EvalOptions eval = s.eval;
    eval.threads = opt.threads;

    std::vector<Column> cols;
    SpectrumSeries primary;
    switch (s.spectrum_kind) {
        case SpectrumKind::PhaseNoise:
            primary = phase_noise_spectrum(s.grid, m, sel.point, {}, eval);
            cols = {{omega_column_name(s.grid.unit), primary.omega}, {"S_P", primary.values}};
            break;
        case SpectrumKind::Intensity:
            primary = intensity_spectrum(s.grid, m, sel.point, {}, eval);
            cols = {{omega_column_name(s.grid.unit), primary.omega}, {"S_I", primary.values}};
            break;
        case SpectrumKind::SqueezeOptimal: {
            auto sq = squeezing_spectrum(s.grid, m, sel.point, std::nullopt, {}, eval);
            primary = std::move(sq.spectrum);
            cols = {{omega_column_name(s.grid.unit), primary.omega},
                    {"S_opt", primary.values},
                    {"phi_opt", sq.optimal_phase.values}};
            break;
        }
        case SpectrumKind::SqueezeFixedPhase: {
            auto sq = squeezing_spectrum(s.grid, m, sel.point, s.squeezing_phase, {}, eval);
            primary = std::move(sq.spectrum);
            cols = {{omega_column_name(s.grid.unit), primary.omega}, {"S_phi", primary.values}};
            break;
        }
        case SpectrumKind::OptimalPhase:
            fail(ErrorKind::InvalidParameter, "optimal phase is emitted with the squeezing spectrum", "spectrum.kind");
    }
    json meta = spectrum_sidecar(primary, m, s.grid, sel.warnings);
    meta["assembly"] = s.eval.assembly == SqueezingAssembly::FullInputOutput ? "full_input_output"
                                                                            : "drop_input_cross_terms";
    meta["branch_policy"] = to_json(s.branch);
    meta["mode_report"] = to_json(mode_report(m, sel.point));
    emit_table(r, opt, s.basename, cols, std::move(meta));
    measured = spectrum_features(primary);
}

void evaluate_sweep(const Scenario& s, const RunOptions& opt, RunResult& r, json& measured) {
    const SweepSpec sw = *s.sweep;
    std::vector<Column> cols = {
        {"omega_sw_over_omegaR", {}},        {"stable", {}},
        {"stability_margin_over_omegaR", {}}, {"photons", {}},
        {"delta_d_over_omegaR", {}},          {"stark_detuning_over_omegaR", {}},
        {"omega_m_over_omegaR", {}},          {"delta_d_over_omegam", {}},
        {"stark_detuning_over_omegam", {}},   {"dsplit_numeric_over_kappa", {}},
        {"dsplit_analytic_over_kappa", {}},
    };
    std::size_t unstable = 0;
    for (std::size_t i = 0; i < sw.points; ++i) {
        const double x = sw.points == 1 ? sw.min
                                        : sw.min + (sw.max - sw.min) * static_cast<double>(i) /
                                                       static_cast<double>(sw.points - 1);
        const ModelParams m = s.model_params_at_swave(x);
        double row[11] = {x, 0.0, NAN, NAN, NAN, m.stark_detuning, m.mechanical, NAN,
                          m.stark_detuning / m.mechanical, NAN, NAN};
        try {
            const auto sel = pick_branch(m, s.branch);
            const auto rep = mode_report(m, sel.point);
            row[1] = 1.0;
            row[2] = sel.point.stability_margin;
            row[3] = sel.point.photons;
            row[4] = sel.point.delta_d;
            row[7] = sel.point.delta_d / m.mechanical;
            row[9] = rep.numeric_splitting / m.kappa;
            row[10] = rep.analytic_splitting / m.kappa;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoStableBranch && e.kind() != ErrorKind::AmbiguousBranch) throw;
            ++unstable;
        }
        for (std::size_t c = 0; c < cols.size(); ++c) cols[c].values.push_back(row[c]);
    }
    json meta;
    meta["task"] = std::string(to_string(s.task));
    meta["sweep"] = {{"min", sw.min}, {"max", sw.max}, {"points", sw.points}};
    meta["branch_policy"] = to_json(s.branch);
    meta["model"] = to_json(s.model_params());
    meta["unstable_samples"] = unstable;

    const auto& dd = cols[4].values;
    const auto& wm = cols[6].values;
    measured["stable_everywhere"] = unstable == 0;
    measured["delta_d_first"] = num(dd.front());
    measured["delta_d_last"] = num(dd.back());
    measured["omega_m_first"] = wm.front();
    measured["omega_m_last"] = wm.back();
    measured["delta_d_over_omegam_last"] = num(cols[7].values.back());
    measured["stark_detuning_over_omegam_last"] = num(cols[8].values.back());
    emit_table(r, opt, s.basename, cols, std::move(meta));
}

void evaluate_calibration_task(const Scenario& s, const RunOptions& opt, RunResult& r, json& measured) {
    CalibrationProtocol protocol;
    protocol.lab = *s.physical;
    protocol.branch = s.branch;
    const auto curve = build_curve(protocol, s.sweep->min, s.sweep->max, s.sweep->points, opt.threads);
    if (opt.format == OutputFormat::Csv) r.files.push_back({s.basename + ".csv", curve_csv(curve)});
    r.files.push_back({s.basename + ".json", dump(curve_to_json(curve))});

    if (curve.monotone) {
        measured["monotone_omega_sw"] = {curve.samples[curve.monotone->first].swave,
                                         curve.samples[curve.monotone->second].swave};
    } else {
        measured["monotone_omega_sw"] = nullptr;
    }
    json at = json::object();
    for (const auto& x : curve.samples) {
        if (x.swave == 30.0 || x.swave == 60.0 || x.swave == 120.0) {
            at[format_number(x.swave)] = num(x.split_numeric / curve.kappa);
        }
    }
    measured["split_numeric_over_kappa_at"] = at;
}

void evaluate_steady(const Scenario& s, const RunOptions&, RunResult& r, json&) {
    const ModelParams m = s.model_params();
    auto steady = solve_steady_state(m);
    classify_stability(m, steady.points);
    json j;
    j["model"] = to_json(m);
    j["steady"] = to_json(steady);
    j["branch_policy"] = to_json(s.branch);
    try {
        auto sel = select_branch(steady.points, s.branch);
        j["selected"] = to_json(sel.point);
        j["warnings"] = sel.warnings;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoStableBranch && e.kind() != ErrorKind::AmbiguousBranch) throw;
        j["selected"] = nullptr;
        j["warnings"] = json::array({std::string(to_string(e.kind())) + ": " + e.what()});
    }
    j["mode_reports"] = json::array();
    for (const auto& p : steady.points) j["mode_reports"].push_back(to_json(mode_report(m, p)));
    r.files.push_back({s.basename + ".json", dump(j)});
}

void evaluate(const Scenario& s, const RunOptions& opt, RunResult& r, json& measured) {
    switch (s.task) {
        case Task::Spectrum: return evaluate_spectrum(s, opt, r, measured);
        case Task::StabilitySweep: return evaluate_sweep(s, opt, r, measured);
        case Task::Calibration: return evaluate_calibration_task(s, opt, r, measured);
        case Task::SteadyState: return evaluate_steady(s, opt, r, measured);
    }
}

void write_files(const RunResult& r, const RunOptions& opt) {
    std::vector<std::filesystem::path> written;
    auto rollback = [&] {
        std::error_code ec;
        for (const auto& p : written) std::filesystem::remove(p, ec);
    };
    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec) throw IoFailure("cannot create " + opt.out_dir.string() + ": " + ec.message());
    for (const auto& f : r.files) {
        const auto path = opt.out_dir / f.name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (out) written.push_back(path);
        out << f.content;
        out.close();
        if (!out) {
            rollback();
            throw IoFailure("cannot write " + path.string());
        }
    }
}

void error_record(std::ostream& err, std::string_view kind, const std::string& message, const std::string& field) {
    json j;
    j["error"] = std::string(kind);
    j["message"] = message;
    j["field"] = field.empty() ? json(nullptr) : json(field);
    err << j.dump() << "\n";
}

template <class F>
int guarded(F&& f, const RunOptions& opt, std::ostream& out, std::ostream& err) {
    try {
        const RunResult r = f();
        write_files(r, opt);
        out << r.stdout_text;
        return 0;
    } catch (const Error& e) {
        error_record(err, to_string(e.kind()), e.what(), e.field());
        return is_validation(e.kind()) ? 2 : 3;
    } catch (const json::exception& e) {
        error_record(err, to_string(ErrorKind::InvalidParameter), e.what(), "config");
        return 2;
    } catch (const IoFailure& e) {
        error_record(err, "IoError", e.what(), "");
        return 1;
    } catch (const std::exception& e) {
        error_record(err, "Internal", e.what(), "");
        return 1;
    }
}

}  // namespace

RunResult evaluate_scenario(const Scenario& s, const RunOptions& opt) {
    RunResult r;
    json measured;
    evaluate(s, opt, r, measured);
    return r;
}

RunResult evaluate_figure(std::string_view name, const RunOptions& opt) {
    const FigurePreset preset = figure_preset(name);
    RunResult r;
    json manifest;
    manifest["preset"] = preset.name;
    manifest["version"] = std::string(preset_version);
    manifest["description"] = preset.description;
    manifest["expected"] = preset.expected;
    manifest["notes"] = preset.notes;
    manifest["curves"] = json::array();
    for (const auto& c : preset.curves) {
        const std::size_t before = r.files.size();
        json measured = json::object();
        evaluate(c.scenario, opt, r, measured);
        json entry;
        entry["label"] = c.label;
        entry["task"] = std::string(to_string(c.scenario.task));
        if (c.scenario.task == Task::Spectrum) entry["kind"] = std::string(to_string(c.scenario.spectrum_kind));
        entry["model_hash"] = hex_hash(c.scenario.model_params().hash());
        entry["files"] = json::array();
        for (std::size_t i = before; i < r.files.size(); ++i) entry["files"].push_back(r.files[i].name);
        entry["measured"] = std::move(measured);
        manifest["curves"].push_back(std::move(entry));
    }
    r.files.push_back({preset.name + "_manifest.json", dump(manifest)});
    return r;
}

RunResult evaluate_calibration(const CalibrateRequest& req, const RunOptions& opt) {
    if (req.curve_file && req.protocol_file) {
        fail(ErrorKind::InvalidParameter, "give at most one of --curve and --protocol", "curve");
    }
    CalibrationCurve curve;
    std::string source = "default_protocol";
    if (req.curve_file) {
        curve = curve_from_json(load_json_file(*req.curve_file));
        source = "curve_file";
    } else {
        CalibrationProtocol protocol = CalibrationProtocol::collision_study();
        if (req.protocol_file) {
            protocol = protocol_from_json(load_json_file(*req.protocol_file));
            source = "protocol_file";
        }
        if (req.sweep.points < 2) fail(ErrorKind::InvalidParameter, "need at least 2 samples", "samples");
        curve = build_curve(protocol, req.sweep.min, req.sweep.max, req.sweep.points, opt.threads);
    }
    const auto est = estimate_omega_sw(curve, req.splitting, req.unit);
    json j = to_json(est, curve);
    j["curve_source"] = source;
    j["curve_samples"] = curve.samples.size();
    RunResult r;
    r.stdout_text = dump(j);
    return r;
}

int run_scenario(const std::filesystem::path& config, std::optional<Task> implied, const RunOptions& opt,
                 std::ostream& out, std::ostream& err) {
    return guarded([&] { return evaluate_scenario(parse_scenario(load_json_file(config), implied), opt); }, opt,
                   out, err);
}

int run_figure(std::string_view preset, const RunOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded([&] { return evaluate_figure(preset, opt); }, opt, out, err);
}

int run_calibrate(const CalibrateRequest& req, const RunOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded([&] { return evaluate_calibration(req, opt); }, opt, out, err);
}

}  // namespace cavbec
