// cavbec: spectra, stability and calibration for a driven cavity with an
// interacting BEC.
//
//   cavbec spectrum  --config scenario.json [--out-dir DIR] [--format csv|json]
//   cavbec stability --config sweep.json
//   cavbec steady    --config point.json
//   cavbec run       --config any.json
//   cavbec figure    fig3a
//   cavbec calibrate --splitting 4.2 --unit kappa [--curve FILE | --protocol FILE]
//
// Thread count: --threads, else $CAVBEC_THREADS, else 1.

#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"

#include "cavbec/error.hpp"
#include "cavbec/scenario.hpp"

using namespace cavbec;

namespace {

int env_threads() {
    const char* s = std::getenv("CAVBEC_THREADS");
    if (!s || !*s) return 1;
    char* end = nullptr;
    const long n = std::strtol(s, &end, 10);
    if (*end != '\0' || n < 1 || n > 1024) return -1;
    return static_cast<int>(n);
}

void print_error(std::string_view kind, const std::string& message, const std::string& field) {
    json j;
    j["error"] = std::string(kind);
    j["message"] = message;
    j["field"] = field.empty() ? json(nullptr) : json(field);
    std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cavity + BEC output spectra and s-wave calibration"};
    app.require_subcommand(1);

    std::string config, out_dir = ".", format = "csv";
    int threads = 0;
    app.add_option("--out-dir", out_dir, "directory for output files");
    app.add_option("--format", format, "data format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "worker threads for grid evaluation")->check(CLI::Range(1, 1024));

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("--config", config, "scenario JSON")->required();
        sub->fallthrough();
    };
    auto* spectrum = app.add_subcommand("spectrum", "output-field spectrum on a frequency grid");
    add_config(spectrum);
    auto* stability = app.add_subcommand("stability", "working point and stability over an omega_sw sweep");
    add_config(stability);
    auto* steady = app.add_subcommand("steady", "all steady-state branches with mode reports");
    add_config(steady);
    auto* run = app.add_subcommand("run", "whatever task the config names");
    add_config(run);

    std::string preset;
    auto* figure = app.add_subcommand("figure", "emit the curves of a figure preset and a manifest");
    figure->add_option("preset", preset, "preset name")->required();
    figure->fallthrough();

    CalibrateRequest req;
    std::string unit = "kappa", curve_file, protocol_file;
    auto* calibrate = app.add_subcommand("calibrate", "estimate omega_sw from a measured splitting");
    calibrate->add_option("--splitting", req.splitting, "measured normal-mode splitting")->required();
    calibrate->add_option("--unit", unit, "unit of the splitting")
        ->check(CLI::IsMember({"rad_s", "omega_R", "kappa"}));
    auto* curve_opt = calibrate->add_option("--curve", curve_file, "tabulated curve JSON");
    auto* protocol_opt = calibrate->add_option("--protocol", protocol_file, "protocol JSON to tabulate");
    curve_opt->excludes(protocol_opt);
    calibrate->add_option("--samples", req.sweep.points, "omega_sw samples when tabulating")
        ->check(CLI::Range(2, 100000));
    calibrate->add_option("--swave-min", req.sweep.min, "omega_sw range start (omega_R)");
    calibrate->add_option("--swave-max", req.sweep.max, "omega_sw range end (omega_R)");
    calibrate->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error(to_string(ErrorKind::InvalidParameter), e.what(), "");
        return 2;
    }

    RunOptions opt;
    opt.out_dir = out_dir;
    opt.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    opt.threads = threads > 0 ? threads : env_threads();
    if (opt.threads < 1) {
        print_error(to_string(ErrorKind::InvalidParameter), "CAVBEC_THREADS must be an integer in [1, 1024]",
                    "CAVBEC_THREADS");
        return 2;
    }

    if (*spectrum) return run_scenario(config, Task::Spectrum, opt, std::cout, std::cerr);
    if (*stability) return run_scenario(config, Task::StabilitySweep, opt, std::cout, std::cerr);
    if (*steady) return run_scenario(config, Task::SteadyState, opt, std::cout, std::cerr);
    if (*run) return run_scenario(config, std::nullopt, opt, std::cout, std::cerr);
    if (*figure) return run_figure(preset, opt, std::cout, std::cerr);

    req.unit = parse_frequency_unit(unit);
    if (!curve_file.empty()) req.curve_file = curve_file;
    if (!protocol_file.empty()) req.protocol_file = protocol_file;
    return run_calibrate(req, opt, std::cout, std::cerr);
}
