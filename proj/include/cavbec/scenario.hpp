#pragma once

// Scenario execution for the command-line front end. Results are first built
// in memory and only written once everything succeeded; a failed write
// removes whatever was already written.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cavbec/config.hpp"
#include "cavbec/presets.hpp"

namespace cavbec {

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(std::string_view s);

struct RunOptions {
    std::filesystem::path out_dir = ".";
    OutputFormat format = OutputFormat::Csv;
    int threads = 1;
};

struct OutputFile {
    std::string name;      // relative to out_dir
    std::string content;
};

struct RunResult {
    std::vector<OutputFile> files;
    std::string stdout_text;
};

// Throw cavbec::Error on failure.
RunResult evaluate_scenario(const Scenario& s, const RunOptions& opt);
RunResult evaluate_figure(std::string_view preset, const RunOptions& opt);

struct CalibrateRequest {
    double splitting = 0.0;
    FrequencyUnit unit = FrequencyUnit::Kappa;
    std::optional<std::filesystem::path> curve_file;
    std::optional<std::filesystem::path> protocol_file;
    SweepSpec sweep{0.0, 120.0, 241};
};

RunResult evaluate_calibration(const CalibrateRequest& req, const RunOptions& opt);

json load_json_file(const std::filesystem::path& path);

// Exit codes: 0 success, 2 validation error, 3 numeric error, 1 I/O or
// internal failure. Errors go to err as one JSON record
//   {"error": kind, "message": ..., "field": ...}.
int run_scenario(const std::filesystem::path& config, std::optional<Task> implied, const RunOptions& opt,
                 std::ostream& out, std::ostream& err);
int run_figure(std::string_view preset, const RunOptions& opt, std::ostream& out, std::ostream& err);
int run_calibrate(const CalibrateRequest& req, const RunOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace cavbec
