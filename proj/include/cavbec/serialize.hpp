#pragma once

// CSV / JSON encodings of the library's result types. Numbers in CSV use the
// shortest decimal form that round-trips to the same double, so identical
// inputs give byte-identical files.

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cavbec/calib.hpp"
#include "cavbec/lindyn.hpp"
#include "cavbec/params.hpp"
#include "cavbec/spectra.hpp"
#include "cavbec/steady.hpp"

namespace cavbec {

using json = nlohmann::ordered_json;

std::string format_number(double v);   // "nan", "inf", "-inf" for non-finite

struct Column {
    std::string name;
    std::vector<double> values;
};

std::string csv_table(const std::vector<Column>& columns);

// "omega_over_kappa" etc.
std::string omega_column_name(GridUnit unit);

json to_json(const ModelParams& m);
json to_json(const WorkingPoint& wp);
json to_json(const SteadyState& s);
json to_json(const ModeReport& r);
json to_json(const Grid& g);

// Metadata sidecar for a spectrum file.
json spectrum_sidecar(const SpectrumSeries& s, const ModelParams& m, const Grid& grid,
                      const std::vector<std::string>& warnings = {});

std::string curve_csv(const CalibrationCurve& c);
json curve_to_json(const CalibrationCurve& c);
CalibrationCurve curve_from_json(const json& j);

json to_json(const SwaveEstimate& e, const CalibrationCurve& c);

std::string hex_hash(std::uint64_t h);

}  // namespace cavbec
