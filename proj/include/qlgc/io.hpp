#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qlgc/decomposition.hpp"
#include "qlgc/dynamics.hpp"
#include "qlgc/pulse_synthesis.hpp"
#include "qlgc/system_model.hpp"

namespace qlgc::io {

using nlohmann::json;

// Every reader throws InputError on malformed or inconsistent documents.

/// {"n": N, "re": [[...]], "im": [[...]]}, row-major; "im" may be omitted.
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

json factorization_to_json(const Factorization& f);
Factorization factorization_from_json(const json& j);

json system_to_json(const LevelSystem& system);
/// Accepts a preset name or an inline system object.
LevelSystem system_from_json(const json& j);

json schedule_to_json(const PulseSchedule& schedule);
PulseSchedule schedule_from_json(const json& j);

json validation_to_json(const ValidationReport& report);

/// "ground", "basis:<n>", "ensemble:<w1>,<w2>,...", or a JSON state document
/// {"pure": matrix-json column} / {"density": matrix-json}.
QuantumState parse_state(std::string_view text, int levels);
QuantumState state_from_json(const json& j);

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

/// Parses "200ps", "1.5 ns", "3e-10" (seconds) and similar; fs, ps, ns, us,
/// ms and s are recognized.
double parse_duration(std::string_view text);
double parse_number(std::string_view text);
std::vector<double> parse_number_list(std::string_view text);

std::string timeseries_header(int levels);
void write_timeseries_csv(std::ostream& out, const TimeSeries& series);
TimeSeries read_timeseries_csv(std::istream& in);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace qlgc::io
