#include "qlgc/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "qlgc/error.hpp"

namespace qlgc::io {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Wraps nlohmann's type errors so callers only see InputError.
template <typename T>
T get_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_optional(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return get_field<T>(j, key);
}

}  // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(m.cols()), c(m.cols());
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      r[k] = m(i, k).real();
      c[k] = m(i, k).imag();
    }
    re.push_back(r);
    im.push_back(c);
  }
  return {{"n", m.rows()}, {"re", re}, {"im", im}};
}

ComplexMatrix matrix_from_json(const json& j) {
  const auto re = get_field<std::vector<std::vector<double>>>(j, "re");
  const auto im = get_optional<std::vector<std::vector<double>>>(j, "im", {});
  const int n = get_optional<int>(j, "n", static_cast<int>(re.size()));
  if (n < 1 || static_cast<int>(re.size()) != n) throw InputError("matrix must have n rows");
  if (!im.empty() && static_cast<int>(im.size()) != n) {
    throw InputError("imaginary part has the wrong number of rows");
  }
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(re[i].size()) != n || (!im.empty() && static_cast<int>(im[i].size()) != n)) {
      throw InputError("matrix must be square");
    }
    for (int k = 0; k < n; ++k) m(i, k) = Complex(re[i][k], im.empty() ? 0.0 : im[i][k]);
  }
  if (!m.allFinite()) throw InputError("matrix has non-finite entries");
  return m;
}

json factorization_to_json(const Factorization& f) {
  json factors = json::array();
  for (const RotationFactor& v : f.factors) {
    factors.push_back({{"transition", v.transition}, {"angle_rad", v.angle}, {"phase_rad", v.phase}});
  }
  return {{"n", f.n},
          {"mode", std::string(to_string(f.mode))},
          {"factors", factors},
          {"thetas_rad", f.residual.thetas},
          {"gamma_rad", f.residual.global}};
}

Factorization factorization_from_json(const json& j) {
  Factorization f;
  f.n = get_field<int>(j, "n");
  if (f.n < 1) throw InputError("factorization dimension must be positive");
  f.mode = decomposition_mode_from_string(get_optional<std::string>(j, "mode", "mod-phase"));
  const json factors = get_field<json>(j, "factors");
  if (!factors.is_array()) throw InputError("'factors' must be an array");
  for (const json& item : factors) {
    RotationFactor v{get_field<int>(item, "transition"), get_field<double>(item, "angle_rad"),
                     get_field<double>(item, "phase_rad")};
    if (v.transition < 1 || v.transition >= f.n) throw InputError("factor transition out of range");
    f.factors.push_back(v);
  }
  f.residual.thetas = get_optional<std::vector<double>>(j, "thetas_rad", std::vector<double>(f.n, 0.0));
  if (static_cast<int>(f.residual.thetas.size()) != f.n) {
    throw InputError("'thetas_rad' must have n entries");
  }
  f.residual.global = get_optional<double>(j, "gamma_rad", 0.0);
  return f;
}

json system_to_json(const LevelSystem& system) {
  json j{{"name", system.name},
         {"energies_J", system.energies},
         {"dipoles_Cm", system.dipoles},
         {"frequencies_rads", system.frequencies}};
  if (!system.lifetimes.empty()) j["lifetimes_s"] = system.lifetimes;
  if (system.min_detuning_override) j["min_detuning_rads"] = *system.min_detuning_override;
  return j;
}

LevelSystem system_from_json(const json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (auto preset = find_preset(name)) return *preset;
    throw InputError("unknown system preset '" + name + "'");
  }
  if (!j.is_object()) throw InputError("system must be a preset name or an object");
  LevelSystem system = build_ladder_system(
      get_field<std::vector<double>>(j, "energies_J"), get_field<std::vector<double>>(j, "dipoles_Cm"),
      get_optional<std::vector<double>>(j, "lifetimes_s", {}),
      get_optional<std::string>(j, "name", "custom"));
  if (j.contains("min_detuning_rads") && !j.at("min_detuning_rads").is_null()) {
    const double w = get_field<double>(j, "min_detuning_rads");
    if (!(w > 0.0)) throw InputError("min_detuning_rads must be positive");
    system.min_detuning_override = w;
  }
  return system;
}

json schedule_to_json(const PulseSchedule& schedule) {
  json pulses = json::array();
  for (const PulseSpec& p : schedule.pulses) {
    json item{{"shape", std::string(to_string(p.shape))},
              {"transition", p.transition},
              {"carrier_rads", p.carrier},
              {"phase_rad", p.phase},
              {"half_amplitude_Vm", p.half_amplitude},
              {"start_s", p.start},
              {"end_s", p.end},
              {"angle_rad", p.angle}};
    if (p.shape == PulseShape::Square) {
      item["tau0_s"] = p.rise_time;
    } else {
      item["q_per_s"] = p.width();
    }
    pulses.push_back(item);
  }
  return {{"system", system_to_json(schedule.system)},
          {"total_duration_s", schedule.total_duration()},
          {"pulses", pulses}};
}

PulseSchedule schedule_from_json(const json& j) {
  PulseSchedule schedule;
  schedule.system = system_from_json(get_field<json>(j, "system"));
  const json pulses = get_optional<json>(j, "pulses", json::array());
  if (!pulses.is_array()) throw InputError("'pulses' must be an array");
  for (const json& item : pulses) {
    PulseSpec p;
    p.shape = pulse_shape_from_string(get_field<std::string>(item, "shape"));
    p.transition = get_field<int>(item, "transition");
    if (p.transition < 1 || p.transition > schedule.system.transitions()) {
      throw InputError("pulse transition out of range");
    }
    p.carrier = get_optional<double>(item, "carrier_rads", schedule.system.frequency(p.transition));
    p.phase = get_field<double>(item, "phase_rad");
    p.half_amplitude = get_field<double>(item, "half_amplitude_Vm");
    p.start = get_field<double>(item, "start_s");
    p.end = get_field<double>(item, "end_s");
    p.angle = get_optional<double>(item, "angle_rad", 0.0);
    if (p.shape == PulseShape::Square) p.rise_time = get_field<double>(item, "tau0_s");
    schedule.pulses.push_back(p);
  }
  schedule.check();
  return schedule;
}

json validation_to_json(const ValidationReport& report) {
  json pulses = json::array();
  for (const PulseCheck& c : report.pulses) {
    pulses.push_back({{"peak_rabi_rads", c.peak_rabi},
                      {"rabi_ratio", c.rabi_ratio},
                      {"dispersion_margin", std::isinf(c.dispersion_margin) ? json(nullptr)
                                                                             : json(c.dispersion_margin)},
                      {"peak_intensity_Wm2", c.peak_intensity},
                      {"rabi_ok", c.rabi_ok},
                      {"dispersion_ok", c.dispersion_ok}});
  }
  json j{{"passed", report.passed()},
         {"min_detuning_rads",
          std::isinf(report.min_detuning) ? json(nullptr) : json(report.min_detuning)},
         {"total_duration_s", report.total_duration},
         {"lifetime_ok", report.lifetime_ok},
         {"pulses", pulses}};
  j["min_lifetime_s"] = report.min_lifetime ? json(*report.min_lifetime) : json(nullptr);
  return j;
}

QuantumState state_from_json(const json& j) {
  if (j.is_object() && j.contains("pure")) {
    const json& v = j.at("pure");
    const auto re = get_field<std::vector<double>>(v, "re");
    const auto im = get_optional<std::vector<double>>(v, "im", std::vector<double>(re.size(), 0.0));
    if (re.size() != im.size()) throw InputError("state vector parts differ in length");
    ComplexVector psi(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) psi(i) = Complex(re[i], im[i]);
    return QuantumState::pure(std::move(psi));
  }
  if (j.is_object() && j.contains("density")) return QuantumState::density(matrix_from_json(j.at("density")));
  if (j.is_object() && j.contains("weights")) {
    return QuantumState::ensemble(get_field<std::vector<double>>(j, "weights"));
  }
  throw InputError("state document needs 'pure', 'density' or 'weights'");
}

QuantumState parse_state(std::string_view text, int levels) {
  text = trim(text);
  QuantumState state = [&] {
    if (text == "ground") return QuantumState::basis(levels, 1);
    if (text.starts_with("basis:")) {
      return QuantumState::basis(levels, static_cast<int>(parse_number(text.substr(6))));
    }
    if (text.starts_with("ensemble:")) return QuantumState::ensemble(parse_number_list(text.substr(9)));
    if (!text.empty() && text.front() == '{') {
      try {
        return state_from_json(json::parse(text));
      } catch (const json::exception& e) {
        throw InputError(std::string("state JSON: ") + e.what());
      }
    }
    return state_from_json(read_json_file(std::string(text)));
  }();
  if (state.dimension() != levels) {
    std::ostringstream msg;
    msg << "state has dimension " << state.dimension() << " but the system has " << levels
        << " levels";
    throw InputError(msg.str());
  }
  return state;
}

std::string format_double(double x) {
  std::array<char, 64> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), x);
  return std::string(buffer.data(), result.ptr);
}

double parse_number(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw InputError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> values;
  while (true) {
    const std::size_t comma = text.find(',');
    values.push_back(parse_number(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return values;
}

double parse_duration(std::string_view text) {
  text = trim(text);
  struct Unit {
    std::string_view suffix;
    double scale;
  };
  // Longer suffixes first so "ps" is not read as "s".
  static constexpr std::array<Unit, 6> units{{{"fs", 1e-15},
                                              {"ps", 1e-12},
                                              {"ns", 1e-9},
                                              {"us", 1e-6},
                                              {"ms", 1e-3},
                                              {"s", 1.0}}};
  for (const Unit& u : units) {
    if (text.size() > u.suffix.size() && text.ends_with(u.suffix)) {
      return parse_number(text.substr(0, text.size() - u.suffix.size())) * u.scale;
    }
  }
  return parse_number(text);
}

std::string timeseries_header(int levels) {
  std::ostringstream h;
  h << "t_s";
  for (int i = 1; i <= levels; ++i) h << ",pop_" << i;
  for (int i = 1; i <= levels; ++i) {
    for (int k = i + 1; k <= levels; ++k) h << ",coh_" << i << '_' << k;
  }
  h << ",energy_J,obs_avg,envelope_Vm";
  return h.str();
}

void write_timeseries_csv(std::ostream& out, const TimeSeries& series) {
  out << timeseries_header(series.levels) << '\n';
  for (const Sample& s : series.samples) {
    out << format_double(s.t);
    for (Eigen::Index i = 0; i < s.record.populations.size(); ++i) {
      out << ',' << format_double(s.record.populations(i));
    }
    for (double c : s.record.coherences) out << ',' << format_double(c);
    out << ',' << format_double(s.record.energy) << ',';
    if (s.record.observable) out << format_double(*s.record.observable);
    out << ',' << format_double(s.envelope) << '\n';
  }
}

TimeSeries read_timeseries_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("time series CSV is empty");
  // The header fixes N: it has 1 + N + N(N-1)/2 + 3 columns.
  const std::size_t columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  int levels = 1;
  while (static_cast<std::size_t>(4 + levels + levels * (levels - 1) / 2) < columns) ++levels;
  if (line != timeseries_header(levels)) throw InputError("unrecognized time series header");

  TimeSeries series;
  series.levels = levels;
  const std::size_t coherence_count = static_cast<std::size_t>(levels * (levels - 1) / 2);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const std::size_t comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != columns) throw InputError("time series row has the wrong column count");
    Sample s;
    std::size_t c = 0;
    s.t = parse_number(fields[c++]);
    s.record.populations.resize(levels);
    for (int i = 0; i < levels; ++i) s.record.populations(i) = parse_number(fields[c++]);
    for (std::size_t k = 0; k < coherence_count; ++k) s.record.coherences.push_back(parse_number(fields[c++]));
    s.record.energy = parse_number(fields[c++]);
    if (!trim(fields[c]).empty()) {
      s.record.observable = parse_number(fields[c]);
      series.has_observable = true;
    }
    ++c;
    s.envelope = parse_number(fields[c]);
    series.samples.push_back(std::move(s));
  }
  return series;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace qlgc::io
