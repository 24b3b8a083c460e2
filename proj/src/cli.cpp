#include "qlgc/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "qlgc/error.hpp"
#include "qlgc/io.hpp"
#include "qlgc/schemes.hpp"

namespace qlgc {

namespace {

namespace fs = std::filesystem;
using io::json;

constexpr double kDefaultOdeTolerance = 1e-9;

// Flag values shared by the subcommands that synthesize pulses.
struct PulseFlags {
  std::string shape = "swp";
  std::string pulse_length;
  double max_field = 0.0;
  std::string tau0 = "20ps";
  std::string gap = "0";
  CLI::Option* length_opt = nullptr;
  CLI::Option* field_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--shape", shape, "Pulse shape: swp or gwp")->capture_default_str();
    length_opt = cmd->add_option("--pulse-length", pulse_length,
                                 "Fixed pulse duration, e.g. 200ps (default policy, 200ps)");
    field_opt = cmd->add_option("--max-field", max_field,
                                "Fixed peak field 2A in V/m; durations follow from the angles");
    length_opt->excludes(field_opt);
    cmd->add_option("--tau0", tau0, "Square-pulse rise time")->capture_default_str();
    cmd->add_option("--gap", gap, "Free evolution between pulses")->capture_default_str();
  }

  SynthesisOptions options() const {
    SynthesisOptions o;
    o.shape = pulse_shape_from_string(shape);
    o.rise_time = io::parse_duration(tau0);
    o.guard_gap = io::parse_duration(gap);
    if (field_opt->count() > 0) {
      o.policy = FixedAmplitude{max_field};
    } else {
      o.policy = FixedDuration{length_opt->count() > 0 ? io::parse_duration(pulse_length) : 200e-12};
    }
    return o;
  }
};

struct SimulationFlags {
  std::string engine = "analytic";
  std::string tol;
  int samples = 512;

  void attach(CLI::App* cmd) {
    cmd->add_option("--engine", engine, "Propagator: analytic or ode")
        ->check(CLI::IsMember({"analytic", "ode"}))
        ->capture_default_str();
    cmd->add_option("--tol", tol, "ODE relative tolerance (default $QLGC_TOL or 1e-9)");
    cmd->add_option("--samples", samples, "Samples per pulse")->capture_default_str();
  }

  double tolerance() const {
    if (!tol.empty()) return io::parse_number(tol);
    if (const char* env = std::getenv("QLGC_TOL"); env && *env) return io::parse_number(env);
    return kDefaultOdeTolerance;
  }

  Propagation run(const PulseSchedule& schedule, const QuantumState& state,
                  std::optional<ComplexMatrix> observable) const {
    PropagationOptions options;
    options.samples_per_pulse = samples;
    options.observable = std::move(observable);
    if (engine == "ode") return propagate_ode(schedule, state, tolerance(), options);
    return propagate_piecewise(schedule, state, options);
  }
};

LevelSystem load_system(const std::string& spec) {
  if (auto preset = find_preset(spec)) return *preset;
  if (fs::exists(spec)) return io::system_from_json(io::read_json_file(spec));
  throw InputError("unknown system '" + spec + "' (not a preset or a readable file)");
}

void write_csv(const std::string& path, const TimeSeries& series) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  io::write_timeseries_csv(out, series);
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir + "': " + ec.message());
}

void report_validation(const ValidationReport& report, std::ostream& out, std::ostream& err) {
  out << "validation: " << (report.passed() ? "passed" : "FAILED") << '\n';
  for (std::size_t k = 0; k < report.pulses.size(); ++k) {
    const PulseCheck& c = report.pulses[k];
    if (!c.rabi_ok) {
      err << "warning: pulse " << k + 1 << " Rabi/detuning ratio " << c.rabi_ratio
          << " is not well below 1\n";
    }
    if (!c.dispersion_ok) {
      err << "warning: pulse " << k + 1 << " is too short for selective excitation (T*dw = "
          << c.dispersion_margin << ")\n";
    }
  }
  if (!report.lifetime_ok) {
    err << "warning: total duration " << report.total_duration
        << " s is not well below the shortest lifetime\n";
  }
}

void print_final_populations(const Propagation& p, std::ostream& out) {
  if (p.series.samples.empty()) return;
  const Sample& last = p.series.samples.back();
  out << "final populations:";
  for (Eigen::Index i = 0; i < last.record.populations.size(); ++i) {
    out << ' ' << io::format_double(last.record.populations(i));
  }
  out << '\n';
}

// ---------------------------------------------------------------- decompose

struct DecomposeCommand {
  std::string input;
  std::string mode = "mod-phase";
  std::string output = "factors.json";

  void attach(CLI::App* cmd) {
    cmd->add_option("input", input, "Unitary matrix JSON")->required();
    cmd->add_option("--mode", mode, "mod-phase or exact")->capture_default_str();
    cmd->add_option("-o,--out", output, "Factorization JSON output")->capture_default_str();
  }

  int run(std::ostream& out) const {
    const ComplexMatrix u = io::matrix_from_json(io::read_json_file(input));
    const DecompositionMode m = decomposition_mode_from_string(mode);
    const Factorization f = m == DecompositionMode::Exact ? decompose_exact(u) : decompose_mod_phase(u);
    io::write_json_file(output, io::factorization_to_json(f));
    out << "factors: " << f.factors.size() << '\n';
    out << "reconstruction error: " << io::format_double((reconstruct(f) - u).norm()) << '\n';
    return kExitOk;
  }
};

// --------------------------------------------------------------- synthesize

struct SynthesizeCommand {
  std::string factors;
  std::string system;
  std::string out_dir = ".";
  PulseFlags pulses;

  void attach(CLI::App* cmd) {
    cmd->add_option("factors", factors, "Factorization JSON")->required();
    cmd->add_option("--system", system, "Preset name or system JSON")->required();
    cmd->add_option("-o,--out-dir", out_dir, "Output directory")->capture_default_str();
    pulses.attach(cmd);
  }

  int run(std::ostream& out, std::ostream& err) const {
    const Factorization f = io::factorization_from_json(io::read_json_file(factors));
    const PulseSchedule schedule =
        schedule_from_factorization(f, load_system(system), pulses.options());
    const ValidationReport report = validate_schedule(schedule);
    ensure_directory(out_dir);
    io::write_json_file((fs::path(out_dir) / "schedule.json").string(),
                        io::schedule_to_json(schedule));
    io::write_json_file((fs::path(out_dir) / "validation.json").string(),
                        io::validation_to_json(report));
    out << "pulses: " << schedule.pulses.size() << '\n';
    out << "total duration: " << io::format_double(schedule.total_duration()) << " s\n";
    report_validation(report, out, err);
    return kExitOk;
  }
};

// ----------------------------------------------------------------- simulate

struct SimulateCommand {
  std::string schedule;
  std::string state = "ground";
  std::string observable;
  std::string output = "timeseries.csv";
  SimulationFlags sim;

  void attach(CLI::App* cmd) {
    cmd->add_option("schedule", schedule, "Schedule JSON")->required();
    cmd->add_option("--state", state,
                    "Initial state: ground, basis:<n>, ensemble:<w,...>, or state JSON")
        ->capture_default_str();
    cmd->add_option("--observable", observable, "Hermitian matrix JSON for obs_avg");
    cmd->add_option("-o,--out", output, "CSV output")->capture_default_str();
    sim.attach(cmd);
  }

  int run(std::ostream& out) const {
    const PulseSchedule s = io::schedule_from_json(io::read_json_file(schedule));
    const QuantumState initial = io::parse_state(state, s.system.levels());
    std::optional<ComplexMatrix> a;
    if (!observable.empty()) a = io::matrix_from_json(io::read_json_file(observable));
    const Propagation p = sim.run(s, initial, a);
    write_csv(output, p.series);
    out << "samples: " << p.series.samples.size() << '\n';
    print_final_populations(p, out);
    return kExitOk;
  }
};

// ------------------------------------------------------------------- scheme

struct SchemeCommand {
  std::string kind;
  std::string request;
  std::string system;
  std::string weights;
  std::string r;
  std::string theta;
  std::string observable;
  std::string out_dir = ".";
  PulseFlags pulses;
  SimulationFlags sim;

  void attach(CLI::App* cmd) {
    cmd->add_option("kind", kind, "transfer, invert, superpose or maximize")
        ->check(CLI::IsMember({"transfer", "invert", "superpose", "maximize"}));
    cmd->add_option("--request", request, "Scheme request JSON (overrides flags)");
    cmd->add_option("--system", system, "Preset name or system JSON");
    cmd->add_option("--weights", weights, "Initial populations, comma separated");
    cmd->add_option("--r", r, "Superposition amplitudes, comma separated");
    cmd->add_option("--theta", theta, "Superposition phases (rad), comma separated");
    cmd->add_option("--observable", observable, "Observable matrix JSON (maximize)");
    cmd->add_option("-o,--out-dir", out_dir, "Output directory")->capture_default_str();
    pulses.attach(cmd);
    sim.attach(cmd);
  }

  json request_document() const {
    json j = json::object();
    if (!request.empty()) j = io::read_json_file(request);
    if (!j.is_object()) throw InputError("scheme request must be a JSON object");
    if (!j.contains("scheme")) {
      if (kind.empty()) throw InputError("scheme kind is required");
      j["scheme"] = kind;
    }
    if (!j.contains("system")) {
      if (system.empty()) throw InputError("--system is required");
      j["system"] = fs::exists(system) ? io::read_json_file(system) : json(system);
    }
    if (!j.contains("weights") && !weights.empty()) j["weights"] = io::parse_number_list(weights);
    if (!j.contains("r") && !r.empty()) j["r"] = io::parse_number_list(r);
    if (!j.contains("theta") && !theta.empty()) j["theta"] = io::parse_number_list(theta);
    if (!j.contains("observable") && !observable.empty()) {
      j["observable"] = io::read_json_file(observable);
    }
    return j;
  }

  int run(std::ostream& out, std::ostream& err) const {
    const json req = request_document();
    const std::string name = req.at("scheme").is_string() ? req.at("scheme").get<std::string>() : "";
    const LevelSystem sys = io::system_from_json(req.at("system"));
    const int n = sys.levels();

    auto numbers = [&](const char* key) {
      if (!req.contains(key)) throw InputError(std::string("scheme '") + name + "' needs '" + key + "'");
      try {
        return req.at(key).get<std::vector<double>>();
      } catch (const json::exception&) {
        throw InputError(std::string("'") + key + "' must be a list of numbers");
      }
    };
    auto sized = [&](std::vector<double> v, const char* key) {
      if (static_cast<int>(v.size()) != n) {
        throw InputError(std::string("'") + key + "' must have one entry per level");
      }
      return v;
    };

    std::optional<ComplexMatrix> tracked;
    std::optional<SchemeResult> scheme;
    if (name == "transfer") {
      scheme = population_transfer_scheme(n);
    } else if (name == "invert") {
      scheme = inversion_scheme(sized(numbers("weights"), "weights"));
    } else if (name == "superpose") {
      const std::vector<double> amplitudes = sized(numbers("r"), "r");
      const std::vector<double> phases =
          req.contains("theta") ? sized(numbers("theta"), "theta") : std::vector<double>(n, 0.0);
      scheme = superposition_scheme(amplitudes, phases);
    } else if (name == "maximize") {
      const ComplexMatrix a = req.contains("observable") ? io::matrix_from_json(req.at("observable"))
                                                         : dipole_operator(sys);
      scheme = observable_max_scheme(a, sized(numbers("weights"), "weights"));
      tracked = a;
    } else {
      throw InputError("unknown scheme '" + name + "'");
    }

    const PulseSchedule schedule =
        schedule_from_factorization(scheme->factorization, sys, pulses.options());
    const ValidationReport report = validate_schedule(schedule);
    const Propagation p = sim.run(schedule, scheme->initial, tracked);

    ensure_directory(out_dir);
    const fs::path dir(out_dir);
    io::write_json_file((dir / "factors.json").string(),
                        io::factorization_to_json(scheme->factorization));
    io::write_json_file((dir / "schedule.json").string(), io::schedule_to_json(schedule));
    io::write_json_file((dir / "validation.json").string(), io::validation_to_json(report));
    write_csv((dir / "timeseries.csv").string(), p.series);

    const double achieved = scheme->objective.evaluate(p.final_state.density_matrix());
    out << "scheme: " << scheme->name << " on " << sys.name << '\n';
    out << "pulses: " << schedule.pulses.size() << '\n';
    out << "total duration: " << io::format_double(schedule.total_duration()) << " s\n";
    print_final_populations(p, out);
    if (scheme->predicted_objective) {
      const double predicted = *scheme->predicted_objective;
      out << "objective achieved: " << io::format_double(achieved) << '\n';
      out << "objective predicted: " << io::format_double(predicted) << '\n';
      if (predicted != 0.0) {
        out << "achieved/predicted ratio: " << std::fixed << std::setprecision(9)
            << achieved / predicted << std::defaultfloat << '\n';
      }
    }
    for (const std::string& note : scheme->notes) out << "note: " << note << '\n';
    report_validation(report, out, err);
    return kExitOk;
  }
};

// ------------------------------------------------------------------ presets

void show_preset(const LevelSystem& s, std::ostream& out) {
  out << "name: " << s.name << '\n';
  out << "levels: " << s.levels() << '\n';
  if (s.name == "hf4") {
    out << "omega0 = " << io::format_double(hf::omega0) << " rad/s\n";
    out << "B = " << io::format_double(hf::anharmonicity) << '\n';
    out << "p0 = " << io::format_double(hf::dipole_unit) << " C m\n";
  }
  for (int m = 1; m <= s.transitions(); ++m) {
    out << "transition " << m << ": omega = " << io::format_double(s.frequency(m))
        << " rad/s, d = " << io::format_double(s.dipole(m)) << " C m\n";
  }
  for (std::size_t k = 0; k < s.lifetimes.size(); ++k) {
    out << "lifetime level " << k + 2 << ": " << io::format_double(s.lifetimes[k]) << " s\n";
  }
  out << "min detuning = " << io::format_double(min_detuning(s)) << " rad/s\n";
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pulse-sequence compiler and simulator for N-level ladder systems", "qlgc"};
  app.require_subcommand(1);

  DecomposeCommand decompose;
  decompose.attach(app.add_subcommand("decompose", "Factorize a unitary into pulse rotations"));
  SynthesizeCommand synthesize;
  synthesize.attach(app.add_subcommand("synthesize", "Turn a factorization into a pulse schedule"));
  SimulateCommand simulate;
  simulate.attach(app.add_subcommand("simulate", "Propagate a state under a pulse schedule"));
  SchemeCommand scheme;
  scheme.attach(app.add_subcommand("scheme", "Build, synthesize and simulate a control scheme"));

  CLI::App* presets = app.add_subcommand("presets", "List or show built-in systems");
  presets->require_subcommand(1);
  presets->add_subcommand("list", "List preset names");
  std::string preset_name;
  presets->add_subcommand("show", "Show one preset")->add_option("name", preset_name)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  if (app.got_subcommand("decompose")) return decompose.run(out);
  if (app.got_subcommand("synthesize")) return synthesize.run(out, err);
  if (app.got_subcommand("simulate")) return simulate.run(out);
  if (app.got_subcommand("scheme")) return scheme.run(out, err);

  if (presets->got_subcommand("list")) {
    for (const std::string& name : preset_names()) out << name << '\n';
    return kExitOk;
  }
  auto preset = find_preset(preset_name);
  if (!preset) {
    err << "error: unknown preset '" << preset_name << "'\n";
    return kExitInputError;
  }
  show_preset(*preset, out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace qlgc
