#include "qlgc/pulse_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qlgc/constants.hpp"
#include "qlgc/error.hpp"

namespace qlgc {

namespace {

using constants::hbar;
using constants::pi;

const double kSqrtPi = std::sqrt(pi);

// Repeated integral of erfc: ierfc(y) = e^{-y^2}/sqrt(pi) - y erfc(y), y >= 0.
double ierfc(double y) { return std::exp(-y * y) / kSqrtPi - y * std::erfc(y); }

// Antiderivative of erf, written to stay accurate for large |x|.
double erf_primitive(double x) {
  const double y = std::abs(x);
  return y + ierfc(y);
}

void check_square(double duration, double tau0) {
  if (!(tau0 > 0.0)) throw InputError("square pulse rise time must be positive");
  if (!(duration > tau0)) {
    std::ostringstream msg;
    msg << "square pulse duration " << duration << " s must exceed its rise time " << tau0 << " s";
    throw InputError(msg.str());
  }
}

void check_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InputError(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

std::string_view to_string(PulseShape shape) {
  return shape == PulseShape::Square ? "swp" : "gwp";
}

PulseShape pulse_shape_from_string(std::string_view text) {
  if (text == "swp" || text == "square") return PulseShape::Square;
  if (text == "gwp" || text == "gaussian") return PulseShape::Gaussian;
  throw InputError("unknown pulse shape '" + std::string(text) + "' (expected swp or gwp)");
}

double swp_envelope(double t, double half_amplitude, double start, double duration, double tau0) {
  const double s = t - start;
  return half_amplitude * (std::erf(4.0 * (s - 0.5 * tau0) / tau0) -
                           std::erf(4.0 * (s - duration + 0.5 * tau0) / tau0));
}

double gwp_envelope(double t, double half_amplitude, double start, double duration) {
  const double q = 4.0 / duration;
  const double x = q * (t - start - 0.5 * duration);
  return 2.0 * half_amplitude * std::exp(-x * x);
}

double swp_unit_area(double elapsed, double duration, double tau0) {
  const double a = 4.0 / tau0;
  const double rise_centre = 0.5 * tau0;
  const double decay_centre = duration - 0.5 * tau0;
  const double rise = erf_primitive(a * (elapsed - rise_centre)) - erf_primitive(-a * rise_centre);
  const double decay =
      erf_primitive(a * (elapsed - decay_centre)) - erf_primitive(-a * decay_centre);
  return (rise - decay) / (2.0 * a);
}

double gwp_unit_area(double elapsed, double duration) {
  const double q = 4.0 / duration;
  return kSqrtPi / (2.0 * q) * (std::erf(q * (elapsed - 0.5 * duration)) + std::erf(2.0));
}

double window_coverage(PulseShape shape, double duration, double tau0) {
  if (shape == PulseShape::Gaussian) return std::erf(2.0);
  check_square(duration, tau0);
  return swp_unit_area(duration, duration, tau0) / (duration - tau0);
}

double amplitude_for_area(double angle, PulseShape shape, double duration, double tau0,
                          double dipole) {
  check_positive(angle, "rotation angle");
  check_positive(duration, "pulse duration");
  check_positive(dipole, "transition dipole");
  if (shape == PulseShape::Square) {
    check_square(duration, tau0);
    return hbar * angle / ((duration - tau0) * dipole);
  }
  return 4.0 * hbar * angle / (kSqrtPi * duration * dipole);
}

double duration_for_amplitude(double angle, PulseShape shape, double peak_field, double dipole,
                              double tau0) {
  check_positive(angle, "rotation angle");
  check_positive(peak_field, "peak field");
  check_positive(dipole, "transition dipole");
  if (shape == PulseShape::Square) {
    if (!(tau0 > 0.0)) throw InputError("square pulse rise time must be positive");
    return 2.0 * angle * hbar / (peak_field * dipole) + tau0;
  }
  return 8.0 * angle * hbar / (kSqrtPi * peak_field * dipole);
}

double PulseSpec::envelope(double t) const {
  if (t < start || t > end) return 0.0;
  if (shape == PulseShape::Square) return swp_envelope(t, half_amplitude, start, duration(), rise_time);
  return gwp_envelope(t, half_amplitude, start, duration());
}

double PulseSpec::area_until(double t) const {
  const double elapsed = std::clamp(t - start, 0.0, duration());
  const double unit = shape == PulseShape::Square ? swp_unit_area(elapsed, duration(), rise_time)
                                                  : gwp_unit_area(elapsed, duration());
  return 2.0 * half_amplitude * unit;
}

void PulseSchedule::check() const {
  const int n = system.levels();
  double previous_end = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pulses.size(); ++k) {
    const PulseSpec& p = pulses[k];
    std::ostringstream where;
    where << "pulse " << k + 1 << ": ";
    if (p.transition < 1 || p.transition > n - 1) {
      throw InputError(where.str() + "transition out of range for the system");
    }
    if (!(p.end > p.start)) throw InputError(where.str() + "end must follow start");
    if (p.shape == PulseShape::Square && !(p.duration() > p.rise_time && p.rise_time > 0.0)) {
      throw InputError(where.str() + "square pulse must be longer than its rise time");
    }
    if (!(p.half_amplitude >= 0.0) || !std::isfinite(p.half_amplitude)) {
      throw InputError(where.str() + "amplitude must be non-negative");
    }
    // Tolerate round-off where consecutive windows share an endpoint.
    if (p.start < previous_end - 1e-9 * std::abs(previous_end)) {
      throw InputError(where.str() + "overlaps the previous pulse");
    }
    previous_end = p.end;
  }
}

PulseSchedule schedule_from_factorization(const Factorization& f, const LevelSystem& system,
                                          const SynthesisOptions& options) {
  if (f.n != system.levels()) {
    std::ostringstream msg;
    msg << "factorization has dimension " << f.n << " but system " << system.name << " has "
        << system.levels() << " levels";
    throw InputError(msg.str());
  }
  if (options.guard_gap < 0.0) throw InputError("guard gap must be non-negative");
  if (options.shape == PulseShape::Square && !(options.rise_time > 0.0)) {
    throw InputError("square pulse rise time must be positive");
  }
  if (const auto* fixed = std::get_if<FixedDuration>(&options.policy)) {
    check_positive(fixed->duration, "pulse duration");
    if (options.shape == PulseShape::Square) check_square(fixed->duration, options.rise_time);
  } else {
    check_positive(std::get<FixedAmplitude>(options.policy).peak_field, "peak field");
  }

  PulseSchedule schedule;
  schedule.system = system;
  double cursor = 0.0;
  for (const RotationFactor& raw : f.factors) {
    if (raw.transition < 1 || raw.transition > system.transitions()) {
      throw InputError("factor transition exceeds the system's transitions");
    }
    const RotationFactor factor = normalize_sign(raw);
    if (factor.angle < kAngleEpsilon) continue;
    const double dipole = system.dipole(factor.transition);

    double duration = 0.0;
    if (const auto* fixed = std::get_if<FixedDuration>(&options.policy)) {
      duration = fixed->duration;
    } else {
      duration = duration_for_amplitude(factor.angle, options.shape,
                                        std::get<FixedAmplitude>(options.policy).peak_field,
                                        dipole, options.rise_time);
    }

    PulseSpec pulse;
    pulse.shape = options.shape;
    pulse.transition = factor.transition;
    pulse.carrier = system.frequency(factor.transition);
    pulse.phase = factor.phase;
    pulse.rise_time = options.shape == PulseShape::Square ? options.rise_time : 0.0;
    pulse.angle = factor.angle;
    pulse.start = cursor;
    pulse.end = cursor + duration;
    pulse.half_amplitude =
        amplitude_for_area(factor.angle, options.shape, duration, options.rise_time, dipole) /
        window_coverage(options.shape, duration, options.rise_time);
    schedule.pulses.push_back(pulse);
    cursor = pulse.end + options.guard_gap;
  }
  return schedule;
}

bool ValidationReport::passed() const {
  if (!lifetime_ok) return false;
  return std::all_of(pulses.begin(), pulses.end(),
                     [](const PulseCheck& p) { return p.rabi_ok && p.dispersion_ok; });
}

ValidationReport validate_schedule(const PulseSchedule& schedule) {
  const ValidityBudget budget = validity_budget(schedule.system);
  ValidationReport report;
  report.min_detuning = budget.min_detuning;
  report.min_lifetime = budget.min_lifetime;
  report.total_duration = schedule.total_duration();

  for (const PulseSpec& p : schedule.pulses) {
    PulseCheck check;
    check.peak_rabi = p.peak_field() * schedule.system.dipole(p.transition) / hbar;
    check.peak_intensity =
        constants::epsilon0 * constants::speed_of_light * p.peak_field() * p.peak_field();
    if (std::isinf(budget.min_detuning)) {
      check.rabi_ratio = 0.0;
      check.dispersion_margin = std::numeric_limits<double>::infinity();
    } else {
      check.rabi_ratio = check.peak_rabi / budget.min_detuning;
      check.dispersion_margin = p.duration() * budget.min_detuning;
    }
    check.rabi_ok = check.rabi_ratio < kMaxRabiRatio;
    const double margin = p.shape == PulseShape::Square ? kMinDispersionMarginSquare
                                                        : kMinDispersionMarginGaussian;
    check.dispersion_ok = check.dispersion_margin > margin;
    report.pulses.push_back(check);
  }
  if (budget.min_lifetime) {
    report.lifetime_ok = report.total_duration < kLifetimeFraction * *budget.min_lifetime;
  }
  return report;
}

double total_duration_bound(const LevelSystem& system, std::span<const double> peak_fields,
                            PulseShape shape, double tau0, DecompositionMode mode) {
  const int n = system.levels();
  if (static_cast<int>(peak_fields.size()) != n - 1) {
    throw InputError("need one peak field per transition");
  }
  const int extra = mode == DecompositionMode::Exact ? 2 : 0;
  double total = 0.0;
  for (int m = 1; m <= n - 1; ++m) {
    const double longest =
        duration_for_amplitude(pi / 2, shape, peak_fields[m - 1], system.dipole(m), tau0);
    total += longest * (n - m + extra);
  }
  return total;
}

}  // namespace qlgc
