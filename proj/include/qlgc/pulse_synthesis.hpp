#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "qlgc/decomposition.hpp"
#include "qlgc/system_model.hpp"

namespace qlgc {

enum class PulseShape {
  Square,    // SWP: erf-smoothed rise and decay of duration tau0
  Gaussian,  // GWP: width q = 4 / duration, centred in the window
};

std::string_view to_string(PulseShape shape);  // "swp" / "gwp"
PulseShape pulse_shape_from_string(std::string_view text);

// Envelope shapes. Both return the full field envelope 2A(t); `t` is absolute
// time and `start` the beginning of the pulse window.

/// A {erf[4(s - tau0/2)/tau0] - erf[4(s - T + tau0/2)/tau0]}, s = t - start.
/// Plateau 2A; the area over the whole line is exactly 2A (T - tau0).
double swp_envelope(double t, double half_amplitude, double start, double duration, double tau0);

/// 2A exp[-q^2 (t - start - T/2)^2] with q = 4/T.
double gwp_envelope(double t, double half_amplitude, double start, double duration);

/// Integral of the unit-amplitude (2A = 1) envelope from the window start to
/// `start + elapsed`, in closed form.
double swp_unit_area(double elapsed, double duration, double tau0);
double gwp_unit_area(double elapsed, double duration);

/// Window area divided by whole-line area: erf(2) for Gaussians, 1 minus an
/// ierfc(2) edge loss for square pulses.
double window_coverage(PulseShape shape, double duration, double tau0);

/// Half-amplitude A for which the whole-line envelope area is 2C hbar / d:
/// SWP A = hbar C / ((T - tau0) d), GWP A = 4 hbar C / (sqrt(pi) T d).
double amplitude_for_area(double angle, PulseShape shape, double duration, double tau0,
                          double dipole);

/// Pulse length at a fixed field peak 2A = `peak_field`:
/// SWP T = 2 C hbar / (peak d) + tau0, GWP T = 8 C hbar / (sqrt(pi) peak d).
double duration_for_amplitude(double angle, PulseShape shape, double peak_field, double dipole,
                              double tau0);

struct PulseSpec {
  PulseShape shape = PulseShape::Square;
  int transition = 1;
  double carrier = 0.0;         // rad/s
  double phase = 0.0;           // rad
  double half_amplitude = 0.0;  // A, V/m; field peak is 2A
  double start = 0.0;           // s
  double end = 0.0;             // s
  double rise_time = 0.0;       // tau0, s (square pulses)
  double angle = 0.0;           // target C, rad

  double duration() const { return end - start; }
  double width() const { return 4.0 / duration(); }  // q, 1/s (Gaussian pulses)
  double peak_field() const { return 2.0 * half_amplitude; }

  /// 2A(t) inside [start, end], zero outside.
  double envelope(double t) const;
  /// Integral of 2A(t') over [start, t], t clamped to the window.
  double area_until(double t) const;
};

struct PulseSchedule {
  LevelSystem system;
  std::vector<PulseSpec> pulses;

  double total_duration() const { return pulses.empty() ? 0.0 : pulses.back().end; }
  /// Throws InputError if pulses are unsorted, overlapping, or inconsistent
  /// with the system.
  void check() const;
};

struct FixedDuration {
  double duration = 200e-12;  // s
};

struct FixedAmplitude {
  double peak_field = 1e5;  // V/m, the cap on 2A
};

struct SynthesisOptions {
  PulseShape shape = PulseShape::Square;
  std::variant<FixedDuration, FixedAmplitude> policy = FixedDuration{};
  double rise_time = 20e-12;  // tau0, square pulses only
  double guard_gap = 0.0;     // free evolution between pulses, s
};

/// One pulse per factor, back to back, in application order. Pulse lengths
/// come from the policy; the amplitude is then set so that the area inside
/// the window is exactly 2C hbar / d.
PulseSchedule schedule_from_factorization(const Factorization& f, const LevelSystem& system,
                                          const SynthesisOptions& options);

struct PulseCheck {
  double peak_rabi = 0.0;          // rad/s
  double rabi_ratio = 0.0;         // peak_rabi / min detuning
  double dispersion_margin = 0.0;  // duration * min detuning
  double peak_intensity = 0.0;     // W/m^2, eps0 c (2A)^2
  bool rabi_ok = true;
  bool dispersion_ok = true;
};

struct ValidationReport {
  double min_detuning = 0.0;
  std::optional<double> min_lifetime;
  double total_duration = 0.0;
  std::vector<PulseCheck> pulses;
  bool lifetime_ok = true;

  bool passed() const;
};

// "Much less than" thresholds.
inline constexpr double kMaxRabiRatio = 0.1;
inline constexpr double kMinDispersionMarginSquare = 10.0;
inline constexpr double kMinDispersionMarginGaussian = 40.0;
inline constexpr double kLifetimeFraction = 0.1;

/// Report-only check of the selective-excitation and lifetime conditions.
ValidationReport validate_schedule(const PulseSchedule& schedule);

/// Worst-case time to implement any unitary with C <= pi/2 rotations:
/// sum over m of max duration_m * (N - m), or (N - m + 2) in exact mode.
/// `peak_fields` holds one field cap per transition.
double total_duration_bound(const LevelSystem& system, std::span<const double> peak_fields,
                            PulseShape shape, double tau0,
                            DecompositionMode mode = DecompositionMode::ModPhase);

}  // namespace qlgc
