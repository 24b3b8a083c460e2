#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support/approx.hpp"

#include <cmath>

#include "../support/oracles.hpp"
#include "qlgc/constants.hpp"
#include "qlgc/error.hpp"
#include "qlgc/pulse_synthesis.hpp"

using namespace qlgc;
using constants::hbar;
using constants::pi;

TEST_CASE("envelope shapes") {
  const double T = 200e-12, tau0 = 20e-12, A = 3.0;
  CHECK(swp_envelope(100e-12, A, 0.0, T, tau0) == rel(2 * A));
  CHECK(swp_envelope(tau0 / 2, A, 0.0, T, tau0) == rel(A).epsilon(1e-9));
  CHECK(gwp_envelope(T / 2, A, 0.0, T) == rel(2 * A));
  CHECK(gwp_envelope(0.0, A, 0.0, T) == rel(2 * A * std::exp(-4.0)));
  // Shifted window.
  CHECK(gwp_envelope(5e-9 + T / 2, A, 5e-9, T) == rel(2 * A));
}

TEST_CASE("closed-form running areas agree with quadrature") {
  const double T = 200e-12, tau0 = 20e-12;
  CHECK(swp_unit_area(0.0, T, tau0) == 0.0);
  for (double frac : {0.03, 0.1, 0.5, 0.93, 1.0}) {
    const double s = frac * T;
    const double swp = oracle::simpson(
        [&](double t) { return swp_envelope(t, 0.5, 0.0, T, tau0); }, 0.0, s);
    const double gwp =
        oracle::simpson([&](double t) { return gwp_envelope(t, 0.5, 0.0, T); }, 0.0, s);
    CHECK(swp_unit_area(s, T, tau0) == rel(swp).epsilon(1e-10));
    CHECK(gwp_unit_area(s, T) == rel(gwp).epsilon(1e-10));
  }
}

TEST_CASE("window coverage") {
  CHECK(window_coverage(PulseShape::Gaussian, 1e-10, 0.0) == rel(std::erf(2.0)));
  // Quadrature reference for a 200 ps square pulse with 20 ps edges.
  CHECK(window_coverage(PulseShape::Square, 200e-12, 20e-12) ==
        rel(0.9999728327023626).epsilon(1e-12));
  CHECK_THROWS_AS(window_coverage(PulseShape::Square, 10e-12, 20e-12), InputError);
}

TEST_CASE("amplitude and duration formulas are mutually inverse") {
  const double d = 4.2e-31, tau0 = 20e-12;
  for (PulseShape shape : {PulseShape::Square, PulseShape::Gaussian}) {
    for (double c : {0.3, pi / 4, pi / 2, 2.5}) {
      const double T = duration_for_amplitude(c, shape, 5e6, d, tau0);
      CHECK(2 * amplitude_for_area(c, shape, T, tau0, d) == rel(5e6).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(amplitude_for_area(0.0, PulseShape::Square, 1e-10, tau0, d), InputError);
  CHECK_THROWS_AS(duration_for_amplitude(1.0, PulseShape::Gaussian, -1.0, d, tau0), InputError);
}

TEST_CASE("pi-pulse durations at a fixed field on the HF ladder") {
  const LevelSystem hf = hf4_preset();
  const double swp[] = {2.2450833783765678e-10, 1.646092324941965e-10, 1.380729439020941e-10};
  const double gwp[] = {4.6152589582668567e-10, 3.2634809063224556e-10, 2.6646210019352017e-10};
  for (int m = 1; m <= 3; ++m) {
    CHECK(duration_for_amplitude(pi / 2, PulseShape::Square, 5e6, hf.dipole(m), 20e-12) ==
          rel(swp[m - 1]).epsilon(1e-12));
    CHECK(duration_for_amplitude(pi / 2, PulseShape::Gaussian, 5e6, hf.dipole(m), 0.0) ==
          rel(gwp[m - 1]).epsilon(1e-12));
  }
}

namespace {

Factorization pi_pulses(int n, std::vector<int> transitions) {
  Factorization f;
  f.n = n;
  for (int m : transitions) f.factors.push_back({m, pi / 2, -pi / 2});
  f.residual.thetas.assign(n, 0.0);
  return f;
}

}  // namespace

TEST_CASE("schedule realizes the factor areas inside each window") {
  const LevelSystem rb = rb4_preset();
  Factorization f = pi_pulses(4, {1, 2, 3});
  f.factors[1].angle = -0.7;  // sign folds into the phase
  for (PulseShape shape : {PulseShape::Square, PulseShape::Gaussian}) {
    SynthesisOptions o;
    o.shape = shape;
    o.guard_gap = 5e-12;
    const PulseSchedule s = schedule_from_factorization(f, rb, o);
    REQUIRE(s.pulses.size() == 3);
    CHECK_NOTHROW(s.check());
    CHECK(s.total_duration() == rel(610e-12));
    CHECK(s.pulses[1].angle == rel(0.7));
    CHECK(s.pulses[1].phase == rel(pi / 2));
    for (const PulseSpec& p : s.pulses) {
      CHECK(p.carrier == rb.frequency(p.transition));
      const double area =
          oracle::simpson([&](double t) { return p.envelope(t); }, p.start, p.end);
      CHECK(area * rb.dipole(p.transition) / (2 * hbar) == rel(p.angle).epsilon(1e-9));
      CHECK(p.area_until(p.end) == rel(area).epsilon(1e-9));
    }
  }
}

TEST_CASE("fixed-amplitude policy sets durations from the angles") {
  const LevelSystem hf = hf4_preset();
  SynthesisOptions o;
  o.policy = FixedAmplitude{5e6};
  const PulseSchedule s = schedule_from_factorization(pi_pulses(4, {1, 2, 3, 1, 2, 1}), hf, o);
  CHECK(s.pulses[0].duration() == rel(2.2450833783765678e-10).epsilon(1e-12));
  CHECK(s.pulses[2].duration() == rel(1.380729439020941e-10).epsilon(1e-12));
  CHECK(total_duration_bound(hf, std::vector<double>(3, 5e6), PulseShape::Square, 20e-12) ==
        rel(s.total_duration()).epsilon(1e-12));
}

TEST_CASE("zero-angle factors produce no pulse") {
  Factorization f = pi_pulses(3, {1, 2});
  f.factors[0].angle = 0.0;
  const PulseSchedule s = schedule_from_factorization(f, morse_system(1e15, 0.04, 1e-30, 3), {});
  CHECK(s.pulses.size() == 1);
}

TEST_CASE("schedule construction errors") {
  const LevelSystem hf = hf4_preset();
  CHECK_THROWS_AS(schedule_from_factorization(pi_pulses(3, {1}), hf, {}), InputError);
  SynthesisOptions short_square;
  short_square.policy = FixedDuration{10e-12};
  CHECK_THROWS_AS(schedule_from_factorization(pi_pulses(4, {1}), hf, short_square), InputError);

  PulseSchedule s = schedule_from_factorization(pi_pulses(4, {1, 2}), hf, {});
  s.pulses[1].start = s.pulses[0].start;
  CHECK_THROWS_AS(s.check(), InputError);
}

TEST_CASE("validity report") {
  const LevelSystem hf = hf4_preset();
  const PulseSchedule ok = schedule_from_factorization(pi_pulses(4, {1, 2, 3}), hf, {});
  const ValidationReport good = validate_schedule(ok);
  CHECK(good.passed());
  CHECK(good.min_detuning == rel(hf::omega0 * hf::anharmonicity));
  for (std::size_t k = 0; k < good.pulses.size(); ++k) {
    const PulseCheck& c = good.pulses[k];
    const PulseSpec& p = ok.pulses[k];
    CHECK(c.peak_rabi == rel(2 * p.half_amplitude * hf.dipole(p.transition) / hbar));
    CHECK(c.rabi_ratio == rel(c.peak_rabi / (hf::omega0 * hf::anharmonicity)));
    CHECK(c.dispersion_margin == rel(200e-12 * hf::omega0 * hf::anharmonicity));
    CHECK(c.peak_intensity > 0.0);
  }

  SynthesisOptions tiny;
  tiny.shape = PulseShape::Gaussian;
  tiny.policy = FixedDuration{0.1e-12};
  const ValidationReport bad = validate_schedule(schedule_from_factorization(pi_pulses(4, {1}), hf, tiny));
  CHECK_FALSE(bad.passed());
  CHECK_FALSE(bad.pulses[0].dispersion_ok);
  CHECK_FALSE(bad.pulses[0].rabi_ok);

  // Rb lifetimes: 28 ns shortest, so a 3 ns sequence is too long.
  SynthesisOptions slow;
  slow.policy = FixedDuration{1e-9};
  const ValidationReport lifetime =
      validate_schedule(schedule_from_factorization(pi_pulses(4, {1, 2, 3}), rb4_preset(), slow));
  CHECK_FALSE(lifetime.lifetime_ok);
}

TEST_CASE("shape names") {
  CHECK(pulse_shape_from_string("gwp") == PulseShape::Gaussian);
  CHECK(to_string(PulseShape::Square) == "swp");
  CHECK_THROWS_AS(pulse_shape_from_string("triangle"), InputError);
}
