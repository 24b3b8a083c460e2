#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support/approx.hpp"

#include <random>
#include <sstream>

#include "../support/oracles.hpp"
#include "qlgc/error.hpp"
#include "qlgc/io.hpp"
#include "qlgc/schemes.hpp"

using namespace qlgc;

TEST_CASE("duration parsing") {
  CHECK(io::parse_duration("200ps") == rel(200e-12));
  CHECK(io::parse_duration(" 1.5 ns ") == rel(1.5e-9));
  CHECK(io::parse_duration("3us") == rel(3e-6));
  CHECK(io::parse_duration("20fs") == rel(20e-15));
  CHECK(io::parse_duration("2ms") == rel(2e-3));
  CHECK(io::parse_duration("1e-10s") == rel(1e-10));
  CHECK(io::parse_duration("4e-10") == rel(4e-10));
  CHECK_THROWS_AS(io::parse_duration("ps"), InputError);
  CHECK_THROWS_AS(io::parse_duration("12 parsecs"), InputError);
  CHECK(io::parse_number_list("0.4,0.3, 0.2,0.1") == std::vector<double>{0.4, 0.3, 0.2, 0.1});
  CHECK_THROWS_AS(io::parse_number_list("0.4,,0.1"), InputError);
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(1.0) == "1");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, i % 40 - 20);
    CHECK(io::parse_number(io::format_double(x)) == x);
  }
}

TEST_CASE("matrix and factorization documents round-trip") {
  std::mt19937_64 rng(4);
  const ComplexMatrix u = oracle::haar_unitary(4, rng);
  CHECK(io::matrix_from_json(io::matrix_to_json(u)) == u);
  const io::json real = io::json::parse(R"({"n":2,"re":[[0,1],[1,0]]})");
  CHECK(io::matrix_from_json(real)(0, 1) == Complex(1.0, 0.0));
  CHECK_THROWS_AS(io::matrix_from_json(io::json::parse(R"({"re":[[1,0],[0]]})")), InputError);
  CHECK_THROWS_AS(io::matrix_from_json(io::json::parse(R"({"re":"x"})")), InputError);

  const Factorization f = decompose_exact(u);
  const Factorization g = io::factorization_from_json(io::factorization_to_json(f));
  CHECK(g.n == 4);
  CHECK(g.mode == DecompositionMode::Exact);
  CHECK(reconstruct(g) == reconstruct(f));
  CHECK_THROWS_AS(io::factorization_from_json(io::json::parse(
                      R"({"n":3,"factors":[{"transition":3,"angle_rad":1,"phase_rad":0}]})")),
                  InputError);
}

TEST_CASE("system documents") {
  const LevelSystem rb = rb4_preset();
  const LevelSystem back = io::system_from_json(io::system_to_json(rb));
  CHECK(back.energies == rb.energies);
  CHECK(back.frequencies == rb.frequencies);
  CHECK(back.lifetimes == rb.lifetimes);
  CHECK(back.min_detuning_override == rb.min_detuning_override);
  CHECK(io::system_from_json("hf4").name == "hf4");
  CHECK_THROWS_AS(io::system_from_json("xyz"), InputError);
  CHECK_THROWS_AS(io::system_from_json(io::json::parse(R"({"energies_J":[0,1e-20]})")),
                  InputError);
}

TEST_CASE("schedule documents round-trip") {
  for (PulseShape shape : {PulseShape::Square, PulseShape::Gaussian}) {
    SynthesisOptions o;
    o.shape = shape;
    const PulseSchedule s =
        schedule_from_factorization(inversion_scheme({0.4, 0.3, 0.2, 0.1}).factorization,
                                    hf4_preset(), o);
    const PulseSchedule t = io::schedule_from_json(io::schedule_to_json(s));
    REQUIRE(t.pulses.size() == s.pulses.size());
    for (std::size_t k = 0; k < s.pulses.size(); ++k) {
      CHECK(t.pulses[k].shape == s.pulses[k].shape);
      CHECK(t.pulses[k].half_amplitude == s.pulses[k].half_amplitude);
      CHECK(t.pulses[k].start == s.pulses[k].start);
      CHECK(t.pulses[k].end == s.pulses[k].end);
      CHECK(t.pulses[k].rise_time == s.pulses[k].rise_time);
      CHECK(t.pulses[k].phase == s.pulses[k].phase);
    }
  }
  CHECK_THROWS_AS(io::schedule_from_json(io::json::parse(R"({"pulses":[]})")), InputError);
}

TEST_CASE("state specifications") {
  CHECK(io::parse_state("ground", 3).density_matrix()(0, 0) == Complex(1.0));
  CHECK(io::parse_state("basis:2", 3).density_matrix()(1, 1) == Complex(1.0));
  CHECK(io::parse_state("ensemble:0.5,0.5", 2).dimension() == 2);
  CHECK(io::parse_state(R"({"pure":{"re":[0,1]}})", 2).density_matrix()(1, 1) == Complex(1.0));
  CHECK_THROWS_AS(io::parse_state("ensemble:0.5,0.5", 3), InputError);
  CHECK_THROWS_AS(io::parse_state("basis:9", 3), InputError);
  CHECK_THROWS_AS(io::parse_state("{broken", 3), InputError);
}

TEST_CASE("time-series CSV") {
  const SchemeResult scheme = observable_max_scheme(dipole_operator(hf4_preset()), {0.4, 0.3, 0.2, 0.1});
  const PulseSchedule s = schedule_from_factorization(scheme.factorization, hf4_preset(), {});
  PropagationOptions o;
  o.samples_per_pulse = 16;
  o.observable = dipole_operator(hf4_preset());
  const Propagation p = propagate_piecewise(s, scheme.initial, o);

  std::stringstream csv;
  io::write_timeseries_csv(csv, p.series);
  std::string header;
  std::getline(std::stringstream(csv.str()), header);
  CHECK(header ==
        "t_s,pop_1,pop_2,pop_3,pop_4,coh_1_2,coh_1_3,coh_1_4,coh_2_3,coh_2_4,coh_3_4,"
        "energy_J,obs_avg,envelope_Vm");

  const TimeSeries back = io::read_timeseries_csv(csv);
  REQUIRE(back.samples.size() == p.series.samples.size());
  CHECK(back.has_observable);
  for (std::size_t k = 0; k < back.samples.size(); ++k) {
    const Sample& a = p.series.samples[k];
    const Sample& b = back.samples[k];
    CHECK(a.t == b.t);
    CHECK(a.record.populations == b.record.populations);
    CHECK(a.record.coherences == b.record.coherences);
    CHECK(a.record.energy == b.record.energy);
    CHECK(*a.record.observable == *b.record.observable);
    CHECK(a.envelope == b.envelope);
  }

  TimeSeries plain = p.series;
  plain.has_observable = false;
  for (Sample& x : plain.samples) x.record.observable.reset();
  std::stringstream no_obs;
  io::write_timeseries_csv(no_obs, plain);
  std::string line;
  std::getline(no_obs, line);
  std::getline(no_obs, line);
  CHECK(line.find(",,") != std::string::npos);

  std::stringstream garbage("t_s,nope\n1,2\n");
  CHECK_THROWS_AS(io::read_timeseries_csv(garbage), InputError);
}
