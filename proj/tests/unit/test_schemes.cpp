#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support/approx.hpp"

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "qlgc/constants.hpp"
#include "qlgc/error.hpp"
#include "qlgc/schemes.hpp"

using namespace qlgc;
using constants::pi;

namespace {

const double kS2 = std::sqrt(2.0), kS3 = std::sqrt(3.0), kS6 = std::sqrt(6.0);
const double kLambda1 = std::sqrt(3 + kS6);  // largest eigenvalue of the unit ladder dipole
const double kLambda2 = std::sqrt(3 - kS6);

std::vector<int> transitions_of(const SchemeResult& s) {
  std::vector<int> m;
  for (const RotationFactor& f : s.factorization.factors) m.push_back(f.transition);
  return m;
}

}  // namespace

TEST_CASE("population transfer scheme") {
  const SchemeResult s = population_transfer_scheme(4);
  CHECK(transitions_of(s) == std::vector<int>{1, 2, 3});
  for (const RotationFactor& f : s.factorization.factors) {
    CHECK(f.angle == pi / 2);
    CHECK(f.phase == kDefaultPulsePhase);
  }
  CHECK(std::abs(apply_scheme(s)(3, 3) - 1.0) < 1e-14);
  CHECK(population_transfer_scheme(2).factorization.factors.size() == 1);
  CHECK_THROWS_AS(population_transfer_scheme(1), InputError);
}

TEST_CASE("inversion scheme") {
  const std::vector<double> w{0.4, 0.3, 0.2, 0.1};
  const SchemeResult s = inversion_scheme(w);
  CHECK(transitions_of(s) == std::vector<int>{1, 2, 3, 1, 2, 1});
  const ComplexMatrix rho = apply_scheme(s);
  CHECK((rho - s.predicted_state).norm() < 1e-12);
  CHECK(rho(0, 0).real() == rel(0.1));
  CHECK(s.objective.evaluate(rho) == rel(1.0));
  CHECK(inversion_scheme({0.7, 0.3}).factorization.factors.size() == 1);
  CHECK(inversion_scheme(std::vector<double>(6, 1.0 / 6)).factorization.factors.size() == 15);

  SUBCASE("applied twice restores the ensemble") {
    std::vector<RotationFactor> twice = s.factorization.factors;
    twice.insert(twice.end(), s.factorization.factors.begin(), s.factorization.factors.end());
    const ComplexMatrix back = apply_factors(s, twice);
    for (int i = 0; i < 4; ++i) CHECK(back(i, i).real() == rel(w[i]).epsilon(1e-12));
  }
  SUBCASE("populations ignore the pulse phases") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> phase(-pi, pi);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<RotationFactor> f = s.factorization.factors;
      for (RotationFactor& v : f) v.phase = phase(rng);
      const ComplexMatrix r = apply_factors(s, f);
      for (int i = 0; i < 4; ++i) CHECK(r(i, i).real() == rel(w[3 - i]).epsilon(1e-12));
      CHECK(phase_sensitivity_probe(population_transfer_scheme(4), trial % 3, phase(rng)) ==
            rel(1.0));
    }
  }
  SUBCASE("from the ground state it matches transfer") {
    SchemeResult from_ground = s;
    from_ground.initial = QuantumState::basis(4, 1);
    CHECK((apply_scheme(from_ground) - apply_scheme(population_transfer_scheme(4))).norm() < 1e-14);
  }
}

TEST_CASE("equal superposition scheme") {
  const SchemeResult s = superposition_scheme({0.5, 0.5, 0.5, 0.5}, {0, 0, 0, 0});
  REQUIRE(s.factorization.factors.size() == 5);
  CHECK(transitions_of(s) == std::vector<int>{1, 2, 3, 2, 1});
  const double angles[] = {pi / 3, std::atan(kS2), pi / 4, pi / 2, pi / 2};
  const double phases[] = {pi / 2, -pi / 2, pi / 2, pi / 2, -pi / 2};
  for (int k = 0; k < 5; ++k) {
    const RotationFactor v = normalize_sign(s.factorization.factors[k]);
    CHECK(v.angle == rel(angles[k]).epsilon(1e-12));
    CHECK(v.phase == rel(phases[k]).epsilon(1e-12));
  }
  const ComplexMatrix rho = apply_scheme(s);
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) CHECK(std::abs(rho(i, k)) == rel(0.25).epsilon(1e-12));
  }
  CHECK(superposition_scheme({1, 0, 0}, {0, 0, 0}).factorization.factors.empty());
  CHECK_THROWS_AS(superposition_scheme({0.5, 0.5}, {0, 0}), InputError);
  CHECK_THROWS_AS(superposition_scheme({1.0, 0.0}, {0}), InputError);
}

TEST_CASE("random superpositions are reached with their phases") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> r(5), theta(5);
    double norm = 0.0;
    for (int i = 0; i < 5; ++i) {
      r[i] = u(rng);
      theta[i] = 2 * pi * u(rng) - pi;
      norm += r[i] * r[i];
    }
    for (double& x : r) x /= std::sqrt(norm);
    const SchemeResult s = superposition_scheme(r, theta);
    CHECK(s.objective.evaluate(apply_scheme(s)) == rel(1.0).epsilon(1e-10));
    for (int i = 0; i < 5; ++i) {
      CHECK(std::sqrt(s.predicted_state(i, i).real()) == rel(r[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("closed-form superposition phases") {
  const auto table = superposition_phase_solution({0, 0, 0, 0}, pi / 2);
  const double expected[] = {pi / 2, -pi / 2, pi / 2, pi / 2, -pi / 2};
  for (int k = 0; k < 5; ++k) CHECK(table[k] == rel(expected[k]).epsilon(1e-15));

  const auto zero = superposition_phase_solution({0, 0, 0, 0}, 0.0);
  CHECK(zero[1] == rel(pi / 2));
  CHECK(std::abs(zero[2]) < 1e-15);
  CHECK(zero[3] == rel(pi));
  CHECK(zero[4] == rel(-pi / 2));

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-pi, pi);
  for (int trial = 0; trial < 20; ++trial) {
    const std::array<double, 4> theta{u(rng), u(rng), u(rng), u(rng)};
    const double phi1 = u(rng);
    const std::vector<RotationFactor> f =
        equal_superposition_factors(superposition_phase_solution(theta, phi1));
    oracle::Matrix product = oracle::Matrix::Identity(4, 4);
    for (const RotationFactor& v : f) product = oracle::rotation(4, v.transition, v.angle, v.phase) * product;
    for (int n = 0; n < 4; ++n) {
      CHECK(std::abs(product(n, 0) - std::polar(0.5, theta[n])) < 1e-10);
    }
    // Any phases at all keep the magnitudes at one half.
    std::array<double, 5> arbitrary{u(rng), u(rng), u(rng), u(rng), u(rng)};
    const ComplexMatrix any = factor_product(4, equal_superposition_factors(arbitrary));
    for (int n = 0; n < 4; ++n) CHECK(std::abs(any(n, 0)) == rel(0.5).epsilon(1e-12));
  }
}

TEST_CASE("kinematical bound") {
  const LevelSystem hf = hf4_preset();
  const double p0 = hf::dipole_unit;
  const ComplexMatrix a = dipole_operator(hf);
  const KinematicalBound b = kinematical_bound(a, {0.4, 0.3, 0.2, 0.1});
  CHECK(b.value / p0 == rel(0.3 * kLambda1 + 0.1 * kLambda2).epsilon(1e-12));
  CHECK(b.value / p0 == rel(0.774520).epsilon(1e-6));
  const std::vector<double> lambda{kLambda1, kLambda2, -kLambda2, -kLambda1};
  CHECK(b.value / p0 == rel(oracle::best_pairing({0.4, 0.3, 0.2, 0.1}, lambda)));
  CHECK(b.order == std::vector<int>{0, 1, 2, 3});

  CHECK(kinematical_bound(a, {1, 0, 0, 0}).value == rel(kLambda1 * p0));
  CHECK(kinematical_bound(a, {0.25, 0.25, 0.25, 0.25}).value / p0 ==
        rel(0.0).scale(1.0));
  CHECK(kinematical_bound(a, {0.1, 0.2, 0.3, 0.4}).order == std::vector<int>{3, 2, 1, 0});
  CHECK_THROWS_AS(kinematical_bound(a, {0.5, 0.5}), InputError);
}

TEST_CASE("observable maximization on the HF ladder") {
  const LevelSystem hf = hf4_preset();
  const double p0 = hf::dipole_unit;
  const SchemeResult s = observable_max_scheme(dipole_operator(hf), {0.4, 0.3, 0.2, 0.1});
  CHECK(transitions_of(s) == std::vector<int>{1, 2, 1, 3, 2, 1});
  const ComplexMatrix rho = apply_scheme(s);
  CHECK((rho - s.predicted_state).norm() < 1e-12);
  CHECK(s.objective.evaluate(rho) == rel(*s.predicted_objective).epsilon(1e-12));
  for (int i = 0; i < 4; ++i) CHECK(rho(i, i).real() == rel(0.25));
  CHECK(std::abs(rho(0, 1).real() - 0.06582) < 5e-4);
  CHECK(std::abs(rho(0, 3).real() + 0.00157) < 5e-4);
  CHECK(std::abs(rho(1, 2).real() - 0.09037) < 5e-4);
  CHECK(std::abs(rho(2, 3).real() - 0.11179) < 5e-4);

  const double flipped = phase_sensitivity_probe(s, 0, pi / 2);
  CHECK(flipped / p0 == rel(0.2 * (kLambda1 + kLambda2)).epsilon(1e-10));
  CHECK(flipped < *s.predicted_objective);
  CHECK(phase_sensitivity_probe(s, 0, s.factorization.factors[0].phase) ==
        rel(*s.predicted_objective));
  CHECK_THROWS_AS(phase_sensitivity_probe(s, 6, 0.0), InputError);
}

TEST_CASE("already-sorted diagonal observable needs no pulses") {
  ComplexMatrix a = ComplexMatrix::Zero(4, 4);
  a.diagonal() << 4.0, 3.0, 2.0, 1.0;
  CHECK(observable_max_scheme(a, {0.4, 0.3, 0.2, 0.1}).factorization.factors.empty());
}

TEST_CASE("no phase change beats the kinematical bound") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexMatrix a = oracle::haar_unitary(5, rng);
    a = (a + a.adjoint()).eval();
    std::vector<double> w(5);
    double total = 0.0;
    for (double& x : w) total += (x = u(rng));
    for (double& x : w) x /= total;
    const SchemeResult s = observable_max_scheme(a, w);
    CHECK(s.objective.evaluate(apply_scheme(s)) == rel(*s.predicted_objective));
    for (std::size_t k = 0; k < s.factorization.factors.size(); ++k) {
      CHECK(phase_sensitivity_probe(s, k, 2 * pi * u(rng)) <= *s.predicted_objective + 1e-9);
    }
  }
}
