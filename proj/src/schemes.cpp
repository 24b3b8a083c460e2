#include "qlgc/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qlgc/error.hpp"

namespace qlgc {

namespace {

using constants::pi;

void check_weights(const std::vector<double>& weights) {
  if (weights.size() < 2) throw InputError("need at least two weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InputError("weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("weights must sum to 1");
}

ComplexMatrix projector(const ComplexVector& v) { return v * v.adjoint(); }

std::vector<RotationFactor> pi_pulses(const std::vector<int>& transitions) {
  std::vector<RotationFactor> factors;
  for (int m : transitions) factors.push_back({m, pi / 2, kDefaultPulsePhase});
  return factors;
}

Factorization pulses_only(int n, std::vector<RotationFactor> factors) {
  Factorization f;
  f.n = n;
  f.mode = DecompositionMode::ModPhase;
  f.factors = std::move(factors);
  f.residual.thetas.assign(n, 0.0);
  return f;
}

}  // namespace

double Objective::evaluate(const ComplexMatrix& rho) const {
  if (kind == Kind::Expectation) return (op * rho).trace().real();
  double distance = 0.0;
  for (Eigen::Index i = 0; i < target.size(); ++i) distance += std::abs(rho(i, i).real() - target(i));
  return 1.0 - 0.5 * distance;
}

SchemeResult population_transfer_scheme(int levels) {
  if (levels < 2) throw InputError("population transfer needs at least two levels");
  std::vector<int> transitions(levels - 1);
  std::iota(transitions.begin(), transitions.end(), 1);

  const ComplexVector top = ComplexVector::Unit(levels, levels - 1);
  Objective objective{Objective::Kind::Expectation, projector(top), {}};
  return SchemeResult{"transfer",
                      pulses_only(levels, pi_pulses(transitions)),
                      QuantumState::basis(levels, 1),
                      projector(top),
                      objective,
                      1.0,
                      {"final population of the top level is independent of pulse phases"}};
}

SchemeResult inversion_scheme(const std::vector<double>& weights) {
  check_weights(weights);
  const int n = static_cast<int>(weights.size());
  std::vector<int> transitions;
  for (int top = n - 1; top >= 1; --top) {
    for (int m = 1; m <= top; ++m) transitions.push_back(m);
  }

  Eigen::VectorXd reversed(n);
  for (int i = 0; i < n; ++i) reversed(i) = weights[n - 1 - i];
  ComplexMatrix predicted = ComplexMatrix::Zero(n, n);
  predicted.diagonal() = reversed.cast<Complex>();

  Objective objective{Objective::Kind::PopulationMatch, {}, reversed};
  return SchemeResult{"invert",
                      pulses_only(n, pi_pulses(transitions)),
                      QuantumState::ensemble(weights),
                      predicted,
                      objective,
                      1.0,
                      {"reversal holds for any diagonal initial ensemble"}};
}

SchemeResult superposition_scheme(const std::vector<double>& r, const std::vector<double>& theta) {
  const std::size_t n = r.size();
  if (n < 2) throw InputError("superposition needs at least two amplitudes");
  if (theta.size() != n) throw InputError("need one phase per amplitude");
  double norm2 = 0.0;
  for (double x : r) {
    if (!(x >= 0.0)) throw InputError("superposition amplitudes must be non-negative");
    norm2 += x * x;
  }
  if (std::abs(norm2 - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "superposition amplitudes are not normalized (sum of squares " << norm2 << ")";
    throw InputError(msg.str());
  }

  ComplexVector magnitudes(n);
  ComplexVector target(n);
  ComplexMatrix phases = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    magnitudes(i) = r[i];
    phases(i, i) = std::polar(1.0, theta[i]);
    target(i) = std::polar(r[i], theta[i]);
  }
  const ComplexMatrix u = phases * gram_schmidt_extend(magnitudes);
  Factorization f = decompose_mod_phase(u);

  Objective objective{Objective::Kind::Expectation, projector(target), {}};
  SchemeResult result{"superpose",       f, QuantumState::basis(static_cast<int>(n), 1),
                      projector(target), objective, 1.0, {}};

  // The pulses realize the factors only; on |1> the dropped diagonal phases
  // reduce to a global phase. Report what the pulses actually produce.
  const ComplexVector produced = factor_product(f.n, f.factors).col(0);
  std::ostringstream note;
  note << "achieved phases relative to level 1:";
  for (std::size_t i = 0; i < n; ++i) {
    const double rel = std::abs(produced(i)) > 1e-12
                           ? wrap_phase(std::arg(produced(i)) - std::arg(produced(0)))
                           : 0.0;
    note << ' ' << rel;
  }
  result.notes.push_back(note.str());
  return result;
}

std::array<double, 5> superposition_phase_solution(const std::array<double, 4>& theta,
                                                   double phi1) {
  const auto [t1, t2, t3, t4] = theta;
  return {wrap_phase(phi1), wrap_phase(pi / 2 - 2 * phi1 - t1 - t2 - t3),
          wrap_phase(phi1 + t1 + t2 + t3 - t4), wrap_phase(pi - phi1 - t3),
          wrap_phase(-pi / 2 - t2)};
}

std::vector<RotationFactor> equal_superposition_factors(const std::array<double, 5>& phases) {
  const std::array<int, 5> transitions{1, 2, 3, 2, 1};
  const std::array<double, 5> angles{pi / 3, std::atan(std::sqrt(2.0)), pi / 4, pi / 2, pi / 2};
  std::vector<RotationFactor> factors;
  for (std::size_t k = 0; k < 5; ++k) factors.push_back({transitions[k], angles[k], phases[k]});
  return factors;
}

KinematicalBound kinematical_bound(const ComplexMatrix& observable,
                                   const std::vector<double>& weights) {
  check_weights(weights);
  if (observable.rows() != static_cast<Eigen::Index>(weights.size()) ||
      observable.cols() != observable.rows()) {
    throw InputError("observable dimension does not match the number of weights");
  }
  if (!is_hermitian(observable)) throw InputError("observable is not Hermitian");

  KinematicalBound bound;
  bound.eigen = hermitian_eigensystem(observable);
  bound.order.resize(weights.size());
  std::iota(bound.order.begin(), bound.order.end(), 0);
  std::stable_sort(bound.order.begin(), bound.order.end(),
                   [&](int a, int b) { return weights[a] > weights[b]; });
  for (std::size_t k = 0; k < weights.size(); ++k) {
    bound.value += weights[bound.order[k]] * bound.eigen.values(static_cast<Eigen::Index>(k));
  }
  return bound;
}

ComplexMatrix dipole_operator(const LevelSystem& system) {
  const int n = system.levels();
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  for (int m = 1; m < n; ++m) {
    a(m - 1, m) = system.dipole(m);
    a(m, m - 1) = system.dipole(m);
  }
  return a;
}

SchemeResult observable_max_scheme(const ComplexMatrix& observable,
                                   const std::vector<double>& weights) {
  const KinematicalBound bound = kinematical_bound(observable, weights);
  const Eigen::Index n = observable.rows();

  // U1 sends the k-th most populated level to the k-th largest eigenvalue's
  // eigenvector.
  ComplexMatrix u1(n, n);
  for (Eigen::Index k = 0; k < n; ++k) u1.col(bound.order[k]) = bound.eigen.vectors.col(k);

  const QuantumState initial = QuantumState::ensemble(weights);
  const ComplexMatrix predicted = u1 * initial.density_matrix() * u1.adjoint();
  Objective objective{Objective::Kind::Expectation, observable, {}};

  std::ostringstream note;
  note << "kinematical bound " << bound.value;
  return SchemeResult{"maximize", decompose_mod_phase(u1), initial, predicted,
                      objective,  bound.value,             {note.str()}};
}

ComplexMatrix apply_factors(const SchemeResult& scheme, const std::vector<RotationFactor>& factors) {
  const ComplexMatrix u = factor_product(scheme.factorization.n, factors);
  return scheme.initial.evolved(u).density_matrix();
}

ComplexMatrix apply_scheme(const SchemeResult& scheme) {
  return apply_factors(scheme, scheme.factorization.factors);
}

double phase_sensitivity_probe(const SchemeResult& scheme, std::size_t pulse_index,
                               double new_phase) {
  std::vector<RotationFactor> factors = scheme.factorization.factors;
  if (pulse_index >= factors.size()) {
    std::ostringstream msg;
    msg << "pulse index " << pulse_index << " out of range (scheme has " << factors.size()
        << " pulses)";
    throw InputError(msg.str());
  }
  factors[pulse_index].phase = new_phase;
  return scheme.objective.evaluate(apply_factors(scheme, factors));
}

}  // namespace qlgc
