#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qlgc/constants.hpp"
#include "qlgc/decomposition.hpp"
#include "qlgc/dynamics.hpp"
#include "qlgc/system_model.hpp"

namespace qlgc {

/// What a scheme tries to achieve, evaluated on a final density matrix in the
/// interaction frame.
struct Objective {
  enum class Kind {
    Expectation,      // Tr(op rho)
    PopulationMatch,  // 1 - (1/2) sum_n |rho_nn - target_n|
  };
  Kind kind = Kind::Expectation;
  ComplexMatrix op;
  Eigen::VectorXd target;

  double evaluate(const ComplexMatrix& rho) const;
};

struct SchemeResult {
  std::string name;
  Factorization factorization;
  QuantumState initial;
  ComplexMatrix predicted_state;
  Objective objective;
  std::optional<double> predicted_objective;
  std::vector<std::string> notes;
};

/// Default phase of free-phase schemes; makes every field a pure sine.
inline constexpr double kDefaultPulsePhase = -constants::pi / 2;

/// |1> -> |N> with N-1 pi-pulses on transitions 1, ..., N-1.
SchemeResult population_transfer_scheme(int levels);

/// Reverses the populations of diag(weights) with N(N-1)/2 pi-pulses on
/// transitions 1..N-1, 1..N-2, ..., 1.
SchemeResult inversion_scheme(const std::vector<double>& weights);

/// Creates sum_n r_n e^{i theta_n} |n> from |1>.
SchemeResult superposition_scheme(const std::vector<double>& r, const std::vector<double>& theta);

/// Pulse phases for the four-level equal-amplitude superposition, given the
/// target phases theta and a free choice of phi_1.
std::array<double, 5> superposition_phase_solution(const std::array<double, 4>& theta,
                                                   double phi1);

/// The fixed-angle factor sequence for the four-level equal-amplitude
/// superposition, carrying the given phases.
std::vector<RotationFactor> equal_superposition_factors(const std::array<double, 5>& phases);

struct KinematicalBound {
  double value = 0.0;
  /// order[k] is the level whose weight pairs with the k-th largest
  /// eigenvalue (weights sorted descending, ties by index).
  std::vector<int> order;
  Eigensystem eigen;
};

KinematicalBound kinematical_bound(const ComplexMatrix& observable,
                                   const std::vector<double>& weights);

/// Transition dipole operator: d_m on the (m, m+1) and (m+1, m) entries.
ComplexMatrix dipole_operator(const LevelSystem& system);

SchemeResult observable_max_scheme(const ComplexMatrix& observable,
                                   const std::vector<double>& weights);

/// Final density matrix reached by applying the scheme's pulse factors to its
/// initial state (residual phases are not realized by pulses).
ComplexMatrix apply_scheme(const SchemeResult& scheme);
ComplexMatrix apply_factors(const SchemeResult& scheme, const std::vector<RotationFactor>& factors);

/// Objective reached after replacing the phase of pulse `pulse_index`
/// (0-based, application order).
double phase_sensitivity_probe(const SchemeResult& scheme, std::size_t pulse_index,
                               double new_phase);

}  // namespace qlgc
