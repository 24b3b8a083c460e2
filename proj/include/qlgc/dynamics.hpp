#pragma once

#include <optional>
#include <vector>

#include "qlgc/pulse_synthesis.hpp"
#include "qlgc/unitary_core.hpp"

namespace qlgc {

enum class Frame { Lab, Interaction };

/// A pure state or a density matrix. Construct through the static factories,
/// which validate normalization, Hermiticity and positivity.
class QuantumState {
 public:
  enum class Kind { Pure, Density };

  static QuantumState pure(ComplexVector psi, Frame frame = Frame::Interaction);
  static QuantumState density(ComplexMatrix rho, Frame frame = Frame::Interaction);
  /// |n><n|, n 1-based.
  static QuantumState basis(int levels, int n);
  /// diag(w): an incoherent ensemble of energy eigenstates.
  static QuantumState ensemble(const std::vector<double>& weights);

  Kind kind() const { return kind_; }
  Frame frame() const { return frame_; }
  int dimension() const;
  const ComplexVector& vector() const;  // pure states only
  ComplexMatrix density_matrix() const;

  /// U state U^dagger; the frame tag is left unchanged.
  QuantumState evolved(const ComplexMatrix& u) const;

 private:
  QuantumState() = default;
  Kind kind_ = Kind::Pure;
  Frame frame_ = Frame::Interaction;
  ComplexVector psi_;
  ComplexMatrix rho_;
};

/// diag(e^{-i E_n t / hbar}).
ComplexMatrix free_propagator(const LevelSystem& system, double t);

/// Changes frame with U0(t); a no-op if the state is already in `target`.
QuantumState change_frame(const QuantumState& state, const LevelSystem& system, double t,
                          Frame target);

struct ObservableRecord {
  Eigen::VectorXd populations;
  std::vector<double> coherences;  // |rho_mn|, m < n, row-major
  double energy = 0.0;             // <H0>, J
  std::optional<double> observable;
};

/// Populations, coherence magnitudes, <H0>, and the dynamic observable
/// Tr(U0(t) A U0(t)^dagger rho_lab). Throws InputError for a non-Hermitian A.
ObservableRecord observables(const QuantumState& state, const LevelSystem& system,
                             const ComplexMatrix* observable, double t);

struct Sample {
  double t = 0.0;
  ObservableRecord record;
  double envelope = 0.0;  // V/m, field envelope of the active pulse
};

struct TimeSeries {
  int levels = 0;
  bool has_observable = false;
  std::vector<Sample> samples;
};

struct PropagationOptions {
  int samples_per_pulse = 512;
  std::optional<ComplexMatrix> observable;
  double tail = 0.0;  // free evolution after the last pulse, s
};

struct Propagation {
  TimeSeries series;
  ComplexMatrix interaction_unitary;  // U_I at the final time
  QuantumState final_state;           // interaction frame
  double max_unitarity_defect = 0.0;  // over all samples
};

/// Sample grid: every pulse window split into `samples_per_pulse` equal steps
/// (both endpoints kept), t = 0, and the end of the tail. Sorted, unique.
std::vector<double> sample_times(const PulseSchedule& schedule, int samples_per_pulse,
                                 double tail = 0.0);

/// Exact interaction-picture propagation. Inside pulse k
///   U_I(t) = V_k(C(t)) U_I(t_{k-1}),  C(t) = (d/hbar) * integral of A,
/// with the envelope integral in closed form.
Propagation propagate_piecewise(const PulseSchedule& schedule, const QuantumState& initial,
                                const PropagationOptions& options = {});

/// Integrates dU_I/dt = sum_m A_m(t) d_m / hbar (x_m sin phi - y_m cos phi) U_I
/// with adaptive Dormand-Prince 5(4) steps; no re-unitarization.
/// `rel_tol` must lie in [1e-12, 1e-3]. Throws StiffnessError if the stepper
/// stalls.
Propagation propagate_ode(const PulseSchedule& schedule, const QuantumState& initial,
                          double rel_tol, const PropagationOptions& options = {});

}  // namespace qlgc
