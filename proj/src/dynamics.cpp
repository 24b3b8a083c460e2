#include "qlgc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "qlgc/constants.hpp"
#include "qlgc/decomposition.hpp"
#include "qlgc/error.hpp"

namespace qlgc {

namespace {

constexpr double kStateTolerance = 1e-9;

void require_dimension(int expected, int actual, const char* what) {
  if (expected != actual) {
    std::ostringstream msg;
    msg << what << " has dimension " << actual << " but the system has " << expected
        << " levels";
    throw InputError(msg.str());
  }
}

}  // namespace

QuantumState QuantumState::pure(ComplexVector psi, Frame frame) {
  if (psi.size() < 1) throw InputError("state vector is empty");
  if (!psi.allFinite()) throw InputError("state vector has non-finite entries");
  if (std::abs(psi.norm() - 1.0) > kStateTolerance) {
    throw InputError("state vector is not normalized");
  }
  QuantumState s;
  s.kind_ = Kind::Pure;
  s.frame_ = frame;
  s.psi_ = std::move(psi);
  return s;
}

QuantumState QuantumState::density(ComplexMatrix rho, Frame frame) {
  if (rho.rows() < 1 || rho.rows() != rho.cols()) {
    throw InputError("density matrix must be square and non-empty");
  }
  if (!rho.allFinite()) throw InputError("density matrix has non-finite entries");
  if (!is_hermitian(rho, kStateTolerance)) throw InputError("density matrix is not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > kStateTolerance) {
    throw InputError("density matrix trace is not 1");
  }
  const Eigensystem eig = hermitian_eigensystem(rho);
  if (eig.values.minCoeff() < -kStateTolerance) {
    throw InputError("density matrix has a negative eigenvalue");
  }
  QuantumState s;
  s.kind_ = Kind::Density;
  s.frame_ = frame;
  s.rho_ = std::move(rho);
  return s;
}

QuantumState QuantumState::basis(int levels, int n) {
  if (levels < 1 || n < 1 || n > levels) throw InputError("basis state index out of range");
  ComplexVector psi = ComplexVector::Zero(levels);
  psi(n - 1) = 1.0;
  return pure(std::move(psi));
}

QuantumState QuantumState::ensemble(const std::vector<double>& weights) {
  if (weights.empty()) throw InputError("ensemble weights are empty");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InputError("ensemble weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > kStateTolerance) throw InputError("ensemble weights must sum to 1");
  const int n = static_cast<int>(weights.size());
  ComplexMatrix rho = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) rho(i, i) = weights[i];
  return density(std::move(rho));
}

int QuantumState::dimension() const {
  return static_cast<int>(kind_ == Kind::Pure ? psi_.size() : rho_.rows());
}

const ComplexVector& QuantumState::vector() const {
  if (kind_ != Kind::Pure) throw InputError("state is not pure");
  return psi_;
}

ComplexMatrix QuantumState::density_matrix() const {
  if (kind_ == Kind::Pure) return psi_ * psi_.adjoint();
  return rho_;
}

QuantumState QuantumState::evolved(const ComplexMatrix& u) const {
  QuantumState s = *this;
  if (kind_ == Kind::Pure) {
    s.psi_ = u * psi_;
  } else {
    s.rho_ = u * rho_ * u.adjoint();
  }
  return s;
}

ComplexMatrix free_propagator(const LevelSystem& system, double t) {
  if (t < 0.0) throw InputError("free propagation time must be non-negative");
  const int n = system.levels();
  ComplexMatrix u = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    u(i, i) = std::polar(1.0, -system.energies[i] * t / constants::hbar);
  }
  return u;
}

QuantumState change_frame(const QuantumState& state, const LevelSystem& system, double t,
                          Frame target) {
  require_dimension(system.levels(), state.dimension(), "state");
  if (state.frame() == target) return state;
  const ComplexMatrix u0 = free_propagator(system, t);
  QuantumState moved = state.evolved(target == Frame::Lab ? u0 : ComplexMatrix(u0.adjoint()));
  return state.kind() == QuantumState::Kind::Pure
             ? QuantumState::pure(moved.vector(), target)
             : QuantumState::density(moved.density_matrix(), target);
}

ObservableRecord observables(const QuantumState& state, const LevelSystem& system,
                             const ComplexMatrix* observable, double t) {
  const int n = system.levels();
  require_dimension(n, state.dimension(), "state");
  ComplexMatrix rho = state.density_matrix();

  ObservableRecord record;
  record.populations.resize(n);
  for (int i = 0; i < n; ++i) {
    record.populations(i) = rho(i, i).real();
    record.energy += system.energies[i] * rho(i, i).real();
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) record.coherences.push_back(std::abs(rho(i, j)));
  }
  if (observable) {
    require_dimension(n, static_cast<int>(observable->rows()), "observable");
    if (!is_hermitian(*observable)) throw InputError("observable is not Hermitian");
    // Tr(U0 A U0^dagger rho_lab) = Tr(A rho_interaction).
    if (state.frame() == Frame::Lab) {
      const ComplexMatrix u0 = free_propagator(system, t);
      rho = u0.adjoint() * rho * u0;
    }
    record.observable = (*observable * rho).trace().real();
  }
  return record;
}

std::vector<double> sample_times(const PulseSchedule& schedule, int samples_per_pulse,
                                 double tail) {
  if (samples_per_pulse < 1) throw InputError("samples per pulse must be at least 1");
  if (tail < 0.0) throw InputError("tail duration must be non-negative");
  std::vector<double> times{0.0};
  for (const PulseSpec& p : schedule.pulses) {
    for (int j = 0; j <= samples_per_pulse; ++j) {
      times.push_back(j == samples_per_pulse
                          ? p.end
                          : p.start + p.duration() * static_cast<double>(j) / samples_per_pulse);
    }
  }
  const double last = schedule.total_duration();
  if (tail > 0.0) times.push_back(last + tail);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

namespace {

double total_envelope(const PulseSchedule& schedule, double t) {
  double sum = 0.0;
  for (const PulseSpec& p : schedule.pulses) sum += p.envelope(t);
  return sum;
}

void prepare(const PulseSchedule& schedule, const QuantumState& initial,
             const PropagationOptions& options) {
  schedule.check();
  require_dimension(schedule.system.levels(), initial.dimension(), "initial state");
  if (options.observable) {
    require_dimension(schedule.system.levels(), static_cast<int>(options.observable->rows()),
                      "observable");
    if (!is_hermitian(*options.observable)) throw InputError("observable is not Hermitian");
  }
}

// Records one sample for U_I at time t and tracks the unitarity drift.
class Recorder {
 public:
  Recorder(const PulseSchedule& schedule, const QuantumState& initial,
           const PropagationOptions& options)
      : schedule_(schedule),
        initial_(change_frame(initial, schedule.system, 0.0, Frame::Interaction)),
        options_(options) {
    series_.levels = schedule.system.levels();
    series_.has_observable = options.observable.has_value();
  }

  void record(double t, const ComplexMatrix& u) {
    const QuantumState state = initial_.evolved(u);
    Sample s;
    s.t = t;
    s.record = observables(state, schedule_.system,
                           options_.observable ? &*options_.observable : nullptr, t);
    s.envelope = total_envelope(schedule_, t);
    series_.samples.push_back(std::move(s));
    max_defect_ = std::max(max_defect_, unitarity_defect(u));
  }

  Propagation finish(const ComplexMatrix& u) {
    QuantumState final_state = initial_.evolved(u);
    return Propagation{std::move(series_), u, std::move(final_state), max_defect_};
  }

 private:
  const PulseSchedule& schedule_;
  QuantumState initial_;  // interaction frame at t = 0
  const PropagationOptions& options_;
  TimeSeries series_;
  double max_defect_ = 0.0;
};

}  // namespace

Propagation propagate_piecewise(const PulseSchedule& schedule, const QuantumState& initial,
                                const PropagationOptions& options) {
  prepare(schedule, initial, options);
  const int n = schedule.system.levels();
  const std::vector<double> times = sample_times(schedule, options.samples_per_pulse, options.tail);

  Recorder recorder(schedule, initial, options);
  ComplexMatrix before = ComplexMatrix::Identity(n, n);  // U_I at the start of the current pulse
  std::size_t next = 0;                                  // first pulse not yet completed

  auto running = [&](std::size_t k, double t) {
    const PulseSpec& p = schedule.pulses[k];
    const double scale = schedule.system.dipole(p.transition) / (2.0 * constants::hbar);
    ComplexMatrix u = before;
    apply_factor_left(u, RotationFactor{p.transition, scale * p.area_until(t), p.phase});
    return u;
  };

  for (double t : times) {
    while (next < schedule.pulses.size() && schedule.pulses[next].end <= t) {
      before = running(next, schedule.pulses[next].end);
      ++next;
    }
    if (next < schedule.pulses.size() && schedule.pulses[next].start < t) {
      recorder.record(t, running(next, t));
    } else {
      recorder.record(t, before);
    }
  }
  while (next < schedule.pulses.size()) {
    before = running(next, schedule.pulses[next].end);
    ++next;
  }
  return recorder.finish(before);
}

namespace {

namespace odeint = boost::numeric::odeint;
using OdeState = std::vector<double>;

constexpr double kOdeStepTolFactor = 0.1;

// Real/imaginary split of U_I: entries [0, N^2) real parts, [N^2, 2N^2)
// imaginary parts, both column-major.
OdeState pack(const ComplexMatrix& u) {
  const Eigen::Index size = u.size();
  OdeState x(2 * size);
  for (Eigen::Index i = 0; i < size; ++i) {
    x[i] = u.data()[i].real();
    x[size + i] = u.data()[i].imag();
  }
  return x;
}

ComplexMatrix unpack(const OdeState& x, int n) {
  ComplexMatrix u(n, n);
  const Eigen::Index size = u.size();
  for (Eigen::Index i = 0; i < size; ++i) u.data()[i] = Complex(x[i], x[size + i]);
  return u;
}

struct RwaGenerator {
  const PulseSchedule& schedule;
  int n;

  void operator()(const OdeState& x, OdeState& dxdt, double t) const {
    std::fill(dxdt.begin(), dxdt.end(), 0.0);
    const std::size_t size = static_cast<std::size_t>(n) * n;
    for (const PulseSpec& p : schedule.pulses) {
      if (t < p.start || t > p.end) continue;
      const double rate =
          0.5 * p.envelope(t) * schedule.system.dipole(p.transition) / constants::hbar;
      if (rate == 0.0) continue;
      // Generator entries: G(m, m+1) = -i e^{i phi}, G(m+1, m) = -i e^{-i phi}.
      const Complex upper = rate * Complex(std::sin(p.phase), -std::cos(p.phase));
      const Complex lower = rate * Complex(-std::sin(p.phase), -std::cos(p.phase));
      const int r0 = p.transition - 1;
      const int r1 = p.transition;
      for (int col = 0; col < n; ++col) {
        const std::size_t i0 = static_cast<std::size_t>(col) * n + r0;
        const std::size_t i1 = static_cast<std::size_t>(col) * n + r1;
        const Complex u0(x[i0], x[size + i0]);
        const Complex u1(x[i1], x[size + i1]);
        const Complex d0 = upper * u1;
        const Complex d1 = lower * u0;
        dxdt[i0] += d0.real();
        dxdt[size + i0] += d0.imag();
        dxdt[i1] += d1.real();
        dxdt[size + i1] += d1.imag();
      }
    }
  }
};

}  // namespace

Propagation propagate_ode(const PulseSchedule& schedule, const QuantumState& initial,
                          double rel_tol, const PropagationOptions& options) {
  if (!(rel_tol >= 1e-12 && rel_tol <= 1e-3)) {
    throw InputError("ODE relative tolerance must lie in [1e-12, 1e-3]");
  }
  prepare(schedule, initial, options);
  const int n = schedule.system.levels();
  const std::vector<double> times = sample_times(schedule, options.samples_per_pulse, options.tail);

  // Local error control is set below the requested tolerance so that the
  // error accumulated over a whole sequence stays within it.
  const double step_tol = kOdeStepTolFactor * rel_tol;
  Recorder recorder(schedule, initial, options);
  const RwaGenerator generator{schedule, n};
  OdeState x = pack(ComplexMatrix::Identity(n, n));

  std::size_t i = 0;
  try {
    for (const PulseSpec& p : schedule.pulses) {
      for (; i < times.size() && times[i] < p.start; ++i) recorder.record(times[i], unpack(x, n));
      std::vector<double> window{p.start};
      for (std::size_t j = i; j < times.size() && times[j] <= p.end; ++j) {
        if (times[j] > p.start) window.push_back(times[j]);
      }
      if (window.back() < p.end) window.push_back(p.end);
      const bool start_is_sample = i < times.size() && times[i] == p.start;

      auto stepper = odeint::make_dense_output(step_tol, step_tol,
                                               odeint::runge_kutta_dopri5<OdeState>());
      auto observer = [&](const OdeState& state, double t) {
        if (t == p.start && !start_is_sample) return;
        if (i < times.size() && times[i] == t) {
          recorder.record(t, unpack(state, n));
          ++i;
        }
      };
      odeint::integrate_times(stepper, generator, x, window.begin(), window.end(),
                              p.duration() / 1000.0, observer, odeint::max_step_checker(100000));
      for (double v : x) {
        if (!std::isfinite(v)) throw StiffnessError("ODE state became non-finite");
      }
    }
  } catch (const odeint::odeint_error& e) {
    throw StiffnessError(std::string("ODE integration stalled: ") + e.what());
  } catch (const std::overflow_error& e) {
    throw StiffnessError(std::string("ODE step size underflow: ") + e.what());
  }
  for (; i < times.size(); ++i) recorder.record(times[i], unpack(x, n));
  return recorder.finish(unpack(x, n));
}

}  // namespace qlgc
