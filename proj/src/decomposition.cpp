#include "qlgc/decomposition.hpp"

#include <cmath>
#include <sstream>

#include "qlgc/constants.hpp"
#include "qlgc/error.hpp"

namespace qlgc {

namespace {

using constants::pi;

// Unitary entries are bounded by one; amplitudes below this are treated as
// exact zeros so round-off never seeds a spurious rotation.
constexpr double kZeroAmplitude = 1e-14;
constexpr double kUnitarityTolerance = 1e-8;

}  // namespace

std::string_view to_string(DecompositionMode mode) {
  return mode == DecompositionMode::Exact ? "exact" : "mod-phase";
}

DecompositionMode decomposition_mode_from_string(std::string_view text) {
  if (text == "mod-phase" || text == "modphase" || text == "mod_phase") {
    return DecompositionMode::ModPhase;
  }
  if (text == "exact") return DecompositionMode::Exact;
  throw InputError("unknown decomposition mode '" + std::string(text) + "'");
}

std::optional<RotationFactor> elimination_step(Complex top, Complex below, int transition) {
  const double r1 = std::abs(top);
  const double r2 = std::abs(below);
  if (r1 <= kZeroAmplitude && r2 <= kZeroAmplitude) return std::nullopt;
  if (r1 <= kZeroAmplitude) return RotationFactor{transition, 0.0, pi / 2};
  const double angle = std::atan2(r1, r2);
  const double alpha_below = r2 <= kZeroAmplitude ? 0.0 : std::arg(below);
  const double phase = wrap_phase(pi / 2 + std::arg(top) - alpha_below);
  return RotationFactor{transition, angle, phase};
}

Factorization decompose_mod_phase(const ComplexMatrix& u) {
  if (u.rows() != u.cols() || u.rows() < 1) throw InputError("decomposition needs a square matrix");
  if (!u.allFinite()) throw InputError("matrix has non-finite entries");
  const double defect = unitarity_defect(u);
  if (!(defect < kUnitarityTolerance)) {
    std::ostringstream msg;
    msg << "target is not unitary (defect " << defect << ")";
    throw NonUnitaryError(msg.str());
  }

  const int n = static_cast<int>(u.rows());
  const double gamma = std::arg(u.determinant());
  ComplexMatrix work = u * std::polar(1.0, -gamma / n);

  // Eliminations W_1, W_2, ... in the order they are applied to `work`.
  std::vector<RotationFactor> eliminations;
  for (int col = n - 1; col >= 1; --col) {
    for (int row = 0; row < col; ++row) {
      auto step = elimination_step(work(row, col), work(row + 1, col), row + 1);
      if (!step || std::abs(step->angle) < kAngleEpsilon) continue;
      apply_factor_inverse_left(work, *step);
      eliminations.push_back(*step);
    }
  }

  Factorization f;
  f.n = n;
  f.mode = DecompositionMode::ModPhase;
  // W_K ... W_1 U0 = D  =>  U0 = W_1^dag ... W_K^dag D, so V_k = W_{K+1-k}^dag.
  f.factors.assign(eliminations.rbegin(), eliminations.rend());
  f.residual.global = gamma;
  f.residual.thetas.resize(n);
  for (int k = 0; k < n; ++k) f.residual.thetas[k] = std::arg(work(k, k));
  return f;
}

Factorization eliminate_phases(const Factorization& f) {
  if (f.mode == DecompositionMode::Exact) return f;
  const int n = f.n;
  if (static_cast<int>(f.residual.thetas.size()) != n) {
    throw InputError("residual phase count does not match dimension");
  }

  // Sweeping n = N..2, the pair P_n = R S with S = V(-pi/2, -pi/2 - theta_n)
  // then R = V(-pi/2, pi/2) on transition n-1 sends e^{i theta_n} to 1 and
  // folds theta_n into theta_{n-1}. D = P_N^-1 ... P_2^-1, so the inverse
  // pairs run first, P_2^-1 innermost.
  std::vector<double> thetas = f.residual.thetas;
  std::vector<std::vector<RotationFactor>> pairs;
  for (int level = n; level >= 2; --level) {
    const double theta = wrap_phase(thetas[level - 1]);
    if (std::abs(theta) < kAngleEpsilon) continue;
    const int transition = level - 1;
    // P^-1 = S^-1 R^-1: R^-1 applies first.
    pairs.push_back({RotationFactor{transition, pi / 2, pi / 2},
                     RotationFactor{transition, pi / 2, wrap_phase(-pi / 2 - theta)}});
    thetas[level - 2] += theta;
    thetas[level - 1] = 0.0;
  }

  Factorization exact;
  exact.n = n;
  exact.mode = DecompositionMode::Exact;
  for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
    exact.factors.insert(exact.factors.end(), it->begin(), it->end());
  }
  exact.factors.insert(exact.factors.end(), f.factors.begin(), f.factors.end());
  // theta_1 now carries the sum of all residual phases, which is zero modulo
  // 2 pi because the reduced matrix had unit determinant.
  exact.residual.thetas.assign(n, 0.0);
  exact.residual.global = f.residual.global;
  return exact;
}

ComplexMatrix factor_product(int n, std::span<const RotationFactor> factors) {
  ComplexMatrix m = ComplexMatrix::Identity(n, n);
  for (const RotationFactor& factor : factors) apply_factor_left(m, factor);
  return m;
}

ComplexMatrix reconstruct(const Factorization& f) {
  if (f.n < 1) throw InputError("factorization dimension must be positive");
  if (!f.residual.thetas.empty() && static_cast<int>(f.residual.thetas.size()) != f.n) {
    throw InputError("residual phase count does not match dimension");
  }
  ComplexMatrix m = ComplexMatrix::Identity(f.n, f.n);
  const Complex global = std::polar(1.0, f.residual.global / f.n);
  for (int k = 0; k < f.n; ++k) {
    const double theta = f.residual.thetas.empty() ? 0.0 : f.residual.thetas[k];
    m(k, k) = std::polar(1.0, theta) * global;
  }
  for (const RotationFactor& factor : f.factors) apply_factor_left(m, factor);
  return m;
}

RotationFactor normalize_sign(RotationFactor factor) {
  if (factor.angle < 0.0) {
    factor.angle = -factor.angle;
    factor.phase = wrap_phase(factor.phase + pi);
  } else {
    factor.phase = wrap_phase(factor.phase);
  }
  return factor;
}

}  // namespace qlgc
