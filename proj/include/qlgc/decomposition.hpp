#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qlgc/unitary_core.hpp"

namespace qlgc {

enum class DecompositionMode {
  ModPhase,  // U = e^{i Gamma/N} V_K ... V_1 diag(e^{i theta_n})
  Exact,     // U = e^{i Gamma/N} V_K ... V_1
};

std::string_view to_string(DecompositionMode mode);
DecompositionMode decomposition_mode_from_string(std::string_view text);

/// Ordered rotation factors plus residual phases. `factors[0]` is V_1, the
/// first factor applied (rightmost in the product).
struct Factorization {
  int n = 0;
  DecompositionMode mode = DecompositionMode::ModPhase;
  std::vector<RotationFactor> factors;
  DiagonalPhases residual;
};

/// Factors with |C| below this are dropped.
inline constexpr double kAngleEpsilon = 1e-12;

/// Rotation on `transition` whose inverse maps (top, below) to (0, c) with
/// |c| = sqrt(|top|^2 + |below|^2). C = atan2(|top|, |below|) lies in
/// [0, pi/2]; phi = pi/2 + arg(top) - arg(below). Returns nullopt when both
/// amplitudes vanish.
std::optional<RotationFactor> elimination_step(Complex top, Complex below, int transition = 1);

/// Reduces U to diagonal phases, columns N..2, each column top-down.
/// Throws NonUnitaryError if unitarity_defect(U) >= 1e-8.
Factorization decompose_mod_phase(const ComplexMatrix& u);

/// Clears the residual diagonal phases with pairs of pi/2 rotations, leaving
/// only the global phase.
Factorization eliminate_phases(const Factorization& f);

inline Factorization decompose_exact(const ComplexMatrix& u) {
  return eliminate_phases(decompose_mod_phase(u));
}

/// V_K ... V_1 as a dense matrix.
ComplexMatrix factor_product(int n, std::span<const RotationFactor> factors);

/// V_K ... V_1 diag(e^{i theta}) e^{i Gamma/N}.
ComplexMatrix reconstruct(const Factorization& f);

/// Same factor, non-negative angle; a negative C is carried as phi + pi.
RotationFactor normalize_sign(RotationFactor factor);

}  // namespace qlgc
