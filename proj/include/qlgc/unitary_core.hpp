#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qlgc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// exp[C (x_m sin(phi) - y_m cos(phi))] with x_m = e_{m,m+1} - e_{m+1,m} and
/// y_m = i (e_{m,m+1} + e_{m+1,m}): the rotation one resonant pulse on
/// transition m realizes in the interaction picture.
struct RotationFactor {
  int transition = 1;  // m, 1-based
  double angle = 0.0;  // C, rad
  double phase = 0.0;  // phi, rad
};

/// Residual diagonal phases diag(e^{i theta_n}) and the global phase Gamma
/// (e^{i Gamma} = det U).
struct DiagonalPhases {
  std::vector<double> thetas;
  double global = 0.0;
};

/// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

/// Dense N x N matrix of a rotation factor. Identity outside the 2x2 block
///   [[cos C, -i e^{i phi} sin C], [-i e^{-i phi} sin C, cos C]]
/// at rows/cols (m, m+1). Throws InputError for m outside [1, N-1].
ComplexMatrix factor_matrix(int n, const RotationFactor& factor);

/// In-place m <- V m; touches two rows only.
void apply_factor_left(ComplexMatrix& m, const RotationFactor& factor);

/// In-place m <- V^dagger m.
void apply_factor_inverse_left(ComplexMatrix& m, const RotationFactor& factor);

/// Completes a unit vector to a unitary whose first column it is, by
/// Gram-Schmidt on the columns (v | e_2 | ... | e_N). If some e_k is already
/// in the span (only possible when v_1 = 0) it is replaced by e_1.
ComplexMatrix gram_schmidt_extend(const ComplexVector& first_column);

struct Eigensystem {
  Eigen::VectorXd values;  // non-increasing
  ComplexMatrix vectors;   // columns; first nonzero component real positive
};

/// Eigen-decomposition of a Hermitian matrix with eigenvalues in descending
/// order. Degenerate eigenvalues are ordered by ascending index of the
/// eigenvector's largest-magnitude component.
Eigensystem hermitian_eigensystem(const ComplexMatrix& a);

/// ||A - A^dagger||_F <= tolerance * ||A||_F.
bool is_hermitian(const ComplexMatrix& a, double tolerance = 1e-10);

/// ||M^dagger M - I||_F.
double unitarity_defect(const ComplexMatrix& m);

}  // namespace qlgc
