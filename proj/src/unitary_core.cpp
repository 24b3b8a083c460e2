#include "qlgc/unitary_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qlgc/constants.hpp"
#include "qlgc/error.hpp"

namespace qlgc {

namespace {

using constants::pi;

void check_transition(Eigen::Index n, int transition) {
  if (transition < 1 || transition > n - 1) {
    std::ostringstream msg;
    msg << "transition index " << transition << " out of range [1, " << n - 1 << "]";
    throw InputError(msg.str());
  }
}

// Rows (m-1, m) of `target` <- block * rows.
void mix_rows(ComplexMatrix& target, int transition, Complex b00, Complex b01, Complex b10,
              Complex b11) {
  const Eigen::Index i = transition - 1;
  for (Eigen::Index col = 0; col < target.cols(); ++col) {
    const Complex upper = target(i, col);
    const Complex lower = target(i + 1, col);
    target(i, col) = b00 * upper + b01 * lower;
    target(i + 1, col) = b10 * upper + b11 * lower;
  }
}

constexpr double kGramSchmidtDrop = 1e-8;

}  // namespace

double wrap_phase(double angle) {
  double wrapped = std::remainder(angle, 2.0 * pi);
  if (wrapped <= -pi) wrapped += 2.0 * pi;
  return wrapped;
}

ComplexMatrix factor_matrix(int n, const RotationFactor& factor) {
  check_transition(n, factor.transition);
  ComplexMatrix v = ComplexMatrix::Identity(n, n);
  apply_factor_left(v, factor);
  return v;
}

void apply_factor_left(ComplexMatrix& m, const RotationFactor& factor) {
  check_transition(m.rows(), factor.transition);
  const double c = std::cos(factor.angle);
  const double s = std::sin(factor.angle);
  const Complex minus_i(0.0, -1.0);
  const Complex up = minus_i * std::polar(1.0, factor.phase) * s;
  const Complex down = minus_i * std::polar(1.0, -factor.phase) * s;
  mix_rows(m, factor.transition, c, up, down, c);
}

void apply_factor_inverse_left(ComplexMatrix& m, const RotationFactor& factor) {
  apply_factor_left(m, RotationFactor{factor.transition, -factor.angle, factor.phase});
}

ComplexMatrix gram_schmidt_extend(const ComplexVector& first_column) {
  const Eigen::Index n = first_column.size();
  if (n < 1) throw InputError("cannot extend an empty vector");
  if (!first_column.allFinite()) throw InputError("vector has non-finite entries");
  const double norm = first_column.norm();
  if (std::abs(norm - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "first column must be a unit vector (norm " << norm << ")";
    throw InputError(msg.str());
  }

  ComplexMatrix q(n, n);
  q.col(0) = first_column;
  Eigen::Index filled = 1;

  std::vector<Eigen::Index> candidates(n);
  std::iota(candidates.begin(), candidates.end(), Eigen::Index{1});
  candidates.back() = 0;  // e_2, ..., e_N, then e_1 as fallback

  for (Eigen::Index basis : candidates) {
    if (filled == n) break;
    ComplexVector v = ComplexVector::Unit(n, basis);
    // Two passes of modified Gram-Schmidt keep the result orthogonal to
    // machine precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < filled; ++k) v -= q.col(k).dot(v) * q.col(k);
    }
    const double remaining = v.norm();
    if (remaining < kGramSchmidtDrop) continue;
    q.col(filled++) = v / remaining;
  }
  return q;
}

bool is_hermitian(const ComplexMatrix& a, double tolerance) {
  if (a.rows() != a.cols()) return false;
  // Relative, so that operators in SI units (dipoles ~ 1e-30 C m) are judged
  // on their own scale.
  return (a - a.adjoint()).norm() <= tolerance * a.norm();
}

Eigensystem hermitian_eigensystem(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw InputError("eigensystem needs a square matrix");
  if (!a.allFinite()) throw InputError("matrix has non-finite entries");
  const double scale = a.norm();
  if ((a - a.adjoint()).norm() > 1e-10 * std::max(scale, std::numeric_limits<double>::min())) {
    throw InputError("matrix is not Hermitian");
  }
  const Eigen::Index n = a.rows();
  const ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");

  const Eigen::VectorXd& values = solver.eigenvalues();
  ComplexMatrix vectors = solver.eigenvectors();

  // Phase convention: first nonzero component real positive.
  for (Eigen::Index k = 0; k < n; ++k) {
    auto col = vectors.col(k);
    const double cut = 1e-12 * col.norm();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) > cut) {
        col *= std::conj(col(i)) / std::abs(col(i));
        col(i) = std::abs(col(i));
        break;
      }
    }
  }

  std::vector<Eigen::Index> dominant(n);
  for (Eigen::Index k = 0; k < n; ++k) vectors.col(k).cwiseAbs().maxCoeff(&dominant[k]);

  // Solver output is ascending; reverse, then order runs of (numerically)
  // equal eigenvalues by the dominant basis index.
  const double tie = 1e-12 * std::max(scale, 1e-300);
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index k = 0; k < n; ++k) order[k] = n - 1 - k;
  for (Eigen::Index begin = 0; begin < n;) {
    Eigen::Index end = begin + 1;
    while (end < n && values(order[end - 1]) - values(order[end]) <= tie) ++end;
    std::sort(order.begin() + begin, order.begin() + end,
              [&](Eigen::Index x, Eigen::Index y) { return dominant[x] < dominant[y]; });
    begin = end;
  }

  Eigensystem result{Eigen::VectorXd(n), ComplexMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    result.values(k) = values(order[k]);
    result.vectors.col(k) = vectors.col(order[k]);
  }
  return result;
}

double unitarity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("unitarity defect needs a square matrix");
  return (m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols())).norm();
}

}  // namespace qlgc
