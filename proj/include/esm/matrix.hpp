#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "esm/errors.hpp"

namespace esm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Dense operator in a fixed orthonormal basis. The Hermitian flag is part of
/// the contract: it is only set by the checked factory, so downstream code can
/// rely on it instead of re-verifying.
class OperatorMatrix {
 public:
  /// Wraps `m` after verifying max|m - m^dagger| <= 1e-12 * max|m|.
  static OperatorMatrix hermitian(ComplexMatrix m) {
    require_square(m);
    const double scale = max_abs(m);
    const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) {
      throw NotHermitian("matrix fails the Hermiticity bound: asymmetry " + std::to_string(asym) +
                         " vs scale " + std::to_string(scale));
    }
    return OperatorMatrix(std::move(m), true);
  }

  /// Wraps `m` with no symmetry claim.
  static OperatorMatrix general(ComplexMatrix m) {
    require_square(m);
    return OperatorMatrix(std::move(m), false);
  }

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  bool is_hermitian() const noexcept { return hermitian_; }
  const ComplexMatrix& mat() const noexcept { return m_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  OperatorMatrix(ComplexMatrix m, bool hermitian) : m_(std::move(m)), hermitian_(hermitian) {}

  static void require_square(const ComplexMatrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw ValidationError("operator matrix must be square and non-empty");
    }
  }

  ComplexMatrix m_;
  bool hermitian_;
};

/// ab - ba. The result carries no Hermitian flag: the commutator of Hermitian
/// operators is anti-Hermitian.
inline OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) throw DimMismatch("commutator: operand dimensions differ");
  return OperatorMatrix::general(a.mat() * b.mat() - b.mat() * a.mat());
}

}  // namespace esm
