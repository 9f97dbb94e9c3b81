#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "esm/errors.hpp"
#include "esm/matrix.hpp"

namespace esm {

/// Eigendecomposition of a Hermitian operator: ascending eigenvalues and a
/// unitary whose column n is eigenstate n, canonicalized by eigh below.
struct Spectrum {
  RealVector energies;
  ComplexMatrix vectors;

  int dim() const noexcept { return static_cast<int>(energies.size()); }

  /// Near-degeneracy threshold: 1e-10 * max(1, spectral range). Energy
  /// denominators below it are evaluated by series.
  double degeneracy_epsilon() const {
    const double range = energies(energies.size() - 1) - energies(0);
    return 1e-10 * std::max(1.0, range);
  }

  ComplexMatrix to_eigenbasis(const ComplexMatrix& a) const { return vectors.adjoint() * a * vectors; }
  ComplexMatrix from_eigenbasis(const ComplexMatrix& a) const { return vectors * a * vectors.adjoint(); }
};

/// Hermitian eigendecomposition with a convention that makes the output a
/// deterministic function of the input:
///   - eigenvalues ascending;
///   - each column's phase fixed so that its largest-magnitude component
///     (first such index on ties) is real and positive;
///   - within a near-degenerate cluster, columns ordered by that anchor index.
inline Spectrum eigh(const OperatorMatrix& op) {
  if (!op.is_hermitian()) throw NotHermitian("eigh: operator is not flagged Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(op.mat());
  if (solver.info() != Eigen::Success) throw NoConvergence("eigh: eigensolver did not converge");
  RealVector e = solver.eigenvalues();
  ComplexMatrix u = solver.eigenvectors();
  const int n = static_cast<int>(e.size());

  std::vector<int> anchor(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < n; ++j) {
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      const double a = std::abs(u(i, j));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    const Complex pivot = u(imax, j);
    u.col(j) *= std::conj(pivot) / std::abs(pivot);
    anchor[static_cast<std::size_t>(j)] = imax;
  }

  // Reorder columns inside near-degenerate clusters by anchor index.
  const double eps = 1e-10 * std::max(1.0, e(n - 1) - e(0));
  int j = 0;
  while (j < n) {
    int k = j + 1;
    while (k < n && e(k) - e(k - 1) <= eps) ++k;
    if (k - j > 1) {
      std::vector<int> idx;
      for (int c = j; c < k; ++c) idx.push_back(c);
      std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return anchor[static_cast<std::size_t>(a)] < anchor[static_cast<std::size_t>(b)];
      });
      ComplexMatrix cols(n, k - j);
      RealVector vals(k - j);
      for (int c = 0; c < k - j; ++c) {
        cols.col(c) = u.col(idx[static_cast<std::size_t>(c)]);
        vals(c) = e(idx[static_cast<std::size_t>(c)]);
      }
      u.block(0, j, n, k - j) = cols;
      e.segment(j, k - j) = vals;
    }
    j = k;
  }
  return Spectrum{std::move(e), std::move(u)};
}

}  // namespace esm
