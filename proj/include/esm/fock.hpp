#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "esm/basis.hpp"
#include "esm/matrix.hpp"
#include "esm/poly.hpp"

namespace esm {

/// Position operator in the reference Fock basis, on the padded dimension
/// size + build_pad: q_{n,n+1} = q_{n+1,n} = sqrt(hbar (n+1) / (2 m w_r)).
inline OperatorMatrix build_position(const BasisSpec& b) {
  b.validate();
  const int d = b.padded_size();
  ComplexMatrix q = ComplexMatrix::Zero(d, d);
  const double s = b.hbar / (2.0 * b.mass * b.ref_frequency);
  for (int n = 0; n + 1 < d; ++n) {
    const double v = std::sqrt(s * (n + 1));
    q(n, n + 1) = v;
    q(n + 1, n) = v;
  }
  return OperatorMatrix::hermitian(std::move(q));
}

/// Momentum operator on the padded dimension:
/// p_{n+1,n} = i sqrt(m hbar w_r (n+1) / 2), p_{n,n+1} = conj(p_{n+1,n}).
inline OperatorMatrix build_momentum(const BasisSpec& b) {
  b.validate();
  const int d = b.padded_size();
  ComplexMatrix p = ComplexMatrix::Zero(d, d);
  const double s = b.mass * b.hbar * b.ref_frequency / 2.0;
  for (int n = 0; n + 1 < d; ++n) {
    const double v = std::sqrt(s * (n + 1));
    p(n + 1, n) = Complex(0.0, v);
    p(n, n + 1) = Complex(0.0, -v);
  }
  return OperatorMatrix::hermitian(std::move(p));
}

namespace detail {

/// Horner evaluation of a polynomial on a (padded) matrix argument.
inline ComplexMatrix poly_on_matrix(const PolynomialObservable& poly, const ComplexMatrix& q) {
  const auto d = q.rows();
  ComplexMatrix acc = ComplexMatrix::Zero(d, d);
  const auto& c = poly.coeffs();
  for (std::size_t k = c.size(); k-- > 0;) {
    acc = (q * acc).eval();
    acc.diagonal().array() += c[k];
  }
  return acc;
}

}  // namespace detail

/// poly(q) formed on the padded basis, then truncated to size x size. The
/// build-then-truncate order keeps every retained element exact.
inline OperatorMatrix apply_polynomial(const PolynomialObservable& poly, const BasisSpec& b) {
  b.validate();
  if (b.build_pad < poly.degree()) {
    throw PadTooSmall("apply_polynomial: build_pad " + std::to_string(b.build_pad) +
                      " < polynomial degree " + std::to_string(poly.degree()));
  }
  const ComplexMatrix q = build_position(b).mat();
  ComplexMatrix full = detail::poly_on_matrix(poly, q);
  return OperatorMatrix::hermitian(full.topLeftCorner(b.size, b.size).eval());
}

/// H = p^2 / (2m) + V(q), assembled on the padded basis and truncated to size.
inline OperatorMatrix build_hamiltonian(const BasisSpec& b, const PolynomialObservable& potential) {
  b.validate();
  const int need = std::max(2, potential.degree());
  if (b.build_pad < need) {
    throw PadTooSmall("build_hamiltonian: build_pad " + std::to_string(b.build_pad) +
                      " < max(2, degree V) = " + std::to_string(need));
  }
  const ComplexMatrix p = build_momentum(b).mat();
  const ComplexMatrix q = build_position(b).mat();
  ComplexMatrix h = (p * p) / (2.0 * b.mass) + detail::poly_on_matrix(potential, q);
  return OperatorMatrix::hermitian(h.topLeftCorner(b.size, b.size).eval());
}

}  // namespace esm
