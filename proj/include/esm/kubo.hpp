#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "esm/correlation.hpp"
#include "esm/matrix.hpp"
#include "esm/parallel.hpp"
#include "esm/spectrum.hpp"
#include "esm/thermal.hpp"

namespace esm {

/// Equal-time pairing sum_{nm} W_{nm} * At_{nm} * Bt_{mn} evaluated in a
/// fixed row-major order so the result is reproducible bit for bit.
inline Complex kubo_pairing(const RealMatrix& weights, const ComplexMatrix& a_eig,
                            const ComplexMatrix& b_eig) {
  const auto n = weights.rows();
  if (a_eig.rows() != n || b_eig.rows() != n || weights.cols() != n) {
    throw DimMismatch("pairing: dimension mismatch");
  }
  Complex acc(0.0, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      acc += weights(i, j) * a_eig(i, j) * b_eig(j, i);
    }
  }
  return acc;
}

/// Canonical two-operator correlator with the first operator transformed:
///   C(t) = sum_{nm} W_{nm} At_{nm} Bt_{mn} exp(i (E_m - E_n) t / hbar).
/// A and B are passed in the Schroedinger picture in the original basis.
inline CorrelationSeries kubo_correlator(const Spectrum& spec, const ThermalParams& th,
                                         const OperatorMatrix& a, const OperatorMatrix& b,
                                         const std::vector<double>& times, double hbar) {
  th.validate();
  if (!(hbar > 0.0)) throw ValidationError("system: hbar > 0");
  if (!a.is_hermitian() || !b.is_hermitian()) {
    throw NotHermitian("correlator: both operators must be Hermitian");
  }
  const auto n = spec.dim();
  if (a.dim() != n || b.dim() != n) throw DimMismatch("correlator: operator dim != spectrum dim");

  const ComplexMatrix a_eig = spec.to_eigenbasis(a.mat());
  const ComplexMatrix b_eig = spec.to_eigenbasis(b.mat());
  const RealMatrix weights = kubo_weight_matrix(spec, th);

  // Precompute the time-independent coefficient of each phase factor.
  ComplexMatrix coeff(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      coeff(i, j) = weights(i, j) * a_eig(i, j) * b_eig(j, i);
    }
  }

  CorrelationSeries out;
  out.times = times;
  out.values.assign(times.size(), Complex(0.0, 0.0));
  out.label = "kubo";
  parallel_for(times.size(), [&](std::size_t k) {
    const double t = times[k];
    Complex acc(0.0, 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double omega = (spec.energies(j) - spec.energies(i)) / hbar;
        acc += coeff(i, j) * std::exp(Complex(0.0, omega * t));
      }
    }
    out.values[k] = acc;
  });
  return out;
}

}  // namespace esm
