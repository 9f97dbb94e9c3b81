#pragma once

#include <cmath>

#include "esm/errors.hpp"
#include "esm/matrix.hpp"
#include "esm/spectrum.hpp"

namespace esm {

struct ThermalParams {
  double beta = 1.0;
  double kB = 1.0;

  void validate() const {
    if (!(beta > 0.0)) throw ValidationError("thermo: beta > 0");
    if (!(kB > 0.0)) throw ValidationError("thermo: kB > 0");
  }
};

/// Partition data in overflow-safe shifted form:
/// shifted_sum = sum_n exp(-beta (E_n - E_0)).
struct PartitionFunction {
  double shifted_sum;
  double ground_energy;
  double beta;

  double log_value() const { return std::log(shifted_sum) - beta * ground_energy; }

  /// Unshifted Z; may underflow or overflow for extreme beta * E_0. Prefer
  /// log_value or shifted_sum in numerical work.
  double value() const { return std::exp(log_value()); }
};

inline PartitionFunction partition_function(const Spectrum& s, const ThermalParams& th) {
  th.validate();
  const double e0 = s.energies(0);
  double z = 0.0;
  for (int n = 0; n < s.dim(); ++n) z += std::exp(-th.beta * (s.energies(n) - e0));
  return PartitionFunction{z, e0, th.beta};
}

/// Normalized Boltzmann weights w_n = exp(-beta (E_n - E_0)) / shifted_sum.
inline RealVector boltzmann_weights(const Spectrum& s, const ThermalParams& th) {
  const PartitionFunction pf = partition_function(s, th);
  RealVector w(s.dim());
  for (int n = 0; n < s.dim(); ++n) {
    w(n) = std::exp(-th.beta * (s.energies(n) - pf.ground_energy)) / pf.shifted_sum;
  }
  return w;
}

/// <op>_beta = sum_n w_n (U^dagger op U)_{nn}; real for Hermitian op.
inline double thermal_expectation(const Spectrum& s, const ThermalParams& th, const OperatorMatrix& op) {
  if (!op.is_hermitian()) throw NotHermitian("thermal_expectation: operator must be Hermitian");
  if (op.dim() != s.dim()) throw DimMismatch("thermal_expectation: operator/spectrum dimension");
  const RealVector w = boltzmann_weights(s, th);
  Complex acc = 0.0;
  for (int n = 0; n < s.dim(); ++n) {
    acc += w(n) * s.vectors.col(n).dot(op.mat() * s.vectors.col(n));
  }
  return acc.real();
}

/// kappa(Delta) = (e^{beta Delta} - 1) / (beta Delta) with kappa(0) = 1;
/// second-order series below the degeneracy threshold, expm1 otherwise.
inline double kubo_kappa(double beta, double delta, double eps_deg) {
  const double u = beta * delta;
  if (std::abs(delta) <= eps_deg) return 1.0 + 0.5 * u + u * u / 6.0;
  return std::expm1(u) / u;
}

/// Kubo transform: eigenbasis elements A_{nm} * kappa(E_n - E_m), rotated back
/// to the input basis. Generally non-Hermitian (kappa is not even in Delta),
/// so the result carries no Hermitian flag.
inline OperatorMatrix kubo_transform(const Spectrum& s, const ThermalParams& th, const OperatorMatrix& op) {
  if (!op.is_hermitian()) throw NotHermitian("kubo_transform: operator must be Hermitian");
  if (op.dim() != s.dim()) throw DimMismatch("kubo_transform: operator/spectrum dimension");
  th.validate();
  const double eps = s.degeneracy_epsilon();
  ComplexMatrix at = s.to_eigenbasis(op.mat());
  for (int n = 0; n < s.dim(); ++n) {
    for (int m = 0; m < s.dim(); ++m) {
      at(n, m) *= kubo_kappa(th.beta, s.energies(n) - s.energies(m), eps);
    }
  }
  return OperatorMatrix::general(s.from_eigenbasis(at));
}

/// sinh(u)/u with the small-argument series.
inline double sinhc(double u) {
  if (std::abs(u) < 1e-5) {
    const double u2 = u * u;
    return 1.0 + u2 / 6.0 + u2 * u2 / 120.0;
  }
  return std::sinh(u) / u;
}

/// Stable symmetric correlator weight
///   W_{nm} = (e^{-beta E_m} - e^{-beta E_n}) / (Z beta (E_n - E_m)),
/// degenerate limit e^{-beta E_n} / Z. Evaluated with ground-shifted
/// exponents; for small beta |Delta| the symmetric sinhc form
/// e^{-beta(Ebar - E_0)} sinhc(beta Delta / 2) / Z' avoids cancellation, and
/// for large beta |Delta| the explicit difference avoids sinh overflow.
/// Multiplying eigenbasis elements A_{nm} by beta-less kappa would overflow;
/// this form never does: W_{nm} <= e^{-beta (min(E_n,E_m) - E_0)}.
inline RealMatrix kubo_weight_matrix(const Spectrum& s, const ThermalParams& th) {
  const PartitionFunction pf = partition_function(s, th);
  const int n = s.dim();
  RealVector x(n);
  for (int i = 0; i < n; ++i) x(i) = th.beta * (s.energies(i) - pf.ground_energy);
  RealMatrix w(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double dx = x(i) - x(j);  // = beta (E_i - E_j)
      if (std::abs(dx) <= 1e-2) {
        w(i, j) = std::exp(-0.5 * (x(i) + x(j))) * sinhc(0.5 * dx) / pf.shifted_sum;
      } else {
        w(i, j) = (std::exp(-x(j)) - std::exp(-x(i))) / (pf.shifted_sum * dx);
      }
    }
  }
  return w;
}

}  // namespace esm
