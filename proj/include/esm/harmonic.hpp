#pragma once

#include <cmath>

#include "esm/errors.hpp"
#include "esm/matrix.hpp"

namespace esm {

/// Parameters of the closed-form harmonic-oscillator reference formulas.
struct HarmonicParams {
  double mass = 1.0;
  double omega = 1.0;
  double beta = 1.0;
  double hbar = 1.0;

  void validate() const {
    if (!(mass > 0.0)) throw ValidationError("harmonic: mass > 0");
    if (!(omega > 0.0)) throw ValidationError("harmonic: omega > 0");
    if (!(beta > 0.0)) throw ValidationError("harmonic: beta > 0");
    if (!(hbar > 0.0)) throw ValidationError("harmonic: hbar > 0");
  }
};

/// Exact position autocorrelation with one operator Kubo-transformed:
/// cos(omega t) / (beta m omega^2).
inline double oracle_kubo_qq(const HarmonicParams& hp, double t) {
  hp.validate();
  return std::cos(hp.omega * t) / (hp.beta * hp.mass * hp.omega * hp.omega);
}

/// Momentum expectation of the mu-prepared thermal state evolved under the
/// nu-perturbed oscillator: (mu Omega / omega^2) sin(Omega t),
/// Omega = sqrt(omega^2 + nu/m).  Only defined while the perturbed
/// potential stays confining.
inline double oracle_p_munu(const HarmonicParams& hp, double mu, double nu, double t) {
  hp.validate();
  const double w2 = hp.omega * hp.omega;
  const double cap2 = w2 + nu / hp.mass;
  if (!(cap2 > 0.0)) throw UnstableNu("oracle: nu <= -m omega^2, perturbed oscillator unstable");
  const double cap = std::sqrt(cap2);
  return mu * cap / w2 * std::sin(cap * t);
}

/// Third mixed derivative d^3 p / (d mu d nu d t) at mu = nu = 0:
/// cos(omega t)/(m omega^2) - t sin(omega t)/(2 m omega).
inline double oracle_mixed_derivative(const HarmonicParams& hp, double t) {
  hp.validate();
  const double wt = hp.omega * t;
  return std::cos(wt) / (hp.mass * hp.omega * hp.omega) -
         t * std::sin(wt) / (2.0 * hp.mass * hp.omega);
}

/// Companion correlator that carries the secular growth:
/// t sin(omega t) / (2 beta m omega).
inline double oracle_ckad(const HarmonicParams& hp, double t) {
  hp.validate();
  return t * std::sin(hp.omega * t) / (2.0 * hp.beta * hp.mass * hp.omega);
}

/// Approximate correlator in two equivalent forms: the explicit two-term
/// value and its envelope/phase decomposition value = envelope*cos(wt+phase).
struct KvOracle {
  double value;
  double envelope;
  double phase;
};

inline KvOracle oracle_kv(const HarmonicParams& hp, double t) {
  hp.validate();
  const double wt = hp.omega * t;
  const double norm = hp.beta * hp.mass * hp.omega * hp.omega;
  KvOracle out;
  out.value = std::cos(wt) / norm - t * std::sin(wt) / (2.0 * hp.beta * hp.mass * hp.omega);
  out.envelope = std::sqrt(1.0 + wt * wt / 4.0) / norm;
  out.phase = std::atan(wt / 2.0);
  return out;
}

/// Ratio of approximate to exact correlator; a function of omega*t only:
/// 1 - (omega t / 2) tan(omega t).  Undefined where cos(omega t) = 0.
inline double oracle_ratio(double omega_t) {
  return 1.0 - 0.5 * omega_t * std::tan(omega_t);
}

/// Closed-form dropped operator for the harmonic oscillator with B = q:
/// q0*(wt sin wt)/2 + p0*(sin wt - wt cos wt)/(2 m omega).
inline OperatorMatrix oracle_d_matrix(const HarmonicParams& hp, double t,
                                      const OperatorMatrix& q0, const OperatorMatrix& p0) {
  hp.validate();
  if (q0.dim() != p0.dim()) throw DimMismatch("oracle: q0 and p0 dims differ");
  const double wt = hp.omega * t;
  const double cq = 0.5 * wt * std::sin(wt);
  const double cp = (std::sin(wt) - wt * std::cos(wt)) / (2.0 * hp.mass * hp.omega);
  ComplexMatrix d = cq * q0.mat() + cp * p0.mat();
  return OperatorMatrix::general(std::move(d));
}

}  // namespace esm
