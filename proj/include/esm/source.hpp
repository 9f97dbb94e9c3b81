#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "esm/basis.hpp"
#include "esm/correlation.hpp"
#include "esm/errors.hpp"
#include "esm/fock.hpp"
#include "esm/kubo.hpp"
#include "esm/matrix.hpp"
#include "esm/parallel.hpp"
#include "esm/poly.hpp"
#include "esm/spectrum.hpp"
#include "esm/thermal.hpp"

namespace esm {

/// A 1D quantum system: truncated Fock representation, potential, and
/// thermal state parameters.
struct SystemSpec {
  BasisSpec basis;
  PolynomialObservable potential{0.0, 0.0, 0.5};
  ThermalParams th;

  void validate() const {
    basis.validate();
    th.validate();
  }

  SystemSpec with_potential(const PolynomialObservable& v) const {
    SystemSpec s = *this;
    s.potential = v;
    return s;
  }
};

enum class Scheme { central2, central2_richardson };
enum class NuMode { fd, semianalytic_mu };

inline std::string scheme_name(Scheme s) {
  return s == Scheme::central2 ? "central2" : "central2_richardson";
}
inline std::string nu_mode_name(NuMode m) {
  return m == NuMode::fd ? "fd" : "semianalytic_mu";
}

/// Finite-difference configuration for the source derivatives.
struct SourceStencil {
  double h_mu = 1e-3;
  double h_nu = 1e-3;
  Scheme scheme = Scheme::central2;
  NuMode nu_mode = NuMode::fd;

  void validate() const {
    if (!(h_mu > 0.0) || !std::isfinite(h_mu)) throw ValidationError("esm: h_mu > 0");
    if (!(h_nu > 0.0) || !std::isfinite(h_nu)) throw ValidationError("esm: h_nu > 0");
  }
};

/// Diagnostic for whether a (possibly perturbed) spectrum is trustworthy in
/// the truncated basis.
struct StabilityReport {
  enum class Status { pass, pass_with_note, fail };

  Status status = Status::pass;
  double top_weight = 0.0;    ///< ground-state weight on the top decile of basis states
  double ground_drift = 0.0;  ///< |E0(N) - E0(N-4)| from a sub-block re-diagonalization
  std::string note;

  bool ok() const noexcept { return status != Status::fail; }

  std::string status_name() const {
    switch (status) {
      case Status::pass: return "pass";
      case Status::pass_with_note: return "pass_with_note";
      default: return "fail";
    }
  }
};

/// Checks that the ground state is not an artifact of basis truncation.
/// `sys.potential` must be the potential whose spectrum is being examined;
/// an unbounded-below potential downgrades a pass to pass_with_note.
inline StabilityReport stability_check(const Spectrum& spec, const SystemSpec& sys) {
  StabilityReport rep;
  const int n = spec.dim();

  const int top = std::max(1, n / 10);
  double weight = 0.0;
  for (int i = n - top; i < n; ++i) weight += std::norm(spec.vectors(i, 0));
  rep.top_weight = weight;

  if (n > 4) {
    const ComplexMatrix h =
        spec.vectors * spec.energies.cast<Complex>().asDiagonal() * spec.vectors.adjoint();
    ComplexMatrix sub = h.topLeftCorner(n - 4, n - 4);
    sub = 0.5 * (sub + sub.adjoint()).eval();
    const Spectrum sub_spec = eigh(OperatorMatrix::hermitian(std::move(sub)));
    rep.ground_drift = std::abs(sub_spec.energies(0) - spec.energies(0));
  }

  if (weight > 1e-8) {
    rep.status = StabilityReport::Status::fail;
    std::ostringstream os;
    os << "ground state carries weight " << weight
       << " on the top decile of basis states; spectrum is truncation-dominated";
    rep.note = os.str();
  } else if (sys.potential.unbounded_below()) {
    rep.status = StabilityReport::Status::pass_with_note;
    rep.note =
        "potential is unbounded below; spectrum is regularized by basis truncation "
        "(effectively stable)";
  }
  return rep;
}

/// H + strength * op(q), truncated to the working basis size.
inline OperatorMatrix perturbed_hamiltonian(const SystemSpec& sys, const PolynomialObservable& op,
                                            double strength) {
  sys.validate();
  return build_hamiltonian(sys.basis, sys.potential.plus(op, strength));
}

namespace detail {

/// Momentum operator truncated to the working basis size.
inline ComplexMatrix momentum_block(const BasisSpec& b) {
  return build_momentum(b).mat().topLeftCorner(b.size, b.size).eval();
}

/// Thermal density matrix in the original basis.
inline ComplexMatrix density_matrix(const Spectrum& s, const ThermalParams& th) {
  const RealVector w = boltzmann_weights(s, th);
  return s.vectors * w.cast<Complex>().asDiagonal() * s.vectors.adjoint();
}

/// d(rho_mu)/d(mu) at mu = 0 in the original basis:
/// -beta * (rho A^K - <A> rho), assembled stably in the eigenbasis where
/// (rho A^K)_{nm} = W_{nm} A~_{nm}.
inline ComplexMatrix density_matrix_mu_derivative(const Spectrum& s, const ThermalParams& th,
                                                  const OperatorMatrix& a) {
  const ComplexMatrix a_eig = s.to_eigenbasis(a.mat());
  const RealMatrix weights = kubo_weight_matrix(s, th);
  const RealVector w = boltzmann_weights(s, th);
  const double a_mean = thermal_expectation(s, th, a);
  const int n = s.dim();
  ComplexMatrix r(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) r(i, j) = weights(i, j) * a_eig(i, j);
    r(i, i) -= a_mean * w(i);
  }
  r *= -th.beta;
  return s.from_eigenbasis(r);
}

/// Double eigenstate sum p(t) = sum_{nm} e^{-i(E_n-E_m)t/hbar} R_{nm} P_{mn},
/// optionally with the analytic time derivative (each term times
/// -i(E_n-E_m)/hbar).  Summation order is fixed; time points fill disjoint
/// slots, so the result is identical for any thread count.
inline void accumulate_p_series(const ComplexMatrix& r_nu, const ComplexMatrix& p_nu,
                                const RealVector& e_nu, const std::vector<double>& times,
                                double hbar, bool time_derivative, std::vector<Complex>& out) {
  const int n = static_cast<int>(r_nu.rows());
  ComplexMatrix coeff(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) coeff(i, j) = r_nu(i, j) * p_nu(j, i);
  }
  out.assign(times.size(), Complex(0.0, 0.0));
  parallel_for(times.size(), [&](std::size_t k) {
    const double t = times[k];
    Complex acc(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double omega = (e_nu(i) - e_nu(j)) / hbar;
        Complex term = coeff(i, j) * std::exp(Complex(0.0, -omega * t));
        if (time_derivative) term *= Complex(0.0, -omega);
        acc += term;
      }
    }
    out[k] = acc;
  });
}

struct PerturbedSystem {
  Spectrum spec;
  StabilityReport report;
};

inline PerturbedSystem prepare_perturbed(const SystemSpec& sys, const PolynomialObservable& op,
                                         double strength) {
  const OperatorMatrix h = perturbed_hamiltonian(sys, op, strength);
  Spectrum spec = eigh(h);
  StabilityReport rep =
      stability_check(spec, sys.with_potential(sys.potential.plus(op, strength)));
  return {std::move(spec), std::move(rep)};
}

inline void require_stable(const StabilityReport& rep, const char* label) {
  if (!rep.ok()) {
    throw StabilityFailure(std::string(label) + ": " + rep.note);
  }
}

/// Closed-form phase integral phi(omega, t) = (e^{i omega t} - 1)/(i omega),
/// with phi(0, t) = t; series in theta = omega*t near zero.
inline Complex phase_integral(double omega, double t) {
  const double theta = omega * t;
  if (std::abs(theta) < 1e-3) {
    return t * Complex(1.0 - theta * theta / 6.0, 0.5 * theta - theta * theta * theta / 24.0);
  }
  return Complex(std::sin(theta) / omega, (1.0 - std::cos(theta)) / omega);
}

/// Dropped operator at time t, expressed in the eigenbasis of H:
/// D~ = -(i/hbar) [G~, W~] with G~_{nm} = F~_{nm} phi(omega_nm, t) and
/// W~_{nm} = V'~_{nm} e^{i omega_nm t}.  Formed from a single matrix product
/// K = G~ W~ as -(i/hbar)(K - K^dagger), which is Hermitian to the bit.
inline ComplexMatrix d_matrix_eigenbasis(const RealVector& e, const ComplexMatrix& f_eig,
                                         const ComplexMatrix& vp_eig, double t, double hbar) {
  const int n = static_cast<int>(e.size());
  ComplexMatrix g(n, n);
  ComplexMatrix w(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double omega = (e(i) - e(j)) / hbar;
      g(i, j) = f_eig(i, j) * phase_integral(omega, t);
      w(i, j) = vp_eig(i, j) * std::exp(Complex(0.0, omega * t));
    }
  }
  const ComplexMatrix k = g * w;
  return (Complex(0.0, -1.0) / hbar) * (k - k.adjoint());
}

}  // namespace detail

/// Nonequilibrium momentum expectation: the thermal state of H + mu*a(q)
/// evolved under H + nu*f(q), traced against the momentum operator.
inline CorrelationSeries momentum_expectation_impl(const SystemSpec& sys,
                                                   const PolynomialObservable& a,
                                                   const PolynomialObservable& f, double mu,
                                                   double nu, const std::vector<double>& times,
                                                   bool time_derivative) {
  sys.validate();
  detail::PerturbedSystem mu_sys = detail::prepare_perturbed(sys, a, mu);
  detail::require_stable(mu_sys.report, "perturbed preparation Hamiltonian");
  detail::PerturbedSystem nu_sys = detail::prepare_perturbed(sys, f, nu);
  detail::require_stable(nu_sys.report, "perturbed evolution Hamiltonian");

  const ComplexMatrix rho = detail::density_matrix(mu_sys.spec, sys.th);
  const ComplexMatrix p = detail::momentum_block(sys.basis);
  const ComplexMatrix r_nu = nu_sys.spec.to_eigenbasis(rho);
  const ComplexMatrix p_nu = nu_sys.spec.to_eigenbasis(p);

  CorrelationSeries out;
  out.times = times;
  out.label = time_derivative ? "p_munu_dt" : "p_munu";
  detail::accumulate_p_series(r_nu, p_nu, nu_sys.spec.energies, times, sys.basis.hbar,
                              time_derivative, out.values);
  return out;
}

inline CorrelationSeries momentum_expectation(const SystemSpec& sys, const PolynomialObservable& a,
                                              const PolynomialObservable& f, double mu, double nu,
                                              const std::vector<double>& times) {
  return momentum_expectation_impl(sys, a, f, mu, nu, times, false);
}

/// Analytic time derivative of momentum_expectation (phase multiplication;
/// no time-step error).
inline CorrelationSeries momentum_expectation_dt(const SystemSpec& sys,
                                                 const PolynomialObservable& a,
                                                 const PolynomialObservable& f, double mu,
                                                 double nu, const std::vector<double>& times) {
  return momentum_expectation_impl(sys, a, f, mu, nu, times, true);
}

/// Estimator of the third mixed derivative d^3 p / (d mu d nu d t) at
/// mu = nu = 0.  The time derivative is always analytic; mu is handled by
/// central differences or exactly (semianalytic), nu always by central
/// differences, optionally Richardson-extrapolated.
///
/// `f_override`, when given, replaces the zero-constant antiderivative of b
/// as the evolution-side source polynomial (used by gauge-invariance tests).
inline CorrelationSeries mixed_derivative(const SystemSpec& sys, const PolynomialObservable& a,
                                          const PolynomialObservable& b,
                                          const SourceStencil& stencil,
                                          const std::vector<double>& times,
                                          const PolynomialObservable* f_override = nullptr) {
  sys.validate();
  stencil.validate();
  const PolynomialObservable f = f_override ? *f_override : b.antiderivative();
  const std::size_t nt = times.size();

  // Shared pieces for the semianalytic-mu path: the exact mu-derivative of
  // the density matrix, evaluated once on the unperturbed spectrum.
  std::optional<ComplexMatrix> rho_prime;
  if (stencil.nu_mode == NuMode::semianalytic_mu) {
    const Spectrum spec0 = eigh(build_hamiltonian(sys.basis, sys.potential));
    rho_prime = detail::density_matrix_mu_derivative(spec0, sys.th,
                                                     apply_polynomial(a, sys.basis));
  }
  const ComplexMatrix p = detail::momentum_block(sys.basis);

  auto estimate = [&](double h_mu, double h_nu) -> std::vector<Complex> {
    std::vector<Complex> vals(nt, Complex(0.0, 0.0));
    if (stencil.nu_mode == NuMode::fd) {
      const CorrelationSeries gpp = momentum_expectation_dt(sys, a, f, +h_mu, +h_nu, times);
      const CorrelationSeries gpm = momentum_expectation_dt(sys, a, f, +h_mu, -h_nu, times);
      const CorrelationSeries gmp = momentum_expectation_dt(sys, a, f, -h_mu, +h_nu, times);
      const CorrelationSeries gmm = momentum_expectation_dt(sys, a, f, -h_mu, -h_nu, times);
      const double denom = 4.0 * h_mu * h_nu;
      for (std::size_t k = 0; k < nt; ++k) {
        vals[k] = (gpp.values[k] - gpm.values[k] - gmp.values[k] + gmm.values[k]) / denom;
      }
    } else {
      std::vector<Complex> gp(nt), gm(nt);
      for (int sign : {+1, -1}) {
        detail::PerturbedSystem nu_sys =
            detail::prepare_perturbed(sys, f, sign * h_nu);
        detail::require_stable(nu_sys.report, "perturbed evolution Hamiltonian");
        const ComplexMatrix r_nu = nu_sys.spec.to_eigenbasis(*rho_prime);
        const ComplexMatrix p_nu = nu_sys.spec.to_eigenbasis(p);
        detail::accumulate_p_series(r_nu, p_nu, nu_sys.spec.energies, times, sys.basis.hbar,
                                    true, sign > 0 ? gp : gm);
      }
      for (std::size_t k = 0; k < nt; ++k) vals[k] = (gp[k] - gm[k]) / (2.0 * h_nu);
    }
    return vals;
  };

  CorrelationSeries out;
  out.times = times;
  out.label = "mixed_derivative";
  if (stencil.scheme == Scheme::central2_richardson) {
    const std::vector<Complex> d_h = estimate(stencil.h_mu, stencil.h_nu);
    const std::vector<Complex> d_half = estimate(0.5 * stencil.h_mu, 0.5 * stencil.h_nu);
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
      diff = std::max(diff, std::abs(d_h[k] - d_half[k]));
      scale = std::max(scale, std::abs(d_half[k]));
    }
    if (diff > scale) {
      std::ostringstream os;
      os << "stencil is cancellation-dominated: |D_h - D_{h/2}| = " << diff
         << " exceeds |D_{h/2}| = " << scale << " (steps h_mu=" << stencil.h_mu
         << ", h_nu=" << stencil.h_nu << " too small)";
      throw StencilDegenerate(os.str());
    }
    out.values.resize(nt);
    for (std::size_t k = 0; k < nt; ++k) {
      out.values[k] = (4.0 * d_half[k] - d_h[k]) / 3.0;
    }
  } else {
    out.values = estimate(stencil.h_mu, stencil.h_nu);
  }
  return out;
}

/// Approximate correlator: (1/beta) * mixed_derivative + <A><B>, with the
/// product term evaluated on the unperturbed spectrum.
inline CorrelationSeries kv_correlator(const SystemSpec& sys, const PolynomialObservable& a,
                                       const PolynomialObservable& b, const SourceStencil& stencil,
                                       const std::vector<double>& times,
                                       const PolynomialObservable* f_override = nullptr) {
  CorrelationSeries mixed = mixed_derivative(sys, a, b, stencil, times, f_override);
  const Spectrum spec0 = eigh(build_hamiltonian(sys.basis, sys.potential));
  const double a_mean = thermal_expectation(spec0, sys.th, apply_polynomial(a, sys.basis));
  const double b_mean = thermal_expectation(spec0, sys.th, apply_polynomial(b, sys.basis));
  CorrelationSeries out;
  out.times = times;
  out.label = "kv";
  out.values.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    out.values[k] = mixed.values[k] / sys.th.beta + a_mean * b_mean;
  }
  return out;
}

/// Dropped operator D(t) in the original basis; Hermitian, D(0) = 0.
inline OperatorMatrix d_operator(const Spectrum& spec, const OperatorMatrix& f_matrix,
                                 const PolynomialObservable& potential, double t,
                                 const SystemSpec& sys) {
  if (f_matrix.dim() != spec.dim()) throw DimMismatch("d_operator: matrix/spectrum dimension");
  const OperatorMatrix vp = apply_polynomial(potential.derivative(), sys.basis);
  const ComplexMatrix f_eig = spec.to_eigenbasis(f_matrix.mat());
  const ComplexMatrix vp_eig = spec.to_eigenbasis(vp.mat());
  const ComplexMatrix d_eig =
      detail::d_matrix_eigenbasis(spec.energies, f_eig, vp_eig, t, sys.basis.hbar);
  const ComplexMatrix d = spec.from_eigenbasis(d_eig);
  return OperatorMatrix::hermitian((0.5 * (d + d.adjoint())).eval());
}

/// Everything the exact reconstruction produces, term by term.
struct ESMReport {
  CorrelationSeries kv_series;
  CorrelationSeries c_ad_series;
  CorrelationSeries exact_formula_series;
  CorrelationSeries exact_direct_series;
  std::vector<double> d_expect_series;
  double a_expectation = 0.0;
  double b_expectation = 0.0;
  StabilityReport stability_mu;
  StabilityReport stability_nu;
  std::string diagnostics;
};

/// Exact reconstruction: C^KV(t) + C^K_AD(t) - <A><D(t)>, with every
/// intermediate series recorded.
inline ESMReport exact_formula_correlator(const SystemSpec& sys, const PolynomialObservable& a,
                                          const PolynomialObservable& b,
                                          const SourceStencil& stencil,
                                          const std::vector<double>& times) {
  sys.validate();
  stencil.validate();
  ESMReport rep;
  rep.kv_series = kv_correlator(sys, a, b, stencil, times);

  const Spectrum spec0 = eigh(build_hamiltonian(sys.basis, sys.potential));
  const OperatorMatrix a_mat = apply_polynomial(a, sys.basis);
  const OperatorMatrix b_mat = apply_polynomial(b, sys.basis);
  const PolynomialObservable f = b.antiderivative();
  const OperatorMatrix f_mat = apply_polynomial(f, sys.basis);
  const OperatorMatrix vp = apply_polynomial(sys.potential.derivative(), sys.basis);

  const ComplexMatrix a_eig = spec0.to_eigenbasis(a_mat.mat());
  const ComplexMatrix f_eig = spec0.to_eigenbasis(f_mat.mat());
  const ComplexMatrix vp_eig = spec0.to_eigenbasis(vp.mat());
  const RealMatrix weights = kubo_weight_matrix(spec0, sys.th);
  const RealVector w = boltzmann_weights(spec0, sys.th);
  rep.a_expectation = thermal_expectation(spec0, sys.th, a_mat);
  rep.b_expectation = thermal_expectation(spec0, sys.th, b_mat);

  const std::size_t nt = times.size();
  rep.c_ad_series.times = times;
  rep.c_ad_series.label = "c_ad";
  rep.c_ad_series.values.assign(nt, Complex(0.0, 0.0));
  rep.d_expect_series.assign(nt, 0.0);
  parallel_for(nt, [&](std::size_t k) {
    const ComplexMatrix d_eig = detail::d_matrix_eigenbasis(spec0.energies, f_eig, vp_eig,
                                                            times[k], sys.basis.hbar);
    rep.c_ad_series.values[k] = kubo_pairing(weights, a_eig, d_eig);
    Complex de(0.0, 0.0);
    for (int n = 0; n < spec0.dim(); ++n) de += w(n) * d_eig(n, n);
    rep.d_expect_series[k] = de.real();
  });

  rep.exact_direct_series = kubo_correlator(spec0, sys.th, a_mat, b_mat, times, sys.basis.hbar);
  rep.exact_direct_series.label = "exact_direct";

  rep.exact_formula_series.times = times;
  rep.exact_formula_series.label = "exact_formula";
  rep.exact_formula_series.values.resize(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    rep.exact_formula_series.values[k] = rep.kv_series.values[k] + rep.c_ad_series.values[k] -
                                         rep.a_expectation * rep.d_expect_series[k];
  }

  rep.stability_mu = detail::prepare_perturbed(sys, a, stencil.h_mu).report;
  rep.stability_nu = detail::prepare_perturbed(sys, f, stencil.h_nu).report;
  {
    std::ostringstream os;
    os << "stability(preparation source): " << rep.stability_mu.status_name()
       << " top_weight=" << rep.stability_mu.top_weight
       << " e0_drift=" << rep.stability_mu.ground_drift;
    if (!rep.stability_mu.note.empty()) os << " note=" << rep.stability_mu.note;
    os << "\nstability(evolution source): " << rep.stability_nu.status_name()
       << " top_weight=" << rep.stability_nu.top_weight
       << " e0_drift=" << rep.stability_nu.ground_drift;
    if (!rep.stability_nu.note.empty()) os << " note=" << rep.stability_nu.note;
    rep.diagnostics = os.str();
  }
  return rep;
}

/// Matrix-level identity check: central nu-difference of the analytically
/// t-differentiated Heisenberg momentum operator against -B(t) + D(t),
/// compared on the truncation-clean leading block (max(4, n/8) states).
inline double operator_identity_check(const SystemSpec& sys, const PolynomialObservable& b,
                                      double t, double h_nu) {
  sys.validate();
  if (!(h_nu > 0.0)) throw ValidationError("esm: h_nu > 0");
  const PolynomialObservable f = b.antiderivative();
  const ComplexMatrix p = detail::momentum_block(sys.basis);
  const double hbar = sys.basis.hbar;

  auto heisenberg_p_dt = [&](double nu) -> ComplexMatrix {
    const Spectrum s = eigh(perturbed_hamiltonian(sys, f, nu));
    const ComplexMatrix pe = s.to_eigenbasis(p);
    const int n = s.dim();
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double omega = (s.energies(i) - s.energies(j)) / hbar;
        m(i, j) = pe(i, j) * Complex(0.0, omega) * std::exp(Complex(0.0, omega * t));
      }
    }
    return s.from_eigenbasis(m);
  };

  const ComplexMatrix lhs =
      (heisenberg_p_dt(+h_nu) - heisenberg_p_dt(-h_nu)) / (2.0 * h_nu);

  const Spectrum spec0 = eigh(build_hamiltonian(sys.basis, sys.potential));
  ComplexMatrix b_eig = spec0.to_eigenbasis(apply_polynomial(b, sys.basis).mat());
  for (int i = 0; i < spec0.dim(); ++i) {
    for (int j = 0; j < spec0.dim(); ++j) {
      const double omega = (spec0.energies(i) - spec0.energies(j)) / hbar;
      b_eig(i, j) *= std::exp(Complex(0.0, omega * t));
    }
  }
  const ComplexMatrix b_t = spec0.from_eigenbasis(b_eig);
  const OperatorMatrix d =
      d_operator(spec0, apply_polynomial(f, sys.basis), sys.potential, t, sys);
  const ComplexMatrix rhs = -b_t + d.mat();

  const int k = std::max(4, sys.basis.size / 8);
  return max_abs((lhs - rhs).topLeftCorner(k, k));
}

/// Central finite difference of the partition function over the preparation
/// source against -beta * Z * <A>; relative error, falling back to absolute
/// when both sides are below 1e-10 in magnitude.
inline double partition_derivative_check(const SystemSpec& sys, const PolynomialObservable& a,
                                         double h_mu) {
  sys.validate();
  const Spectrum sp = eigh(perturbed_hamiltonian(sys, a, +h_mu));
  const Spectrum sm = eigh(perturbed_hamiltonian(sys, a, -h_mu));
  const Spectrum s0 = eigh(build_hamiltonian(sys.basis, sys.potential));
  const double beta = sys.th.beta;
  const double e_ref = s0.energies(0);
  auto z_shifted = [&](const Spectrum& s) {
    const PartitionFunction pf = partition_function(s, sys.th);
    return pf.shifted_sum * std::exp(-beta * (pf.ground_energy - e_ref));
  };
  const double lhs = (z_shifted(sp) - z_shifted(sm)) / (2.0 * h_mu);
  const double a_mean = thermal_expectation(s0, sys.th, apply_polynomial(a, sys.basis));
  const double rhs = -beta * z_shifted(s0) * a_mean;
  const double diff = std::abs(lhs - rhs);
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale > 1e-10 ? diff / scale : diff;
}

/// Central finite difference of the Boltzmann matrix over the preparation
/// source against -beta e^{-beta H} A^K; max-norm scaled by max(1, |rhs|).
/// Both sides are compared in the eigenbasis of H, where the product
/// e^{-beta E_n} kappa(E_n - E_m) reduces to the stable difference form
/// (e^{-beta E_m} - e^{-beta E_n})/(beta(E_n - E_m)); for wide spectra the
/// kappa factors alone overflow, so the transformed operator cannot be
/// represented in the original basis even though the product is bounded.
inline double boltzmann_derivative_check(const SystemSpec& sys, const PolynomialObservable& a,
                                         double h_mu) {
  sys.validate();
  auto boltzmann = [&](const Spectrum& s) -> ComplexMatrix {
    RealVector e(s.dim());
    for (int n = 0; n < s.dim(); ++n) e(n) = std::exp(-sys.th.beta * s.energies(n));
    return s.vectors * e.cast<Complex>().asDiagonal() * s.vectors.adjoint();
  };
  const Spectrum sp = eigh(perturbed_hamiltonian(sys, a, +h_mu));
  const Spectrum sm = eigh(perturbed_hamiltonian(sys, a, -h_mu));
  const Spectrum s0 = eigh(build_hamiltonian(sys.basis, sys.potential));
  const ComplexMatrix lhs =
      s0.to_eigenbasis((boltzmann(sp) - boltzmann(sm)) / (2.0 * h_mu));
  const ComplexMatrix a_eig = s0.to_eigenbasis(apply_polynomial(a, sys.basis).mat());
  const PartitionFunction pf = partition_function(s0, sys.th);
  const double z_total = pf.value();
  const RealMatrix weights = kubo_weight_matrix(s0, sys.th);
  ComplexMatrix rhs(s0.dim(), s0.dim());
  for (int i = 0; i < s0.dim(); ++i) {
    for (int j = 0; j < s0.dim(); ++j) {
      rhs(i, j) = -sys.th.beta * z_total * weights(i, j) * a_eig(i, j);
    }
  }
  return max_abs(lhs - rhs) / std::max(1.0, max_abs(rhs));
}

/// Central finite difference of the normalized density matrix over the
/// preparation source against the exact -beta rho (A^K - <A>); max-norm.
inline double density_derivative_check(const SystemSpec& sys, const PolynomialObservable& a,
                                       double h_mu) {
  sys.validate();
  const Spectrum sp = eigh(perturbed_hamiltonian(sys, a, +h_mu));
  const Spectrum sm = eigh(perturbed_hamiltonian(sys, a, -h_mu));
  const Spectrum s0 = eigh(build_hamiltonian(sys.basis, sys.potential));
  const ComplexMatrix lhs =
      (detail::density_matrix(sp, sys.th) - detail::density_matrix(sm, sys.th)) / (2.0 * h_mu);
  const ComplexMatrix rhs =
      detail::density_matrix_mu_derivative(s0, sys.th, apply_polynomial(a, sys.basis));
  return max_abs(lhs - rhs);
}

}  // namespace esm
