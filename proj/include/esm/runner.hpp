#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "esm/config.hpp"
#include "esm/csv.hpp"
#include "esm/harmonic.hpp"
#include "esm/kubo.hpp"
#include "esm/source.hpp"

namespace esm {

namespace detail {

inline void emit_preamble(CsvBuilder& csv, const RunConfig& cfg, const std::string& subcommand) {
  csv.comment("kubo-esm " + subcommand);
  for (const std::string& line : cfg.snapshot()) csv.comment(line);
}

inline bool is_position_poly(const PolynomialObservable& p) {
  return p == PolynomialObservable{0.0, 1.0};
}

/// Oscillator frequency implied by a pure quadratic potential c2*q^2:
/// omega = sqrt(2 c2 / m).
inline double harmonic_frequency(const SystemSpec& sys) {
  return std::sqrt(2.0 * sys.potential.coeff(2) / sys.basis.mass);
}

inline HarmonicParams harmonic_params(const SystemSpec& sys) {
  return HarmonicParams{sys.basis.mass, harmonic_frequency(sys), sys.th.beta, sys.basis.hbar};
}

}  // namespace detail

/// Direct exact correlator of the configured observable pair; columns
/// t, c_exact_re, c_exact_im.
inline std::string run_exact(const RunConfig& cfg) {
  const std::vector<double> times = cfg.times();
  const Spectrum spec0 = eigh(build_hamiltonian(cfg.sys.basis, cfg.sys.potential));
  const OperatorMatrix a = apply_polynomial(cfg.a, cfg.sys.basis);
  const OperatorMatrix b = apply_polynomial(cfg.b, cfg.sys.basis);
  const CorrelationSeries c =
      kubo_correlator(spec0, cfg.sys.th, a, b, times, cfg.sys.basis.hbar);

  CsvBuilder csv;
  detail::emit_preamble(csv, cfg, "exact");
  csv.header({"t", "c_exact_re", "c_exact_im"});
  const int p = cfg.output.precision;
  for (std::size_t k = 0; k < times.size(); ++k) {
    csv.row({format_float(times[k], p), format_float(c.values[k].real(), p),
             format_float(c.values[k].imag(), p)});
  }
  return csv.str();
}

/// External-source pipeline with the exact reconstruction, term by term;
/// columns t, c_kv, c_ad, d_expect, c_exact_formula, c_exact_direct,
/// err_kv, err_formula.
inline std::string run_esm(const RunConfig& cfg) {
  const std::vector<double> times = cfg.times();
  const ESMReport rep = exact_formula_correlator(cfg.sys, cfg.a, cfg.b, cfg.stencil, times);

  CsvBuilder csv;
  detail::emit_preamble(csv, cfg, "esm");
  {
    std::istringstream diag(rep.diagnostics);
    std::string line;
    while (std::getline(diag, line)) csv.comment(line);
  }
  csv.header({"t", "c_kv", "c_ad", "d_expect", "c_exact_formula", "c_exact_direct", "err_kv",
              "err_formula"});
  const int p = cfg.output.precision;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Complex kv = rep.kv_series.values[k];
    const Complex direct = rep.exact_direct_series.values[k];
    const Complex formula = rep.exact_formula_series.values[k];
    csv.row({format_float(times[k], p), format_float(kv.real(), p),
             format_float(rep.c_ad_series.values[k].real(), p),
             format_float(rep.d_expect_series[k], p), format_float(formula.real(), p),
             format_float(direct.real(), p), format_float(std::abs(kv - direct), p),
             format_float(std::abs(formula - direct), p)});
  }
  return csv.str();
}

/// Closed-form oscillator curves for the configured (m, omega, beta, hbar);
/// requires a pure quadratic potential.  The ratio column is blanked (nan)
/// where the exact correlator crosses zero.
inline std::string run_oracle(const RunConfig& cfg) {
  if (!cfg.sys.potential.pure_quadratic()) {
    throw ValidationError("oracle: closed forms require a pure quadratic potential c2*q^2");
  }
  const HarmonicParams hp = detail::harmonic_params(cfg.sys);
  const std::vector<double> times = cfg.times();

  CsvBuilder csv;
  detail::emit_preamble(csv, cfg, "oracle");
  csv.comment("omega = " + format_float(hp.omega));
  csv.header({"t", "c_kubo", "c_kv", "envelope", "phase", "c_ad", "mixed", "ratio"});
  const int p = cfg.output.precision;
  for (double t : times) {
    const KvOracle kv = oracle_kv(hp, t);
    const double cosine = std::cos(hp.omega * t);
    const std::string ratio =
        std::abs(cosine) < 1e-6 ? "nan" : format_float(oracle_ratio(hp.omega * t), p);
    csv.row({format_float(t, p), format_float(oracle_kubo_qq(hp, t), p),
             format_float(kv.value, p), format_float(kv.envelope, p),
             format_float(kv.phase, p), format_float(oracle_ckad(hp, t), p),
             format_float(oracle_mixed_derivative(hp, t), p), ratio});
  }
  return csv.str();
}

/// Convergence scan: one approximate-correlator run per axis value, compared
/// against the closed-form oscillator oracle when available (pure quadratic
/// potential, position autocorrelation) and against the base configuration's
/// own run otherwise.  Columns value, max_abs_err, wall_ms.
inline std::string run_scan(const ScanConfig& scan) {
  scan.validate();
  const std::vector<double> times = scan.base.times();
  const bool use_oracle = scan.base.sys.potential.pure_quadratic() &&
                          detail::is_position_poly(scan.base.a) &&
                          detail::is_position_poly(scan.base.b);

  std::vector<Complex> reference;
  if (!use_oracle) {
    reference =
        kv_correlator(scan.base.sys, scan.base.a, scan.base.b, scan.base.stencil, times).values;
  }

  CsvBuilder csv;
  detail::emit_preamble(csv, scan.base, "scan");
  csv.comment("scan.axis = " + scan_axis_name(scan.axis));
  {
    std::string vals;
    for (std::size_t i = 0; i < scan.values.size(); ++i) {
      if (i) vals += ' ';
      vals += format_float(scan.values[i]);
    }
    csv.comment("scan.values = " + vals);
  }
  csv.header({"value", "max_abs_err", "wall_ms"});

  const int p = scan.base.output.precision;
  for (double v : scan.values) {
    RunConfig cfg = scan.base;
    switch (scan.axis) {
      case ScanAxis::basis_n: cfg.sys.basis.size = static_cast<int>(v); break;
      case ScanAxis::h_mu: cfg.stencil.h_mu = v; break;
      case ScanAxis::h_nu: cfg.stencil.h_nu = v; break;
      case ScanAxis::beta: cfg.sys.th.beta = v; break;
    }
    cfg.sys.validate();

    const auto t0 = std::chrono::steady_clock::now();
    const CorrelationSeries kv = kv_correlator(cfg.sys, cfg.a, cfg.b, cfg.stencil, times);
    const auto t1 = std::chrono::steady_clock::now();
    const double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    double err = 0.0;
    if (use_oracle) {
      const HarmonicParams hp = detail::harmonic_params(cfg.sys);
      for (std::size_t k = 0; k < times.size(); ++k) {
        err = std::max(err, std::abs(kv.values[k] - oracle_kv(hp, times[k]).value));
      }
    } else {
      for (std::size_t k = 0; k < times.size(); ++k) {
        err = std::max(err, std::abs(kv.values[k] - reference[k]));
      }
    }
    csv.row({format_float(v, p), format_float(err, p), format_float(wall_ms, 6)});
  }
  return csv.str();
}

struct VerifyCheck {
  std::string name;
  bool skipped = false;
  bool passed = false;
  double tolerance = 0.0;
  double observed = 0.0;
  std::string note;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_passed = true;

  std::string text() const {
    std::ostringstream os;
    auto pad = [](std::string s, std::size_t w) {
      if (s.size() < w) s.append(w - s.size(), ' ');
      return s;
    };
    os << pad("check", 26) << pad("status", 9) << pad("tolerance", 12)
       << pad("observed", 25) << "note\n";
    for (const VerifyCheck& c : checks) {
      const std::string status = c.skipped ? "skipped" : (c.passed ? "pass" : "FAIL");
      const std::string obs = c.skipped ? "-" : format_float(c.observed);
      os << pad(c.name, 26) << pad(status, 9) << pad(format_float(c.tolerance, 3), 12)
         << pad(obs, 25) << c.note << '\n';
    }
    os << "overall: " << (all_passed ? "PASS" : "FAIL") << '\n';
    return os.str();
  }
};

/// Invariant suite over the configured system: realness, gauge freedom of
/// the source antiderivative, short-time exactness, secular cancellation,
/// finite-difference checks of the source derivatives of Z, the Boltzmann
/// matrix, and the density matrix, the operator identity behind the method,
/// the vanishing of the dropped operator at t = 0, and (for the harmonic
/// position autocorrelation) temperature independence of the ratio.
inline VerifyReport run_verify(const RunConfig& cfg) {
  VerifyReport rep;
  const SystemSpec& sys = cfg.sys;
  const std::vector<double> times = cfg.times();
  const bool harmonic = sys.potential.pure_quadratic();
  const bool q_autocorr =
      detail::is_position_poly(cfg.a) && detail::is_position_poly(cfg.b);

  auto add = [&rep](VerifyCheck c) {
    if (!c.skipped && !c.passed) rep.all_passed = false;
    rep.checks.push_back(std::move(c));
  };
  auto make = [](std::string name, double tol, double obs, std::string note) {
    VerifyCheck c;
    c.name = std::move(name);
    c.tolerance = tol;
    c.observed = obs;
    c.passed = obs <= tol;
    c.note = std::move(note);
    return c;
  };

  const Spectrum spec0 = eigh(build_hamiltonian(sys.basis, sys.potential));
  const OperatorMatrix a_mat = apply_polynomial(cfg.a, sys.basis);
  const OperatorMatrix b_mat = apply_polynomial(cfg.b, sys.basis);

  {
    const CorrelationSeries c =
        kubo_correlator(spec0, sys.th, a_mat, b_mat, times, sys.basis.hbar);
    const double scale = std::max(c.max_abs(), 1e-300);
    add(make("realness", 1e-10, c.max_abs_imag() / scale, "max |Im C| / max |C|"));
  }

  {
    const CorrelationSeries base = kv_correlator(sys, cfg.a, cfg.b, cfg.stencil, times);
    const double scale = std::max(1.0, base.max_abs());
    const PolynomialObservable f0 = cfg.b.antiderivative();
    double worst = 0.0;
    for (double shift : {-1.0, 1.0, 10.0}) {
      const PolynomialObservable fc = f0.plus_constant(shift);
      const CorrelationSeries shifted =
          kv_correlator(sys, cfg.a, cfg.b, cfg.stencil, times, &fc);
      for (std::size_t k = 0; k < times.size(); ++k) {
        worst = std::max(worst, std::abs(shifted.values[k] - base.values[k]));
      }
    }
    add(make("gauge_invariance", 1e-10, worst / scale,
             "source antiderivative shifted by -1, 1, 10"));
  }

  {
    const std::vector<double> grid = harmonic ? uniform_grid(20.0, 501) : times;
    const double tol = harmonic ? 1e-6 : 1e-5;
    const ESMReport er = exact_formula_correlator(sys, cfg.a, cfg.b, cfg.stencil, grid);
    add(make("short_time", 1e-4,
             std::abs(er.kv_series.values[0] - er.exact_direct_series.values[0]),
             "approximate vs exact at t = 0"));
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      worst = std::max(worst, std::abs(er.exact_formula_series.values[k] -
                                       er.exact_direct_series.values[k]));
    }
    add(make("secular_cancellation", tol, worst,
             harmonic ? "reconstruction vs direct, t in [0, 20]"
                      : "reconstruction vs direct on the configured grid"));
  }

  add(make("boltzmann_derivative", 1e-6, boltzmann_derivative_check(sys, cfg.a, 1e-4),
           "matrix FD at h = 1e-4"));
  add(make("partition_derivative", 1e-6, partition_derivative_check(sys, cfg.a, 1e-4),
           "scalar FD at h = 1e-4"));
  add(make("density_derivative", 1e-6, density_derivative_check(sys, cfg.a, 1e-4),
           "matrix FD at h = 1e-4"));

  {
    const double tol = harmonic ? 1e-6 : 1e-5;
    double worst = operator_identity_check(sys, cfg.b, 1.0, 1e-4);
    std::string note = "h_nu = 1e-4, t = 1";
    if (!harmonic) {
      worst = std::max(worst, operator_identity_check(sys, cfg.b, 0.5, 1e-4));
      note = "h_nu = 1e-4, t in {0.5, 1}";
    }
    add(make("operator_identity", tol, worst, note));
  }

  {
    const OperatorMatrix f_mat = apply_polynomial(cfg.b.antiderivative(), sys.basis);
    const OperatorMatrix d0 = d_operator(spec0, f_mat, sys.potential, 0.0, sys);
    add(make("d_zero", 1e-12, max_abs(d0.mat()), "dropped operator at t = 0"));
  }

  if (harmonic && q_autocorr) {
    SourceStencil st;
    st.h_mu = 1e-3;
    st.h_nu = 2e-3;
    st.scheme = Scheme::central2_richardson;
    st.nu_mode = NuMode::semianalytic_mu;
    const double omega = detail::harmonic_frequency(sys);

    std::vector<std::vector<double>> ratios;
    for (double beta : {0.5, 1.0, 2.0}) {
      SystemSpec sys_b = sys;
      sys_b.th.beta = beta;
      const CorrelationSeries kv = kv_correlator(sys_b, cfg.a, cfg.b, st, times);
      const CorrelationSeries exact =
          kubo_correlator(spec0, sys_b.th, a_mat, b_mat, times, sys.basis.hbar);
      std::vector<double> r(times.size(), 0.0);
      for (std::size_t k = 0; k < times.size(); ++k) {
        r[k] = kv.values[k].real() / exact.values[k].real();
      }
      ratios.push_back(std::move(r));
    }
    double spread = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (std::abs(std::cos(omega * times[k])) < 1e-6) continue;
      double lo = ratios[0][k], hi = ratios[0][k];
      for (const auto& r : ratios) {
        lo = std::min(lo, r[k]);
        hi = std::max(hi, r[k]);
      }
      spread = std::max(spread, hi - lo);
    }
    add(make("temperature_independence", 1e-8, spread,
             "ratio spread across beta in {0.5, 1, 2}"));
  } else {
    VerifyCheck c;
    c.name = "temperature_independence";
    c.skipped = true;
    c.tolerance = 1e-8;
    c.note = "harmonic position autocorrelation only";
    add(std::move(c));
  }

  return rep;
}

}  // namespace esm
