#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "esm/esm.hpp"

using esm::BasisSpec;
using esm::ComplexMatrix;
using esm::OperatorMatrix;
using esm::Spectrum;
using esm::ThermalParams;

namespace {

BasisSpec basis(int n, int pad = 8) {
  BasisSpec b;
  b.size = n;
  b.build_pad = pad;
  return b;
}

const esm::PolynomialObservable kHarmonic{0.0, 0.0, 0.5};
const esm::PolynomialObservable kAnharmonic{0.0, 0.0, 0.5, 0.1, 0.01};

}  // namespace

TEST_CASE("harmonic position autocorrelation equals cos(wt)/(beta m w^2)", "[kubo]") {
  const BasisSpec b = basis(60);
  const Spectrum s = esm::eigh(esm::build_hamiltonian(b, kHarmonic));
  const OperatorMatrix q = esm::apply_polynomial({0.0, 1.0}, b);
  const ThermalParams th;  // beta = 1

  const std::vector<double> times = esm::uniform_grid(10.0, 501);
  const esm::CorrelationSeries c = esm::kubo_correlator(s, th, q, q, times, b.hbar);
  REQUIRE(c.size() == 501);

  esm::HarmonicParams hp;
  double err = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    err = std::max(err, std::abs(c.values[k] - esm::Complex(esm::oracle_kubo_qq(hp, times[k]))));
  }
  CHECK(err < 1e-8);
  CHECK_THAT(c.values.front().real(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(c.max_abs_imag() < 1e-10 * c.max_abs());
}

TEST_CASE("correlator endpoints at t = 0 and t = pi", "[kubo]") {
  const BasisSpec b = basis(60);
  const Spectrum s = esm::eigh(esm::build_hamiltonian(b, kHarmonic));
  const OperatorMatrix q = esm::apply_polynomial({0.0, 1.0}, b);

  ThermalParams th2;
  th2.beta = 2.0;
  const std::vector<double> times{0.0, M_PI};
  const esm::CorrelationSeries c1 = esm::kubo_correlator(s, ThermalParams{}, q, q, times, 1.0);
  CHECK_THAT(c1.values[0].real(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(c1.values[1].real(), Catch::Matchers::WithinAbs(-1.0, 1e-10));
  const esm::CorrelationSeries c2 = esm::kubo_correlator(s, th2, q, q, times, 1.0);
  CHECK_THAT(c2.values[0].real(), Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("identity observables give a constant correlator", "[kubo]") {
  const BasisSpec b = basis(40);
  const Spectrum s = esm::eigh(esm::build_hamiltonian(b, kAnharmonic));
  const OperatorMatrix one = esm::apply_polynomial({1.0}, b);
  const esm::CorrelationSeries c =
      esm::kubo_correlator(s, ThermalParams{}, one, one, esm::uniform_grid(5.0, 11), 1.0);
  for (const esm::Complex& v : c.values) {
    CHECK_THAT(v.real(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK(std::abs(v.imag()) < 1e-14);
  }
}

TEST_CASE("autocorrelations are real and even in time", "[kubo]") {
  const BasisSpec b = basis(60);
  const Spectrum s = esm::eigh(esm::build_hamiltonian(b, kAnharmonic));
  const ThermalParams th;
  for (const esm::PolynomialObservable& a :
       {esm::PolynomialObservable{0.0, 1.0}, esm::PolynomialObservable{0.0, 0.0, 1.0}}) {
    const OperatorMatrix am = esm::apply_polynomial(a, b);
    const std::vector<double> ts{-3.0, -1.0, 0.5, 1.0, 3.0};
    const esm::CorrelationSeries c = esm::kubo_correlator(s, th, am, am, ts, 1.0);
    CHECK(c.max_abs_imag() < 1e-10 * c.max_abs());
    // Stationarity: C(t) = C(-t) for an autocorrelation.
    CHECK(std::abs(c.values[0] - c.values[4]) < 1e-12 * c.max_abs());
    CHECK(std::abs(c.values[1] - c.values[3]) < 1e-12 * c.max_abs());
  }
}

TEST_CASE("t = 0 reduces to the equal-time kubo pairing", "[kubo]") {
  const BasisSpec b = basis(50);
  const Spectrum s = esm::eigh(esm::build_hamiltonian(b, kAnharmonic));
  const ThermalParams th;
  const OperatorMatrix a = esm::apply_polynomial({0.0, 1.0}, b);
  const OperatorMatrix b2 = esm::apply_polynomial({0.0, 0.0, 1.0}, b);
  const esm::CorrelationSeries c = esm::kubo_correlator(s, th, a, b2, {0.0}, 1.0);
  const esm::Complex pair = esm::kubo_pairing(esm::kubo_weight_matrix(s, th),
                                              s.to_eigenbasis(a.mat()), s.to_eigenbasis(b2.mat()));
  CHECK(std::abs(c.values[0] - pair) < 1e-14 * std::max(1.0, std::abs(pair)));
}

TEST_CASE("quartic-squared correlator starts at its frozen equal-time value", "[kubo]") {
  const BasisSpec b = basis(80);
  const Spectrum s = esm::eigh(esm::build_hamiltonian(b, kAnharmonic));
  const OperatorMatrix q2 = esm::apply_polynomial({0.0, 0.0, 1.0}, b);
  const esm::CorrelationSeries c =
      esm::kubo_correlator(s, ThermalParams{}, q2, q2, {0.0}, 1.0);
  CHECK_THAT(c.values[0].real(), Catch::Matchers::WithinRel(7.0306689002367815, 1e-10));
}

TEST_CASE("correlator inputs are validated", "[kubo]") {
  const BasisSpec b = basis(20);
  const Spectrum s = esm::eigh(esm::build_hamiltonian(b, kHarmonic));
  ComplexMatrix nh = ComplexMatrix::Zero(20, 20);
  nh(0, 1) = 1.0;
  const OperatorMatrix q = esm::apply_polynomial({0.0, 1.0}, b);
  CHECK_THROWS_AS(
      esm::kubo_correlator(s, ThermalParams{}, OperatorMatrix::general(nh), q, {0.0}, 1.0),
      esm::NotHermitian);
  CHECK_THROWS_AS(esm::kubo_correlator(s, ThermalParams{}, q,
                                       esm::apply_polynomial({0.0, 1.0}, basis(10)), {0.0}, 1.0),
                  esm::DimMismatch);
}
