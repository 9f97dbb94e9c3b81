#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "esm/esm.hpp"

using esm::BasisSpec;
using esm::ComplexMatrix;
using esm::OperatorMatrix;
using esm::PolynomialObservable;

namespace {

BasisSpec basis(int n, int pad, double mass = 1.0, double wref = 1.0, double hbar = 1.0) {
  BasisSpec b;
  b.size = n;
  b.build_pad = pad;
  b.mass = mass;
  b.ref_frequency = wref;
  b.hbar = hbar;
  return b;
}

}  // namespace

TEST_CASE("position operator has the ladder matrix elements", "[fock]") {
  const OperatorMatrix q = esm::build_position(basis(3, 0));
  REQUIRE(q.dim() == 3);
  CHECK(q.is_hermitian());
  CHECK_THAT(q.mat()(0, 1).real(), Catch::Matchers::WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
  CHECK(q.mat()(0, 1) == q.mat()(1, 0));
  CHECK_THAT(q.mat()(1, 2).real(), Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK(q.mat()(0, 0) == esm::Complex(0.0, 0.0));
  CHECK(q.mat()(0, 2) == esm::Complex(0.0, 0.0));

  // Heavier particle: q_{01} = sqrt(hbar / (2 m w)) = sqrt(1/8) for m = 4.
  const OperatorMatrix q4 = esm::build_position(basis(2, 0, 4.0));
  CHECK_THAT(q4.mat()(0, 1).real(), Catch::Matchers::WithinAbs(std::sqrt(1.0 / 8.0), 1e-15));
}

TEST_CASE("momentum operator is anti-symmetric and purely imaginary", "[fock]") {
  const OperatorMatrix p = esm::build_momentum(basis(3, 0));
  CHECK(p.is_hermitian());
  CHECK_THAT(p.mat()(1, 0).imag(), Catch::Matchers::WithinAbs(1.0 / std::sqrt(2.0), 1e-15));
  CHECK_THAT(p.mat()(0, 1).imag(), Catch::Matchers::WithinAbs(-1.0 / std::sqrt(2.0), 1e-15));
  CHECK(p.mat()(0, 1).real() == 0.0);
  CHECK(p.mat()(0, 0) == esm::Complex(0.0, 0.0));
}

TEST_CASE("canonical commutator holds away from the truncation edge", "[fock]") {
  const BasisSpec b = basis(10, 0, 2.0, 1.5, 0.7);
  const OperatorMatrix q = esm::build_position(b);
  const OperatorMatrix p = esm::build_momentum(b);
  const OperatorMatrix c = esm::commutator(q, p);
  CHECK_FALSE(c.is_hermitian());
  // [q, p] = i hbar on rows/cols 0..N-2; the (N-1, N-1) corner is corrupted
  // by the missing state above the truncation.
  for (int i = 0; i + 1 < 10; ++i) {
    for (int j = 0; j + 1 < 10; ++j) {
      const esm::Complex expect = (i == j) ? esm::Complex(0.0, b.hbar) : esm::Complex(0.0, 0.0);
      CHECK(std::abs(c.mat()(i, j) - expect) < 1e-14);
    }
  }
  CHECK(std::abs(c.mat()(9, 9) - esm::Complex(0.0, b.hbar)) > 0.1);
}

TEST_CASE("apply_polynomial reproduces q, constants, and q^2/2", "[fock]") {
  const BasisSpec b = basis(6, 4);
  const ComplexMatrix qt = esm::build_position(b).mat().topLeftCorner(6, 6);
  CHECK(esm::max_abs(esm::apply_polynomial({0.0, 1.0}, b).mat() - qt) == 0.0);

  const OperatorMatrix c3 = esm::apply_polynomial({3.0}, b);
  CHECK(esm::max_abs(c3.mat() - 3.0 * ComplexMatrix::Identity(6, 6)) == 0.0);

  // q^2/2: diagonal (n + 1/2)/2, |n-m| = 2 couplings sqrt((n+1)(n+2))/4.
  const OperatorMatrix f = esm::apply_polynomial({0.0, 0.0, 0.5}, b);
  for (int n = 0; n < 6; ++n) {
    CHECK_THAT(f.mat()(n, n).real(), Catch::Matchers::WithinAbs((n + 0.5) / 2.0, 1e-14));
    if (n + 2 < 6) {
      const double expect = std::sqrt(double((n + 1) * (n + 2))) / 4.0;
      CHECK_THAT(f.mat()(n, n + 2).real(), Catch::Matchers::WithinAbs(expect, 1e-14));
    }
    if (n + 1 < 6) CHECK(f.mat()(n, n + 1) == esm::Complex(0.0, 0.0));
  }
}

TEST_CASE("retained elements are independent of the pad once sufficient", "[fock]") {
  const PolynomialObservable poly{0.0, 0.3, 0.0, 0.0, 0.02};  // degree 4
  const OperatorMatrix m4 = esm::apply_polynomial(poly, basis(12, 4));
  const OperatorMatrix m6 = esm::apply_polynomial(poly, basis(12, 6));
  const OperatorMatrix m9 = esm::apply_polynomial(poly, basis(12, 9));
  CHECK(esm::max_abs(m4.mat() - m6.mat()) < 1e-12);
  CHECK(esm::max_abs(m4.mat() - m9.mat()) < 1e-12);
}

TEST_CASE("apply_polynomial rejects a pad smaller than the degree", "[fock]") {
  CHECK_THROWS_AS(esm::apply_polynomial({0.0, 0.0, 0.0, 1.0}, basis(6, 2)), esm::PadTooSmall);
  CHECK_NOTHROW(esm::apply_polynomial({0.0, 0.0, 0.0, 1.0}, basis(6, 3)));
}

TEST_CASE("harmonic Hamiltonian is diagonal with spacing hbar w", "[fock]") {
  const BasisSpec b = basis(8, 2, 1.3, 0.9, 0.7);
  // Potential (m w^2 / 2) q^2 with w equal to the reference frequency makes
  // the Fock basis the exact eigenbasis.
  const double c2 = 0.5 * b.mass * b.ref_frequency * b.ref_frequency;
  const OperatorMatrix h = esm::build_hamiltonian(b, {0.0, 0.0, c2});
  for (int n = 0; n < 8; ++n) {
    const double expect = b.hbar * b.ref_frequency * (n + 0.5);
    CHECK_THAT(h.mat()(n, n).real(), Catch::Matchers::WithinAbs(expect, 1e-13));
    for (int m = 0; m < 8; ++m) {
      if (m != n) CHECK(std::abs(h.mat()(n, m)) < 1e-14);
    }
  }
}

TEST_CASE("constant potential shifts every eigenvalue", "[fock]") {
  const BasisSpec b = basis(20, 2);
  const esm::Spectrum s0 = esm::eigh(esm::build_hamiltonian(b, {0.0, 0.0, 0.5}));
  const esm::Spectrum s5 = esm::eigh(esm::build_hamiltonian(b, {5.0, 0.0, 0.5}));
  for (int n = 0; n < 20; ++n) {
    CHECK_THAT(s5.energies(n) - s0.energies(n), Catch::Matchers::WithinAbs(5.0, 1e-12));
  }
}

TEST_CASE("quartic potential couples across four quanta at most", "[fock]") {
  const OperatorMatrix h = esm::build_hamiltonian(basis(12, 4), {0.0, 0.0, 0.5, 0.1, 0.01});
  CHECK(std::abs(h.mat()(0, 4)) > 1e-4);
  CHECK(std::abs(h.mat()(0, 3)) > 1e-4);
  for (int m = 5; m < 12; ++m) CHECK(std::abs(h.mat()(0, m)) < 1e-14);
}

TEST_CASE("build_hamiltonian needs pad >= max(2, deg V)", "[fock]") {
  CHECK_THROWS_AS(esm::build_hamiltonian(basis(6, 1), {0.0, 0.0, 0.5}), esm::PadTooSmall);
  CHECK_THROWS_AS(esm::build_hamiltonian(basis(6, 3), {0.0, 0.0, 0.5, 0.1, 0.01}),
                  esm::PadTooSmall);
  CHECK_NOTHROW(esm::build_hamiltonian(basis(6, 4), {0.0, 0.0, 0.5, 0.1, 0.01}));
}

TEST_CASE("polynomials in q commute, and p generates translations of them", "[fock]") {
  // Work on a basis large enough that the leading 12x12 block of products of
  // 16x16 operators is free of truncation artifacts.
  const BasisSpec big = basis(16, 2);
  const ComplexMatrix q = esm::build_position(basis(18, 0)).mat();
  const OperatorMatrix q16 = esm::build_position(basis(16, 0));
  const OperatorMatrix p16 = esm::build_momentum(basis(16, 0));
  const OperatorMatrix q2 = esm::apply_polynomial({0.0, 0.0, 1.0}, big);
  const OperatorMatrix f = esm::apply_polynomial({0.0, 0.0, 0.5}, big);

  const ComplexMatrix comm_qq2 = esm::commutator(q16, q2).mat();
  CHECK(esm::max_abs(comm_qq2.topLeftCorner(12, 12)) < 1e-14);

  // (i/hbar) [p, q^2/2] = q.
  const ComplexMatrix lift =
      esm::Complex(0.0, 1.0) * esm::commutator(p16, f).mat();
  CHECK(esm::max_abs((lift - q.topLeftCorner(16, 16)).topLeftCorner(12, 12)) < 1e-13);
}

TEST_CASE("the identity commutes with everything exactly", "[fock]") {
  const BasisSpec b = basis(10, 4);
  const OperatorMatrix one = esm::apply_polynomial({1.0}, b);
  const OperatorMatrix h = esm::build_hamiltonian(b, {0.0, 0.0, 0.5, 0.1, 0.01});
  CHECK(esm::max_abs(esm::commutator(one, h).mat()) == 0.0);
}

TEST_CASE("commutator rejects mismatched dimensions", "[fock]") {
  CHECK_THROWS_AS(
      esm::commutator(esm::build_position(basis(4, 0)), esm::build_position(basis(5, 0))),
      esm::DimMismatch);
}

TEST_CASE("basis validation catches bad sizes and parameters", "[fock]") {
  CHECK_THROWS_AS(esm::build_position(basis(1, 0)), esm::ValidationError);
  CHECK_THROWS_AS(esm::build_position(basis(4, -1)), esm::ValidationError);
  CHECK_THROWS_AS(esm::build_position(basis(4, 0, -1.0)), esm::ValidationError);
  CHECK_THROWS_AS(esm::build_position(basis(4, 0, 1.0, 0.0)), esm::ValidationError);
  CHECK_THROWS_AS(esm::build_position(basis(4, 0, 1.0, 1.0, -2.0)), esm::ValidationError);
}
