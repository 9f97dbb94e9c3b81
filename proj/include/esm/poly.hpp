#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "esm/errors.hpp"

namespace esm {

/// Real polynomial in the position coordinate with coefficients stored in
/// ascending order: p(q) = c0 + c1 q + c2 q^2 + ...  Trailing zeros are
/// permitted; the degree is the index of the last nonzero coefficient.
class PolynomialObservable {
 public:
  PolynomialObservable() = default;
  PolynomialObservable(std::initializer_list<double> c) : c_(c) { check_finite(); }
  explicit PolynomialObservable(std::vector<double> c) : c_(std::move(c)) { check_finite(); }

  const std::vector<double>& coeffs() const noexcept { return c_; }

  /// Coefficient of q^k; zero beyond the stored length.
  double coeff(std::size_t k) const noexcept { return k < c_.size() ? c_[k] : 0.0; }

  /// Index of the last nonzero coefficient; -1 for the zero polynomial.
  int degree() const noexcept {
    for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k) {
      if (c_[static_cast<std::size_t>(k)] != 0.0) return k;
    }
    return -1;
  }

  /// Horner evaluation at a scalar argument.
  double operator()(double x) const noexcept {
    double v = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) v = v * x + c_[k];
    return v;
  }

  PolynomialObservable derivative() const {
    std::vector<double> d;
    if (c_.size() > 1) {
      d.reserve(c_.size() - 1);
      for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(static_cast<double>(k) * c_[k]);
    }
    return PolynomialObservable(std::move(d));
  }

  /// Antiderivative with the constant of integration fixed to zero.
  PolynomialObservable antiderivative() const {
    std::vector<double> f(c_.size() + 1, 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k) f[k + 1] = c_[k] / static_cast<double>(k + 1);
    return PolynomialObservable(std::move(f));
  }

  /// this + scale * other, coefficient-wise.
  PolynomialObservable plus(const PolynomialObservable& other, double scale = 1.0) const {
    std::vector<double> s(std::max(c_.size(), other.c_.size()), 0.0);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = coeff(k) + scale * other.coeff(k);
    return PolynomialObservable(std::move(s));
  }

  /// this + c (shifts only the constant term).
  PolynomialObservable plus_constant(double c) const {
    std::vector<double> s = c_;
    if (s.empty()) s.push_back(0.0);
    s[0] += c;
    return PolynomialObservable(std::move(s));
  }

  /// True when the polynomial is exactly c2 q^2 with c2 > 0.
  bool pure_quadratic() const noexcept {
    return degree() == 2 && coeff(0) == 0.0 && coeff(1) == 0.0 && coeff(2) > 0.0;
  }

  /// True when p(q) -> -inf for q -> +inf or q -> -inf: odd leading degree, or
  /// an even leading degree with a negative coefficient. Constants and the
  /// zero polynomial count as bounded.
  bool unbounded_below() const noexcept {
    const int d = degree();
    if (d <= 0) return false;
    return d % 2 == 1 || c_[static_cast<std::size_t>(d)] < 0.0;
  }

  /// Value equality up to trailing zeros.
  friend bool operator==(const PolynomialObservable& a, const PolynomialObservable& b) noexcept {
    const std::size_t n = std::max(a.c_.size(), b.c_.size());
    for (std::size_t k = 0; k < n; ++k) {
      if (a.coeff(k) != b.coeff(k)) return false;
    }
    return true;
  }

 private:
  void check_finite() const {
    for (double v : c_) {
      if (!std::isfinite(v)) throw ValidationError("polynomial coefficients must be finite");
    }
  }

  std::vector<double> c_;
};

}  // namespace esm
