#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "esm/errors.hpp"
#include "esm/matrix.hpp"

namespace esm {

/// Time series of a (generally complex) correlation estimate, labelled with
/// the estimator that produced it and a parameter snapshot.
struct CorrelationSeries {
  std::vector<double> times;
  std::vector<Complex> values;
  std::string label;
  std::string params;

  void validate() const {
    if (times.size() != values.size()) {
      throw ValidationError("series: times and values lengths differ");
    }
    for (std::size_t k = 1; k < times.size(); ++k) {
      if (!(times[k] > times[k - 1])) {
        throw ValidationError("series: times must be strictly increasing");
      }
    }
  }

  std::size_t size() const noexcept { return times.size(); }

  double max_abs() const {
    double m = 0.0;
    for (const Complex& v : values) m = std::max(m, std::abs(v));
    return m;
  }

  double max_abs_imag() const {
    double m = 0.0;
    for (const Complex& v : values) m = std::max(m, std::abs(v.imag()));
    return m;
  }

  std::vector<double> real_values() const {
    std::vector<double> r(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) r[k] = values[k].real();
    return r;
  }
};

/// Uniform grid t_k = k * t_max / (n_steps - 1), k = 0 .. n_steps-1.
inline std::vector<double> uniform_grid(double t_max, int n_steps) {
  if (n_steps < 2) throw ValidationError("time: n_steps >= 2");
  if (!(t_max > 0.0)) throw ValidationError("time: t_max > 0");
  std::vector<double> t(static_cast<std::size_t>(n_steps));
  for (int k = 0; k < n_steps; ++k) {
    t[static_cast<std::size_t>(k)] = static_cast<double>(k) * t_max / static_cast<double>(n_steps - 1);
  }
  return t;
}

}  // namespace esm
