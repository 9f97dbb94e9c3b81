#pragma once

#include "esm/errors.hpp"

namespace esm {

/// Truncated Fock basis of a reference harmonic oscillator. `size` states are
/// retained; operator products are formed on `size + build_pad` states and
/// truncated afterwards, which keeps the retained block of q^k exact for
/// k <= build_pad. The reference frequency only fixes the basis; it need not
/// match any physical frequency of the simulated system.
struct BasisSpec {
  int size = 60;
  int build_pad = 8;
  double mass = 1.0;
  double ref_frequency = 1.0;
  double hbar = 1.0;

  int padded_size() const noexcept { return size + build_pad; }

  void validate() const {
    if (size < 2) throw ValidationError("basis: size >= 2");
    if (build_pad < 0) throw ValidationError("basis: build_pad >= 0");
    if (!(mass > 0.0)) throw ValidationError("basis: mass > 0");
    if (!(ref_frequency > 0.0)) throw ValidationError("basis: ref_frequency > 0");
    if (!(hbar > 0.0)) throw ValidationError("basis: hbar > 0");
  }
};

}  // namespace esm
