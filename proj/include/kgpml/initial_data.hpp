// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <utility>

#include "kgpml/spectral.hpp"

namespace kgpml {

/// Initial data as analytic functions, so it can be sampled on any grid
/// (the truncated PML domain and the enlarged reference domain alike).
struct InitialData {
  int dimension = 1;
  std::function<Complex(double)> u0, v0;             ///< 1D
  std::function<Complex(double, double)> psi0, psi1;  ///< 2D, in the rotating frame
  double omega = 0.0;                                 ///< 2D angular velocity

  /// (u0, v0) sampled on g.
  std::pair<Field, Field> sample(const Grid1D& g) const;
  /// (u0, v0) with v0 = omega grad(psi0).(y, -x) + psi1 computed spectrally on g.
  std::pair<Field, Field> sample(const Grid2D& g) const;
};

/// u0 = 5 exp(-x^2), v0 = sech(x^2)/2.
InitialData gaussian_sech();

/// Four unit-charge vortices at (+-c0, 0), (0, +-c0) under a Gaussian envelope;
/// psi0 = psi1.
InitialData vortex4(double c0, double omega);

}  // namespace kgpml
