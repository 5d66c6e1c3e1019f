// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file pml1_ewi.hpp
 * @brief First-order PML system (u, v = u_t, eta1, eta2) and its explicit
 *        exponential-wave-integrator Fourier pseudo-spectral stepper.
 *
 * The stepped system, for eps in (0, 1] (eps = 1 is the classical scaling):
 *
 *   eps^2 u_tt - u_xx + u/eps^2 + lambda |u|^2 u = sigma (eta2 + eps^2 alpha u - eps^2 u_t) + (sigma eta1)_x
 *   eta1_t + (sigma + alpha) eta1 + u_x = 0
 *   eta2_t + alpha eta2 + (eps^2 alpha^2 + eps^-2) u + lambda |u|^2 u = 0
 *
 * on a periodic domain. Each step is the Duhamel formula with trapezoidal quadrature:
 * u first, then eta1 and eta2 (which use u^{n+1}), and v last. The v update contains
 * -sigma eps^2 v^{n+1} through f^{n+1}; it is solved exactly node by node.
 */

#include <complex>
#include <limits>

#include "kgpml/absorption.hpp"
#include "kgpml/spectral.hpp"

namespace kgpml {

struct Pml1State {
  Field u, v, eta1, eta2;
  long time_index = 0;
  double alpha = 0.0;
};

/// Fresh state with zero auxiliary fields. Throws ContractViolation on shape mismatch.
Pml1State init_pml1(const Field& u0, const Field& v0, double alpha);

struct Pml1Params {
  double lambda = 1.0;
  ProfileSpec profile;  ///< must be polynomial
  double tau = 1e-3;
  double eps = 1.0;
  /// Max-norm beyond which a step counts as blown up (in addition to non-finite values).
  double blowup_amplitude = std::numeric_limits<double>::infinity();
};

class Pml1Stepper {
public:
  /// Throws ConfigError for a Bermudez profile, tau <= 0 or eps outside (0, 1].
  Pml1Stepper(const Grid1D& grid, const Pml1Params& params);

  const Grid1D& grid() const noexcept { return grid_; }
  const Pml1Params& params() const noexcept { return params_; }
  const AbsorptionProfile& profile() const noexcept { return profile_; }

  /// Advance one step in place. Throws BlowUpError on non-finite or runaway values.
  void advance(Pml1State& state) const;
  Pml1State step(Pml1State state) const {
    advance(state);
    return state;
  }

private:
  /// sigma (eta2 - eps^2 v + eps^2 alpha u) + (sigma eta1)_x - lambda |u|^2 u, without the v term.
  Field forcing_without_v(const Field& u, const Field& eta1, const Field& eta2, double alpha) const;

  Grid1D grid_;
  Pml1Params params_;
  AbsorptionProfile profile_;
  Transform fft_;
  FourierMultiplier dx_, cos_, sinc_, sin_times_;
};

/// g(s) = -sqrt(s^2 + 1)/(s + alpha), principal branch. Requires Re(s) > 0.
std::complex<double> damping_factor(std::complex<double> s, double alpha);

}  // namespace kgpml
