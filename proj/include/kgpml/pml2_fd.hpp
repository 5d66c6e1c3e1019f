// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file pml2_fd.hpp
 * @brief Second-order PML by complex coordinate stretching and the linearly implicit
 *        finite-difference Fourier pseudo-spectral (FD-FP) stepper.
 *
 * Stretching d/dx -> S d/dx with S = 1/(1 + R sigma) gives
 *
 *   eps^2 u_tt + A u + u/eps^2 + lambda |u|^2 u = 0,   A = -S d/dx (S d/dx)   (1D)
 *                                                     A = S_x + S_y          (2D)
 *
 * The three-level scheme averages the linear terms over t_{n-1}, t_{n+1}:
 *
 *   G w = (2 eps^2 / tau^2) u^n - lambda |u^n|^2 u^n,   u^{n+1} = w - u^{n-1},
 *   G   = (eps^2/tau^2 + 1/(2 eps^2)) I + A/2,
 *
 * solved by GMRES, left-preconditioned with the constant-coefficient inverse
 * P = (eps^2/tau^2 + 1/(2 eps^2) - Laplacian/2)^{-1}, which is diagonal in Fourier space.
 */

#include <limits>
#include <utility>
#include <vector>

#include "kgpml/absorption.hpp"
#include "kgpml/krylov.hpp"
#include "kgpml/spectral.hpp"

namespace kgpml {

struct Pml2State {
  Field u_prev, u_curr;
  long time_index = 1;  ///< index of u_curr
};

struct Pml2Params {
  double lambda = 1.0;
  ProfileSpec profile;  ///< profile.shift carries R
  double tau = 1e-3;
  double eps = 1.0;
  double omega = 0.0;  ///< angular velocity, enters only through the 2D initial data
  bool allow_complex_shift = false;  ///< stability demonstrations only
  bool use_preconditioner = true;
  /// Solve for d = w - 2 u^n instead of w. Same scheme; the right-hand side is O(1)
  /// instead of O(1/tau^2), so the solver tolerance does not pile up over many small steps.
  bool increment_form = true;
  KrylovSettings krylov;
  double blowup_amplitude = std::numeric_limits<double>::infinity();

  /// Throws ConfigError: tau <= 0, eps outside (0,1], lambda < 0, or R not real-positive
  /// while allow_complex_shift is off.
  void validate() const;
};

/// A = -S d/dx (S d/dx) in 1D, or the sum of the two axis operators in 2D.
class StretchedLaplacian {
public:
  StretchedLaplacian(const Grid1D& g, std::vector<Complex> stretch);
  StretchedLaplacian(const Grid2D& g, std::vector<Complex> stretch_x, std::vector<Complex> stretch_y);

  Shape shape() const noexcept { return shape_; }
  void apply(const Field& in, Field& out) const;
  Field operator()(const Field& in) const {
    Field out(shape_);
    apply(in, out);
    return out;
  }
  LinearOperator as_operator() const;

private:
  Shape shape_;
  Transform fft_;
  FourierMultiplier dx_, dy_;
  std::vector<Complex> sx_, sy_;
  // Scratch; an instance is confined to one thread.
  mutable std::vector<Complex> hat_, gx_, gy_;
};

class Pml2Solver {
public:
  Pml2Solver(const Grid1D& g, const Pml2Params& params);
  Pml2Solver(const Grid2D& g, const Pml2Params& params);

  /// Solver for the untruncated equation on a periodic grid (S = 1 everywhere; the
  /// profile in params is ignored).
  static Pml2Solver free_field(const Grid1D& g, const Pml2Params& params);
  static Pml2Solver free_field(const Grid2D& g, const Pml2Params& params);

  const Pml2Params& params() const noexcept { return params_; }
  Shape shape() const noexcept { return shape_; }
  const StretchedLaplacian& laplacian() const noexcept { return laplacian_; }
  /// Stretch samples along x (and y in 2D).
  const AbsorptionProfile& profile_x() const noexcept { return profile_x_; }

  /// u^1 = u0 + tau v0 - tau^2/2 [A u0 + u0 + lambda |u0|^2 u0]. Requires eps == 1.
  Pml2State first_step_classical(const Field& u0, const Field& v0) const;
  /// u^1 = u0 + tau v0 - tau/2 sin(tau/eps^2) [A u0 + lambda |u0|^2 u0] - tau/2 sin(tau/eps^4) u0.
  /// Requires eps < 1.
  Pml2State first_step_filtered(const Field& u0, const Field& v0) const;
  /// Classical start for eps == 1, filtered start otherwise.
  Pml2State first_step(const Field& u0, const Field& v0) const;

  /// One FD-FP step in place. Throws SolverDivergence if GMRES does not converge and
  /// BlowUpError on non-finite or runaway values.
  KrylovReport advance(Pml2State& state) const;

  /// The implicit operator G.
  LinearOperator system_operator() const;
  /// The Fourier preconditioner P.
  LinearOperator preconditioner() const;
  /// (2 eps^2/tau^2) u - lambda |u|^2 u
  Field step_rhs(const Field& u) const;

private:
  Pml2Solver(Shape shape, const Pml2Params& params, AbsorptionProfile px, AbsorptionProfile py,
             StretchedLaplacian lap, FourierMultiplier neg_laplacian);

  Shape shape_;
  Pml2Params params_;
  AbsorptionProfile profile_x_, profile_y_;
  StretchedLaplacian laplacian_;
  Transform fft_;
  FourierMultiplier precond_symbol_;
  double diag_;  ///< eps^2/tau^2 + 1/(2 eps^2)
};

/// u0 = psi0, v0 = omega grad(psi0) . (y, -x) + psi1, gradients taken spectrally.
std::pair<Field, Field> build_rotating_initial_data(const Grid2D& g, const Field& psi0, const Field& psi1,
                                                    double omega);

struct StabilitySample {
  double t;
  double max_norm;
};

/// Runs FD-FP (complex R allowed) to t_final and records ||u||_inf each step. Once the run
/// blows up (or GMRES gives out) the remaining samples hold `cap`.
std::vector<StabilitySample> stability_probe(const Grid1D& g, Pml2Params params, const Field& u0, const Field& v0,
                                             double t_final, double cap = 1e8);

}  // namespace kgpml
