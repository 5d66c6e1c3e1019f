// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file reference.hpp
 * @brief Enlarged-domain reference solutions of the untruncated equation, the
 *        relative PML error metrics and the truncated energy H_I.
 *
 * The reference is the free-field exponential wave integrator (no layer) on a
 * periodic domain several times wider than the physical window. Its mesh equals the
 * PML mesh and its half-width is nudged so that every PML node is also a reference
 * node; snapshots are stored restricted to the PML grid.
 */

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kgpml/initial_data.hpp"
#include "kgpml/krylov.hpp"
#include "kgpml/spectral.hpp"

namespace kgpml {

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;
};
using ErrorSeries = TimeSeries;
using EnergySeries = TimeSeries;

/// Exponential wave integrator for eps^2 u_tt - Laplacian u + u/eps^2 + lambda |u|^2 u = 0
/// on a periodic 1D or 2D grid.
class FreeFieldEwi {
public:
  FreeFieldEwi(const Grid1D& g, double lambda, double eps, double tau);
  FreeFieldEwi(const Grid2D& g, double lambda, double eps, double tau);

  void advance(Field& u, Field& v) const;

private:
  FreeFieldEwi(Shape shape, const FourierMultiplier& bracket, double lambda, double eps, double tau);
  Field forcing(const Field& u) const;

  Shape shape_;
  double lambda_, eps_, tau_;
  Transform fft_;
  FourierMultiplier cos_, sinc_, sin_times_;
};

using AnyGrid = std::variant<Grid1D, Grid2D>;

/// Time integrator of the reference. `fdfp` runs the free-field FD-FP scheme, which
/// shares its temporal error with PML-II runs at the same tau.
enum class ReferenceScheme { ewi, fdfp };

struct ReferenceProblem {
  explicit ReferenceProblem(AnyGrid target_grid) : target(std::move(target_grid)) {}

  AnyGrid target;  ///< PML grid the snapshots are restricted to
  double physical_half_width = 4.0;  ///< L; H_I integrates over (-L, L)^d
  InitialData data;
  double lambda = 1.0;
  double eps = 1.0;
  double tau = 1e-3;
  double t_final = 4.0;
  long snapshot_stride = 1;
  ReferenceScheme scheme = ReferenceScheme::ewi;
  KrylovSettings krylov;  ///< fdfp only
  /// Snapshots whose amplitude in the outer tenth of the enlarged domain exceeds this
  /// fraction of the initial max-norm raise a warning.
  double contamination_threshold = 1e-6;
};

struct ReferenceRun {
  AnyGrid enlarged;
  std::vector<double> times;
  std::vector<Field> window;       ///< solution restricted to the target grid
  EnergySeries energy;             ///< H_I at each snapshot
  std::vector<Complex> origin_record;  ///< u at the node closest to the origin, every step
  double boundary_amplitude = 0.0;     ///< max over snapshots of |u| in the outer band
  std::vector<std::string> warnings;
};

/// Enlarged grid with the same mesh as target whose nodes include all target nodes.
Grid1D enlarged_grid(const Grid1D& target, double physical_half_width, double factor);

/// Offset of target node 0 inside the enlarged grid.
std::size_t enlarged_offset(const Grid1D& target, const Grid1D& enlarged);

/// Solves the untruncated problem on a domain `enlargement_factor` times wider than (-L, L).
/// Throws ConfigError if enlargement_factor < 2.
ReferenceRun reference_solve(const ReferenceProblem& problem, double enlargement_factor = 4.0);

/// Values of a field on `enlarged` at the nodes of `target`.
Field restrict_to(const Field& f, const Grid1D& enlarged, const Grid1D& target);
Field restrict_to(const Field& f, const Grid2D& enlarged, const Grid2D& target);

/// ||u_ref - u_num||_{L2(I)} / ||u_ref||_{L2(I)} on nodes with |x| < L (rectangle rule).
/// nullopt if the reference vanishes on the window.
std::optional<double> rel_l2_error(const Grid1D& g, const Field& u_num, const Field& u_ref, double L);
std::optional<double> rel_l2_error(const Grid2D& g, const Field& u_num, const Field& u_ref, double L);

/// Same with max norms.
std::optional<double> rel_linf_error(const Grid1D& g, const Field& u_num, const Field& u_ref, double L);
std::optional<double> rel_linf_error(const Grid2D& g, const Field& u_num, const Field& u_ref, double L);

/// H_I = int_I |u_t|^2 + |grad u|^2 + |u|^2 + lambda/2 |u|^4, gradients taken spectrally on g.
/// Classical weights are used for every scaling.
double energy_HI(const Grid1D& g, const Field& u, const Field& u_dot, double lambda, double L);
double energy_HI(const Grid2D& g, const Field& u, const Field& u_dot, double lambda, double L);

/// k = -sqrt(s^2 + 1), principal branch. Requires Re(s) >= 0.
std::complex<double> dispersion_root(std::complex<double> s);

/// sqrt(k^-2 + eps^2) / eps^2. Throws ConfigError for k == 0.
double phase_velocity_eps(double k, double eps);

/// x = A(t) x_tilde with A(t) = [[cos wt, sin wt], [-sin wt, cos wt]].
std::array<double, 2> rotate_to_lab_frame(std::array<double, 2> x_tilde, double t, double omega);

}  // namespace kgpml
