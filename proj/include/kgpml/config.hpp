// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file config.hpp
 * @brief Solver configuration and its text format.
 *
 * The format is line oriented:
 *
 *     # comment
 *     formulation = pml2
 *     profile     = bermudez
 *     h           = 1/64        # fractions are accepted for any number
 *
 *     [sweep]
 *     sigma0 = 2, 4, 6, 8
 *     delta  = 3/8, 1/2
 *
 * Keys before the first section header set single values; keys in the
 * `[sweep]` section list values for a cartesian parameter sweep. See the README
 * for the full key reference.
 */

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgpml/absorption.hpp"
#include "kgpml/initial_data.hpp"
#include "kgpml/reference.hpp"
#include "kgpml/spectral.hpp"

namespace kgpml {

enum class Formulation { pml1, pml2 };
enum class Scaling { classical, nonrel };
/// R = r, r / eps or r / eps^2.
enum class RPolicy { fixed, inverse_eps, inverse_eps2 };
enum class InitialPreset { gaussian_sech, gaussian_sech_eps, vortex4 };

struct SweepAxis {
  std::string key;  ///< sigma0, delta, r, epsilon, bermudez_order or alpha
  std::vector<double> values;
};

struct SolverConfig {
  Formulation formulation = Formulation::pml2;
  int dimension = 1;
  Scaling scaling = Scaling::classical;
  double eps = 1.0;

  ProfileKind profile = ProfileKind::polynomial;
  int bermudez_order = 2;
  double sigma0 = 8.0;
  double delta = 0.5;

  RPolicy r_policy = RPolicy::fixed;
  double r = 1.0;
  double r_phase_pi = 0.0;  ///< R is multiplied by exp(i pi r_phase_pi); stability demo only

  double alpha = 0.0;
  std::optional<double> lambda;  ///< preset default when absent

  double L = 4.0;
  std::size_t N = 288;
  double tau = 1e-3;
  double t_final = 4.0;

  InitialPreset initial_data = InitialPreset::gaussian_sech;
  double c0 = 1.32;
  double omega = 2.0;

  bool reference = true;
  double reference_enlargement = 4.0;
  ReferenceScheme reference_scheme = ReferenceScheme::ewi;
  std::optional<double> ref_tau;
  std::optional<std::size_t> ref_N;

  double gmres_tol = 1e-10;
  int gmres_max_iter = 0;
  bool preconditioner = true;
  bool increment_form = true;

  long snapshot_stride = 100;
  std::string output = "run";
  bool demo_stability = false;

  std::vector<SweepAxis> sweep;

  double total_half_width() const noexcept { return L + delta; }
  double mesh() const noexcept { return 2.0 * total_half_width() / static_cast<double>(N); }
  double eps_value() const noexcept { return scaling == Scaling::classical ? 1.0 : eps; }
  double lambda_value() const noexcept;
  Complex shift() const;
  ProfileSpec profile_spec() const;
  InitialData initial() const;
  Grid1D grid1d() const;
  Grid2D grid2d() const;

  /// Throws ConfigError naming the violated rule.
  void validate() const;
};

SolverConfig parse_config(std::string_view text);
SolverConfig load_config(const std::filesystem::path& path);
/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const SolverConfig& cfg);

/// Copy of cfg with one sweep key set. Setting epsilon also selects the scaling
/// (classical at 1, non-relativistic below).
SolverConfig with_value(SolverConfig cfg, std::string_view key, double value);

/// Number of nodes for mesh h on (-L*, L*); throws ConfigError unless 2 L* / h is an even integer.
std::size_t nodes_for_mesh(double total_half_width, double h);

std::string_view to_string(Formulation f);
std::string_view to_string(Scaling s);
std::string_view to_string(RPolicy r);
std::string_view to_string(InitialPreset p);
std::string_view to_string(ProfileKind k);
std::string_view to_string(ReferenceScheme s);

}  // namespace kgpml
