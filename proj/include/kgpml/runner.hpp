// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file runner.hpp
 * @brief Experiment orchestration: single runs, convergence studies and sweeps.
 *
 * CSV outputs start with a block of `#` lines holding the resolved config, followed by
 * a column header. All numbers are printed with 17 significant digits, so identical
 * configs produce identical bytes.
 */

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kgpml/config.hpp"
#include "kgpml/reference.hpp"

namespace kgpml {

/// One CSV row. Errors and HI_ref are NaN when no reference is computed.
struct SeriesRow {
  double t = 0.0;
  double e2 = 0.0;
  double einf = 0.0;
  double hi_pml = 0.0;
  double hi_ref = 0.0;
  int gmres_iters = 0;  ///< iterations of the solve that produced u at this time (0 for PML-I)
  double umax = 0.0;
};

struct Simulation {
  std::vector<SeriesRow> rows;
  std::vector<int> gmres_per_step;  ///< entry n: iterations for u^n (zero for n < 2)
  std::vector<std::string> warnings;
  Field final_u;  ///< u at T_final on the PML grid
};

/// The reference the runner compares against: same mesh as cfg, time step ref_tau
/// (or tau), snapshots at the rows of simulate(cfg).
ReferenceRun compute_reference(const SolverConfig& cfg);

/// Runs the configured solver. With cfg.reference set, errors are measured against
/// `reference` if given, else against compute_reference(cfg). T_final = 0 yields no rows.
Simulation simulate(const SolverConfig& cfg, const ReferenceRun* reference = nullptr);

/// u at T_final only, without metrics.
Field final_field(const SolverConfig& cfg);

std::string series_csv(const SolverConfig& cfg, const Simulation& sim);

struct RunManifest {
  std::string config_text;
  std::string version;
  double wall_seconds = 0.0;
  std::vector<int> gmres_iterations;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;

  std::string to_json() const;
};

RunManifest run_single(const SolverConfig& cfg, const std::filesystem::path& out_dir);

enum class ConvergenceAxis { tau, h };

struct ConvergenceRow {
  int level = 0;
  double tau = 0.0;
  double h = 0.0;
  std::size_t N = 0;
  double einf = 0.0;  ///< relative max error at T_final against the fine self-reference
  double e2 = 0.0;
  std::optional<double> order;  ///< log2 of the error ratio to the previous level
};

/// Self-convergence at T_final. tau axis: tau / 2^i against ref_tau (default 1e-4) on the
/// same mesh. h axis: N 2^i against ref_N (default N 2^levels) at the same tau.
std::vector<ConvergenceRow> convergence_study(const SolverConfig& cfg, ConvergenceAxis axis, int levels);
std::string convergence_csv(const SolverConfig& cfg, ConvergenceAxis axis, const std::vector<ConvergenceRow>& rows);
RunManifest run_convergence(const SolverConfig& cfg, ConvergenceAxis axis, int levels,
                            const std::filesystem::path& out_dir);

struct SweepRow {
  std::vector<double> values;  ///< one per axis, in cfg.sweep order
  double e2 = 0.0;             ///< at T_final
  double einf = 0.0;
  double hi_pml = 0.0;
  double hi_ref = 0.0;
  double umax = 0.0;
  long gmres_total = 0;
};

/// Cartesian product of the sweep axes, first axis slowest. Throws ConfigError if empty.
std::vector<SolverConfig> expand_sweep(const SolverConfig& cfg);
/// Runs every grid point; `threads` independent simulations at a time (0: hardware).
/// Results are in grid order regardless of scheduling.
std::vector<SweepRow> sweep_study(const SolverConfig& cfg, unsigned threads = 0);
std::string sweep_csv(const SolverConfig& cfg, const std::vector<SweepRow>& rows);
RunManifest run_sweep(const SolverConfig& cfg, const std::filesystem::path& out_dir, unsigned threads = 0);

std::string_view library_version();

}  // namespace kgpml
