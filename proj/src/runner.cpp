// SPDX-License-Identifier: Apache-2.0
#include "kgpml/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "kgpml/errors.hpp"
#include "kgpml/pml1_ewi.hpp"
#include "kgpml/pml2_fd.hpp"

#ifndef KGPML_VERSION
#define KGPML_VERSION "0.0.0"
#endif

namespace kgpml {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

long step_count(double t_final, double tau) {
  const double n = t_final / tau;
  const long steps = std::lround(n);
  if (std::abs(n - static_cast<double>(steps)) > 1e-8 * std::max(1.0, n))
    throw ConfigError(fmt::format("T_final = {} is not a whole number of steps tau = {}", t_final, tau));
  return steps;
}

AnyGrid grid_of(const SolverConfig& cfg) {
  if (cfg.dimension == 2) return cfg.grid2d();
  return cfg.grid1d();
}

Pml1Params pml1_params(const SolverConfig& cfg) {
  Pml1Params p;
  p.lambda = cfg.lambda_value();
  p.profile = cfg.profile_spec();
  p.tau = cfg.tau;
  p.eps = cfg.eps_value();
  return p;
}

Pml2Params pml2_params(const SolverConfig& cfg) {
  Pml2Params p;
  p.lambda = cfg.lambda_value();
  p.profile = cfg.profile_spec();
  p.tau = cfg.tau;
  p.eps = cfg.eps_value();
  p.omega = cfg.omega;
  p.allow_complex_shift = cfg.demo_stability;
  p.use_preconditioner = cfg.preconditioner;
  p.increment_form = cfg.increment_form;
  p.krylov.tol = cfg.gmres_tol;
  p.krylov.max_iter = cfg.gmres_max_iter;
  return p;
}

Pml2Solver make_pml2(const AnyGrid& g, const Pml2Params& p) {
  return std::visit([&](const auto& grid) { return Pml2Solver(grid, p); }, g);
}

std::pair<Field, Field> sample_initial(const SolverConfig& cfg, const AnyGrid& g) {
  const InitialData data = cfg.initial();
  return std::visit([&](const auto& grid) { return data.sample(grid); }, g);
}

// Time levels of the configured scheme together with u_t at the current level.
// PML-II keeps one level ahead so that u_t can be taken as a centered difference.
class Driver {
public:
  Driver(const SolverConfig& cfg, const AnyGrid& g) : tau_(cfg.tau) {
    auto [u0, v0] = sample_initial(cfg, g);
    if (cfg.formulation == Formulation::pml1) {
      pml1_.emplace(std::get<Grid1D>(g), pml1_params(cfg));
      state1_ = init_pml1(u0, v0, cfg.alpha);
      return;
    }
    pml2_.emplace(make_pml2(g, pml2_params(cfg)));
    ahead_ = pml2_->first_step(u0, v0);
    u_ = std::move(u0);
    v_ = std::move(v0);
  }

  const Field& u() const { return pml1_ ? state1_.u : u_; }
  const Field& u_dot() const { return pml1_ ? state1_.v : v_; }
  /// GMRES iterations spent on the solve producing the current level.
  int iterations() const { return current_iters_; }

  void advance() {
    if (pml1_) {
      pml1_->advance(state1_);
      return;
    }
    current_iters_ = ahead_iters_;
    Field previous = std::move(u_);
    ahead_iters_ = pml2_->advance(ahead_).iterations;
    u_ = ahead_.u_prev;
    v_ = ahead_.u_curr - previous;
    v_ *= Complex(0.5 / tau_);
  }

private:
  double tau_;
  std::optional<Pml1Stepper> pml1_;
  Pml1State state1_;
  std::optional<Pml2Solver> pml2_;
  Pml2State ahead_;
  Field u_, v_;
  int current_iters_ = 0;
  int ahead_iters_ = 0;
};

double window_energy(const AnyGrid& g, const Field& u, const Field& v, double lambda, double L) {
  return std::visit([&](const auto& grid) { return energy_HI(grid, u, v, lambda, L); }, g);
}

double error_l2(const AnyGrid& g, const Field& a, const Field& b, double L) {
  return std::visit([&](const auto& grid) { return rel_l2_error(grid, a, b, L).value_or(kNaN); }, g);
}

double error_linf(const AnyGrid& g, const Field& a, const Field& b, double L) {
  return std::visit([&](const auto& grid) { return rel_linf_error(grid, a, b, L).value_or(kNaN); }, g);
}

long reference_ratio(const SolverConfig& cfg) {
  if (!cfg.ref_tau) return 1;
  const double k = cfg.tau / *cfg.ref_tau;
  const double rounded = std::round(k);
  if (rounded < 1.0 || std::abs(k - rounded) > 1e-9 * k)
    throw ConfigError("ref_tau must divide tau into an integer number of steps");
  return static_cast<long>(rounded);
}

Simulation simulate_stability(const SolverConfig& cfg) {
  const Grid1D g = cfg.grid1d();
  auto [u0, v0] = sample_initial(cfg, g);
  const auto probe = stability_probe(g, pml2_params(cfg), u0, v0, cfg.t_final);
  Simulation sim;
  const long steps = static_cast<long>(probe.size()) - 1;
  for (long n = 0; n <= steps; ++n) {
    if (n % cfg.snapshot_stride != 0 && n != steps) continue;
    sim.rows.push_back({probe[n].t, kNaN, kNaN, kNaN, kNaN, 0, probe[n].max_norm});
  }
  sim.final_u = u0;
  sim.warnings.push_back("stability demonstration: errors and energies are not computed");
  return sim;
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string comment_block(const SolverConfig& cfg) {
  std::string out = fmt::format("# kgpml {}\n", library_version());
  const std::string serialized = serialize_config(cfg);
  std::string_view text = serialized;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = text.substr(0, nl);
    if (!line.empty()) out += fmt::format("# {}\n", line);
    if (nl == std::string_view::npos) break;
    text = text.substr(nl + 1);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

Field subsample(const Field& fine, const AnyGrid& fine_grid, const AnyGrid& coarse_grid) {
  auto ratio = [](const Grid1D& f, const Grid1D& c) {
    if (f.size() % c.size() != 0 || std::abs(f.half_width_total() - c.half_width_total()) > 1e-12)
      throw ConfigError("reference grid does not contain the coarse grid");
    return f.size() / c.size();
  };
  if (const auto* f1 = std::get_if<Grid1D>(&fine_grid)) {
    const auto& c1 = std::get<Grid1D>(coarse_grid);
    const std::size_t r = ratio(*f1, c1);
    Field out(shape_of(c1));
    for (std::size_t j = 0; j < c1.size(); ++j) out[j] = fine[j * r];
    return out;
  }
  const auto& f2 = std::get<Grid2D>(fine_grid);
  const auto& c2 = std::get<Grid2D>(coarse_grid);
  const std::size_t rx = ratio(f2.x, c2.x), ry = ratio(f2.y, c2.y);
  Field out(shape_of(c2));
  for (std::size_t i = 0; i < c2.x.size(); ++i)
    for (std::size_t j = 0; j < c2.y.size(); ++j) out.at(i, j) = fine.at(i * rx, j * ry);
  return out;
}

RunManifest base_manifest(const SolverConfig& cfg) {
  RunManifest m;
  m.config_text = serialize_config(cfg);
  m.version = std::string(library_version());
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string_view library_version() { return KGPML_VERSION; }

// ---------------------------------------------------------------------------

ReferenceRun compute_reference(const SolverConfig& cfg) {
  cfg.validate();
  const long k = reference_ratio(cfg);
  ReferenceProblem p{grid_of(cfg)};
  p.physical_half_width = cfg.L;
  p.data = cfg.initial();
  p.lambda = cfg.lambda_value();
  p.eps = cfg.eps_value();
  p.tau = cfg.tau / static_cast<double>(k);
  p.t_final = static_cast<double>(step_count(cfg.t_final, cfg.tau)) * cfg.tau;
  p.snapshot_stride = cfg.snapshot_stride * k;
  p.scheme = cfg.reference_scheme;
  p.krylov.tol = cfg.gmres_tol;
  return reference_solve(p, cfg.reference_enlargement);
}

Simulation simulate(const SolverConfig& cfg, const ReferenceRun* reference) {
  cfg.validate();
  if (cfg.demo_stability) return simulate_stability(cfg);

  const AnyGrid grid = grid_of(cfg);
  const long steps = step_count(cfg.t_final, cfg.tau);
  Simulation sim;
  if (steps == 0) {
    sim.final_u = sample_initial(cfg, grid).first;
    return sim;
  }

  std::optional<ReferenceRun> own_reference;
  if (cfg.reference && !reference) {
    own_reference = compute_reference(cfg);
    reference = &*own_reference;
  }
  if (!cfg.reference) reference = nullptr;
  if (reference) sim.warnings = reference->warnings;

  const double lambda = cfg.lambda_value();
  Driver driver(cfg, grid);
  sim.gmres_per_step.assign(static_cast<std::size_t>(steps) + 1, 0);
  std::size_t snap = 0;

  auto record = [&](long n) {
    SeriesRow row;
    row.t = static_cast<double>(n) * cfg.tau;
    row.hi_pml = window_energy(grid, driver.u(), driver.u_dot(), lambda, cfg.L);
    row.gmres_iters = sim.gmres_per_step[static_cast<std::size_t>(n)];
    row.umax = driver.u().max_abs();
    row.e2 = row.einf = row.hi_ref = kNaN;
    if (reference) {
      if (snap >= reference->window.size()) throw ContractViolation("reference has fewer snapshots than the run");
      const Field& ref = reference->window[snap];
      row.e2 = error_l2(grid, driver.u(), ref, cfg.L);
      row.einf = error_linf(grid, driver.u(), ref, cfg.L);
      row.hi_ref = reference->energy.values[snap];
    }
    ++snap;
    sim.rows.push_back(row);
  };

  record(0);
  for (long n = 1; n <= steps; ++n) {
    driver.advance();
    sim.gmres_per_step[static_cast<std::size_t>(n)] = driver.iterations();
    if (n % cfg.snapshot_stride == 0 || n == steps) record(n);
  }
  sim.final_u = driver.u();
  return sim;
}

Field final_field(const SolverConfig& cfg) {
  cfg.validate();
  const AnyGrid grid = grid_of(cfg);
  const long steps = step_count(cfg.t_final, cfg.tau);
  auto [u0, v0] = sample_initial(cfg, grid);
  if (cfg.formulation == Formulation::pml1) {
    const Pml1Stepper stepper(std::get<Grid1D>(grid), pml1_params(cfg));
    Pml1State s = init_pml1(u0, v0, cfg.alpha);
    for (long n = 0; n < steps; ++n) stepper.advance(s);
    return s.u;
  }
  if (steps == 0) return u0;
  const Pml2Solver solver = make_pml2(grid, pml2_params(cfg));
  Pml2State s = solver.first_step(u0, v0);
  for (long n = 1; n < steps; ++n) solver.advance(s);
  return s.u_curr;
}

std::string series_csv(const SolverConfig& cfg, const Simulation& sim) {
  std::string out = comment_block(cfg);
  for (const auto& w : sim.warnings) out += fmt::format("# warning: {}\n", w);
  out += "t,e2_pml,einf_pml,HI_pml,HI_ref,gmres_iters,umax\n";
  for (const auto& r : sim.rows)
    out += fmt::format("{},{},{},{},{},{},{}\n", num(r.t), num(r.e2), num(r.einf), num(r.hi_pml), num(r.hi_ref),
                       r.gmres_iters, num(r.umax));
  return out;
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["config"] = config_text;
  j["version"] = version;
  j["wall_seconds"] = wall_seconds;
  j["gmres_iterations"] = gmres_iterations;
  j["outputs"] = outputs;
  j["warnings"] = warnings;
  return j.dump(2) + "\n";
}

namespace {

void finish(RunManifest& m, const SolverConfig& cfg, const std::filesystem::path& out_dir, std::string_view suffix,
            const std::string& csv, std::chrono::steady_clock::time_point t0) {
  std::filesystem::create_directories(out_dir);
  const auto csv_path = out_dir / fmt::format("{}{}.csv", cfg.output, suffix);
  write_file(csv_path, csv);
  m.outputs.push_back(csv_path.string());
  const auto manifest_path = out_dir / fmt::format("{}{}.manifest.json", cfg.output, suffix);
  m.outputs.push_back(manifest_path.string());
  m.wall_seconds = seconds_since(t0);
  write_file(manifest_path, m.to_json());
}

}  // namespace

RunManifest run_single(const SolverConfig& cfg, const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const Simulation sim = simulate(cfg);
  RunManifest m = base_manifest(cfg);
  m.gmres_iterations = sim.gmres_per_step;
  m.warnings = sim.warnings;
  finish(m, cfg, out_dir, "", series_csv(cfg, sim), t0);
  return m;
}

// ---------------------------------------------------------------------------

std::vector<ConvergenceRow> convergence_study(const SolverConfig& cfg, ConvergenceAxis axis, int levels) {
  cfg.validate();
  if (levels < 1) throw ConfigError("levels must be >= 1");

  SolverConfig fine = cfg;
  if (axis == ConvergenceAxis::tau) {
    fine.tau = cfg.ref_tau.value_or(1e-4);
  } else {
    fine.N = cfg.ref_N.value_or(cfg.N << levels);
  }
  const Field reference = final_field(fine);
  const AnyGrid fine_grid = grid_of(fine);

  std::vector<ConvergenceRow> rows;
  for (int i = 0; i < levels; ++i) {
    SolverConfig c = cfg;
    if (axis == ConvergenceAxis::tau)
      c.tau = cfg.tau / std::ldexp(1.0, i);
    else
      c.N = cfg.N << i;
    const AnyGrid g = grid_of(c);
    const Field u = final_field(c);
    const Field ref = subsample(reference, fine_grid, g);
    ConvergenceRow row;
    row.level = i;
    row.tau = c.tau;
    row.h = c.mesh();
    row.N = c.N;
    row.einf = error_linf(g, u, ref, c.L);
    row.e2 = error_l2(g, u, ref, c.L);
    if (i > 0 && rows.back().einf > 0.0 && row.einf > 0.0) row.order = std::log2(rows.back().einf / row.einf);
    rows.push_back(row);
  }
  return rows;
}

std::string convergence_csv(const SolverConfig& cfg, ConvergenceAxis axis, const std::vector<ConvergenceRow>& rows) {
  std::string out = comment_block(cfg);
  out += fmt::format("# axis = {}\n", axis == ConvergenceAxis::tau ? "tau" : "h");
  out += "level,tau,h,N,einf,e2,order\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{},{}\n", r.level, num(r.tau), num(r.h), r.N, num(r.einf), num(r.e2),
                       r.order ? num(*r.order) : std::string());
  return out;
}

RunManifest run_convergence(const SolverConfig& cfg, ConvergenceAxis axis, int levels,
                            const std::filesystem::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = convergence_study(cfg, axis, levels);
  RunManifest m = base_manifest(cfg);
  finish(m, cfg, out_dir, axis == ConvergenceAxis::tau ? "_converge_tau" : "_converge_h",
         convergence_csv(cfg, axis, rows), t0);
  return m;
}

// ---------------------------------------------------------------------------

std::vector<SolverConfig> expand_sweep(const SolverConfig& cfg) {
  if (cfg.sweep.empty()) throw ConfigError("the config has no [sweep] axes");
  std::vector<SolverConfig> points{cfg};
  points.front().sweep.clear();
  for (const auto& axis : cfg.sweep) {
    if (axis.values.empty()) throw ConfigError(fmt::format("sweep axis '{}' has no values", axis.key));
    std::vector<SolverConfig> next;
    for (const auto& p : points)
      for (double v : axis.values) next.push_back(with_value(p, axis.key, v));
    points = std::move(next);
  }
  for (const auto& p : points) p.validate();
  return points;
}

std::vector<SweepRow> sweep_study(const SolverConfig& cfg, unsigned threads) {
  const auto points = expand_sweep(cfg);
  std::vector<SweepRow> rows(points.size());

  // Axis values of point i, first axis slowest.
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::size_t rest = i;
    std::vector<double> values(cfg.sweep.size());
    for (std::size_t a = cfg.sweep.size(); a-- > 0;) {
      const auto& axis = cfg.sweep[a].values;
      values[a] = axis[rest % axis.size()];
      rest /= axis.size();
    }
    rows[i].values = std::move(values);
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        const Simulation sim = simulate(points[i]);
        SweepRow& row = rows[i];
        if (!sim.rows.empty()) {
          const SeriesRow& last = sim.rows.back();
          row.e2 = last.e2;
          row.einf = last.einf;
          row.hi_pml = last.hi_pml;
          row.hi_ref = last.hi_ref;
          row.umax = last.umax;
        }
        for (int it : sim.gmres_per_step) row.gmres_total += it;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, points.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string sweep_csv(const SolverConfig& cfg, const std::vector<SweepRow>& rows) {
  std::string out = comment_block(cfg);
  for (const auto& axis : cfg.sweep) out += axis.key + ",";
  out += "e2_pml,einf_pml,HI_pml,HI_ref,umax,gmres_total\n";
  for (const auto& r : rows) {
    for (double v : r.values) out += num(v) + ",";
    out += fmt::format("{},{},{},{},{},{}\n", num(r.e2), num(r.einf), num(r.hi_pml), num(r.hi_ref), num(r.umax),
                       r.gmres_total);
  }
  return out;
}

RunManifest run_sweep(const SolverConfig& cfg, const std::filesystem::path& out_dir, unsigned threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = sweep_study(cfg, threads);
  RunManifest m = base_manifest(cfg);
  finish(m, cfg, out_dir, "_sweep", sweep_csv(cfg, rows), t0);
  return m;
}

}  // namespace kgpml
