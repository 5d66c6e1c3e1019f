// SPDX-License-Identifier: Apache-2.0
// Command line front end: run, converge and sweep subcommands.
#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "kgpml/config.hpp"
#include "kgpml/errors.hpp"
#include "kgpml/runner.hpp"

namespace {

void report(const kgpml::RunManifest& m) {
  for (const auto& w : m.warnings) fmt::print(stderr, "warning: {}\n", w);
  for (const auto& out : m.outputs) fmt::print("wrote {}\n", out);
  fmt::print("wall clock {:.2f} s\n", m.wall_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Klein-Gordon solver with perfectly matched layers"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kgpml::library_version()));

  std::string out_dir = ".";
  bool seedless = false;
  bool demo_stability = false;
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_flag("--seedless", seedless, "accepted for compatibility; every run is deterministic");
  app.add_flag("--demo-stability", demo_stability, "allow a complex shift R and record the max norm only");

  std::string config_path;
  auto* run = app.add_subcommand("run", "single simulation with error and energy series");
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);

  auto* converge = app.add_subcommand("converge", "self-convergence table in tau or h");
  converge->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  std::string axis = "tau";
  int levels = 4;
  converge->add_option("--axis", axis, "tau or h")->check(CLI::IsMember({"tau", "h"}))->capture_default_str();
  converge->add_option("--levels", levels, "number of refinement levels")->check(CLI::PositiveNumber)->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "cartesian parameter sweep over the [sweep] section");
  sweep->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  unsigned threads = 0;
  sweep->add_option("--threads", threads, "concurrent simulations (0: one per core)")->capture_default_str();

  // Options are global; allow them after the subcommand too.
  for (auto* sub : {run, converge, sweep}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    kgpml::SolverConfig cfg = kgpml::load_config(config_path);
    if (demo_stability) {
      cfg.demo_stability = true;
      cfg.validate();
    }
    if (run->parsed()) {
      report(kgpml::run_single(cfg, out_dir));
    } else if (converge->parsed()) {
      const auto a = axis == "tau" ? kgpml::ConvergenceAxis::tau : kgpml::ConvergenceAxis::h;
      report(kgpml::run_convergence(cfg, a, levels, out_dir));
    } else if (sweep->parsed()) {
      report(kgpml::run_sweep(cfg, out_dir, threads));
    }
  } catch (const kgpml::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
