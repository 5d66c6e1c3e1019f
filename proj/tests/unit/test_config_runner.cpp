// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "kgpml/config.hpp"
#include "kgpml/errors.hpp"
#include "kgpml/runner.hpp"

using namespace kgpml;

namespace {

constexpr const char* kSmall = R"(
formulation = pml2
profile     = bermudez
sigma0      = 3
delta       = 1/2
h           = 1/8
tau         = 1/100
T_final     = 1/2
snapshot_stride = 10
)";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("kgpml_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("defaults and basic parsing") {
  const auto c = parse_config("");
  CHECK(c.formulation == Formulation::pml2);
  CHECK(c.N == 288);
  CHECK(c.mesh() == doctest::Approx(1.0 / 32.0));

  const auto s = parse_config(kSmall);
  CHECK(s.profile == ProfileKind::bermudez);
  CHECK(s.delta == 0.5);
  CHECK(s.N == 72);
  CHECK(s.tau == doctest::Approx(0.01));
  CHECK(s.lambda_value() == 1.0);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_config("bogus = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("sigma0 = 1\nsigma0 = 2"), ConfigError);
  CHECK_THROWS_AS(parse_config("sigma0"), ConfigError);
  CHECK_THROWS_AS(parse_config("sigma0 = "), ConfigError);
  CHECK_THROWS_AS(parse_config("sigma0 = abc"), ConfigError);
  CHECK_THROWS_AS(parse_config("[other]"), ConfigError);
  CHECK_THROWS_AS(parse_config("[sweep]\ntau = 1, 2"), ConfigError);
  CHECK_THROWS_AS(parse_config("[sweep]\nsigma0 = 1\nsigma0 = 2"), ConfigError);
  CHECK_THROWS_AS(parse_config("h = 0.7"), ConfigError);
  CHECK_THROWS_AS(parse_config("h = 1/8\nN = 100"), ConfigError);
  CHECK_NOTHROW(parse_config("h = 1/8\nN = 72"));
}

TEST_CASE("validation rules") {
  CHECK_THROWS_AS(parse_config("formulation = pml1\nprofile = bermudez"), ConfigError);
  CHECK_THROWS_AS(parse_config("formulation = pml1\ndimension = 2\ninitial_data = vortex4"), ConfigError);
  CHECK_THROWS_AS(parse_config("epsilon = 0.5"), ConfigError);
  CHECK_THROWS_AS(parse_config("scaling = nonrel"), ConfigError);
  CHECK_THROWS_AS(parse_config("dimension = 2"), ConfigError);
  CHECK_THROWS_AS(parse_config("initial_data = vortex4"), ConfigError);
  CHECK_THROWS_AS(parse_config("r_phase_pi = 0.25"), ConfigError);
  CHECK_NOTHROW(parse_config("r_phase_pi = 0.25\ndemo_stability = true"));
  CHECK_THROWS_AS(parse_config("sigma0 = -1"), ConfigError);
  CHECK_THROWS_AS(parse_config("output = a/b"), ConfigError);
  CHECK_THROWS_AS(parse_config("reference_enlargement = 1.5"), ConfigError);
  CHECK_THROWS_AS(parse_config("gmres_tol = 1"), ConfigError);
}

TEST_CASE("serialization round trip") {
  const auto c = parse_config(std::string(kSmall) + "lambda = 2\nref_tau = 1/400\n[sweep]\nsigma0 = 2, 4\ndelta = 3/8, 1/2");
  const std::string text = serialize_config(c);
  const auto back = parse_config(text);
  CHECK(serialize_config(back) == text);
  CHECK(back.N == c.N);
  CHECK(back.lambda.value() == 2.0);
  CHECK(back.ref_tau.value() == doctest::Approx(1.0 / 400.0));
  REQUIRE(back.sweep.size() == 2);
  CHECK(back.sweep[1].values[0] == 0.375);
}

TEST_CASE("shift policies") {
  auto c = parse_config("scaling = nonrel\nepsilon = 0.5\nr_policy = inverse_eps2");
  CHECK(c.shift() == Complex(4.0));
  c.r_policy = RPolicy::inverse_eps;
  CHECK(c.shift() == Complex(2.0));
  c.r_policy = RPolicy::fixed;
  CHECK(c.shift() == Complex(1.0));
  CHECK(c.profile_spec().shift == Complex(1.0));

  const auto d = parse_config("r_phase_pi = 0.25\ndemo_stability = true");
  CHECK(std::arg(d.shift()) == doctest::Approx(M_PI / 4.0));

  const auto p1 = parse_config("formulation = pml1\nr = 3");
  CHECK(p1.profile_spec().shift == Complex(1.0));
}

TEST_CASE("sweep values") {
  const auto c = parse_config(kSmall);
  const auto d = with_value(c, "delta", 0.75);
  CHECK(d.delta == 0.75);
  CHECK(d.mesh() == doctest::Approx(c.mesh()));

  const auto e = with_value(c, "epsilon", 0.5);
  CHECK(e.scaling == Scaling::nonrel);
  CHECK(with_value(e, "epsilon", 1.0).scaling == Scaling::classical);
  CHECK(with_value(c, "bermudez_order", 0).bermudez_order == 0);

  auto s = parse_config(std::string(kSmall) + "[sweep]\nsigma0 = 2, 4, 6\ndelta = 3/8, 1/2");
  const auto grid = expand_sweep(s);
  REQUIRE(grid.size() == 6);
  CHECK(grid[0].sigma0 == 2.0);
  CHECK(grid[1].sigma0 == 2.0);
  CHECK(grid[1].delta == 0.5);
  CHECK(grid[2].sigma0 == 4.0);
  CHECK_THROWS_AS(expand_sweep(c), ConfigError);
}

TEST_CASE("zero final time yields a header-only series") {
  auto c = parse_config(kSmall);
  c.t_final = 0.0;
  const auto sim = simulate(c);
  CHECK(sim.rows.empty());
  const std::string csv = series_csv(c, sim);
  CHECK(csv.find("t,e2_pml,einf_pml,HI_pml,HI_ref,gmres_iters,umax") != std::string::npos);
  CHECK(csv.back() == '\n');
}

TEST_CASE("single run rows and determinism") {
  const auto c = parse_config(kSmall);
  const auto a = simulate(c);
  REQUIRE(a.rows.size() == 6);
  CHECK(a.rows.front().t == 0.0);
  CHECK(a.rows.back().t == doctest::Approx(0.5));
  CHECK(a.rows.front().e2 < 1e-14);
  CHECK(a.rows.back().e2 < 1e-2);
  CHECK(a.rows.back().gmres_iters > 0);
  CHECK(a.gmres_per_step.size() == 51);

  const auto b = simulate(c);
  CHECK(series_csv(c, a) == series_csv(c, b));

  auto nr = c;
  nr.reference = false;
  const auto n = simulate(nr);
  CHECK(std::isnan(n.rows.back().e2));
  CHECK(n.rows.back().umax == doctest::Approx(a.rows.back().umax));
}

TEST_CASE("first-order layer through the runner") {
  auto c = parse_config(kSmall);
  c.formulation = Formulation::pml1;
  c.profile = ProfileKind::polynomial;
  c.sigma0 = 8.0;
  const auto sim = simulate(c);
  REQUIRE(sim.rows.size() == 6);
  CHECK(sim.rows.back().gmres_iters == 0);
  CHECK(sim.rows.back().e2 < 1e-2);
}

TEST_CASE("run writes CSV and manifest") {
  auto c = parse_config(kSmall);
  c.output = "unit";
  const auto dir = scratch_dir("run");
  const auto m = run_single(c, dir);
  REQUIRE(m.outputs.size() == 2);
  CHECK(std::filesystem::exists(dir / "unit.csv"));
  CHECK(std::filesystem::exists(dir / "unit.manifest.json"));
  const std::string json = slurp(dir / "unit.manifest.json");
  CHECK(json.find("\"version\"") != std::string::npos);
  CHECK(json.find("gmres_iterations") != std::string::npos);
  CHECK(m.version == library_version());
  const std::string csv = slurp(dir / "unit.csv");
  CHECK(csv.rfind("#", 0) == 0);
}

TEST_CASE("convergence study") {
  auto c = parse_config(kSmall);
  c.ref_tau = 1.0 / 800.0;
  const auto rows = convergence_study(c, ConvergenceAxis::tau, 3);
  REQUIRE(rows.size() == 3);
  CHECK_FALSE(rows[0].order.has_value());
  REQUIRE(rows[2].order.has_value());
  CHECK(*rows[2].order == doctest::Approx(2.0).epsilon(0.15));
  CHECK(rows[1].tau == doctest::Approx(0.005));

  const auto one = convergence_study(c, ConvergenceAxis::tau, 1);
  REQUIRE(one.size() == 1);
  CHECK_FALSE(one[0].order.has_value());
  CHECK(convergence_csv(c, ConvergenceAxis::tau, one).find("level") != std::string::npos);

  auto bad = c;
  bad.ref_tau = 0.003;
  CHECK_THROWS_AS(convergence_study(bad, ConvergenceAxis::tau, 2), ConfigError);
}

TEST_CASE("parallel sweep matches serial") {
  auto c = parse_config(std::string(kSmall) + "[sweep]\nsigma0 = 2, 4\ndelta = 1/4, 1/2");
  const auto serial = sweep_study(c, 1);
  const auto parallel = sweep_study(c, 3);
  REQUIRE(serial.size() == 4);
  REQUIRE(parallel.size() == 4);
  CHECK(sweep_csv(c, serial) == sweep_csv(c, parallel));
  CHECK(serial[3].values == std::vector<double>{4.0, 0.5});
}
