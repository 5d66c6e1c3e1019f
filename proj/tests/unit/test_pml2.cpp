// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "kgpml/errors.hpp"
#include "kgpml/initial_data.hpp"
#include "kgpml/pml2_fd.hpp"
#include "support.hpp"

using namespace kgpml;
using kgpml::test::max_diff;
using kgpml::test::random_field;

namespace {

Pml2Params params_for(const ProfileSpec& profile, double tau, double lambda = 1.0, double eps = 1.0) {
  Pml2Params p;
  p.lambda = lambda;
  p.profile = profile;
  p.tau = tau;
  p.eps = eps;
  return p;
}

const Grid1D kGrid(4.5, 72);

}  // namespace

TEST_CASE("starting values on a constant state") {
  const auto prof = bermudez_profile(2, 3.0, 0.5, 4.0);
  const Field one(shape_of(kGrid), 1.0);
  const Field zero(shape_of(kGrid));

  const Pml2Solver linear(kGrid, params_for(prof, 0.1, 0.0));
  auto s = linear.first_step(one, zero);
  CHECK(s.time_index == 1);
  CHECK(s.u_curr[10].real() == doctest::Approx(0.995));

  const Pml2Solver cubic(kGrid, params_for(prof, 0.1, 1.0));
  CHECK(cubic.first_step(one, zero).u_curr[10].real() == doctest::Approx(0.99));

  const Pml2Solver filtered(kGrid, params_for(prof, 0.01, 0.0, 0.5));
  const double expected = 1.0 - 0.005 * std::sin(0.16);
  CHECK(filtered.first_step(one, zero).u_curr[10].real() == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.999203).epsilon(1e-6));

  CHECK_THROWS_AS(filtered.first_step_classical(one, zero), ConfigError);
  CHECK_THROWS_AS(linear.first_step_filtered(one, zero), ConfigError);
}

TEST_CASE("second step on a constant state") {
  auto p = params_for(polynomial_profile(8.0, 0.5, 4.0), 0.1, 0.0);
  p.krylov.tol = 1e-14;
  const auto solver = Pml2Solver::free_field(kGrid, p);
  auto s = solver.first_step(Field(shape_of(kGrid), 1.0), Field(shape_of(kGrid)));
  solver.advance(s);
  // (2 u1 / (1 + tau^2/2)) - u0
  const double expected = 2.0 * 0.995 / 1.005 - 1.0;
  CHECK(s.time_index == 2);
  for (std::size_t j = 0; j < kGrid.size(); ++j) CHECK(std::abs(s.u_curr[j] - expected) < 1e-13);
  CHECK(expected == doctest::Approx(0.9800995).epsilon(1e-7));
}

TEST_CASE("stretched operator annihilates constants") {
  for (const auto& prof : {polynomial_profile(8.0, 0.5, 4.0), bermudez_profile(2, 3.0, 0.5, 4.0)}) {
    const Pml2Solver solver(kGrid, params_for(prof, 0.01));
    CHECK(solver.laplacian()(Field(shape_of(kGrid), Complex(2.0, 1.0))).max_abs() < 1e-12);
  }
}

TEST_CASE("A is non-negative in the 1/S weighted inner product") {
  const auto prof = polynomial_profile(8.0, 0.5, 4.0);
  const Pml2Solver solver(kGrid, params_for(prof, 0.01));
  const auto& S = solver.profile_x().stretch();
  for (unsigned seed : {1u, 2u, 3u}) {
    const Field u = random_field(shape_of(kGrid), seed);
    const Field au = solver.laplacian()(u);
    Complex q{};
    for (std::size_t j = 0; j < u.size(); ++j) q += std::conj(u[j]) * au[j] / S[j];
    CHECK(std::abs(q.imag()) < 1e-10 * std::abs(q));
    CHECK(q.real() > 0.0);
  }
}

namespace {

Field without_nyquist(Field u, const Grid1D& g) {
  Transform t(shape_of(g));
  t.forward(u.values());
  u[g.nyquist_index()] = 0.0;
  t.backward(u.values());
  return u;
}

}  // namespace

TEST_CASE("without a layer A is the negative second derivative") {
  const auto solver = Pml2Solver::free_field(kGrid, params_for(polynomial_profile(8.0, 0.5, 4.0), 0.01));
  // The Nyquist mode is dropped by the two first derivatives, so leave it out.
  const Field u = without_nyquist(random_field(shape_of(kGrid), 9), kGrid);
  const Field expected = apply_multiplier(u, -1.0 * op_second_derivative(kGrid));
  CHECK(max_diff(solver.laplacian()(u), expected) < 1e-10);
}

TEST_CASE("system operator at eps = 1") {
  const double tau = 0.02;
  const Pml2Solver solver(kGrid, params_for(bermudez_profile(2, 3.0, 0.5, 4.0), tau));
  const Field u = random_field(shape_of(kGrid), 5);
  const Field au = solver.laplacian()(u);
  Field expected(shape_of(kGrid));
  for (std::size_t j = 0; j < u.size(); ++j) expected[j] = (1.0 / (tau * tau) + 0.5) * u[j] + 0.5 * au[j];
  CHECK(max_diff(solver.system_operator()(u), expected) < 1e-9);

  const Field rhs = solver.step_rhs(u);
  for (std::size_t j = 0; j < u.size(); ++j)
    CHECK(std::abs(rhs[j] - ((2.0 / (tau * tau)) * u[j] - std::norm(u[j]) * u[j])) < 1e-9);
}

TEST_CASE("preconditioner inverts the layer-free operator") {
  const double tau = 0.02;
  const auto free = Pml2Solver::free_field(kGrid, params_for(polynomial_profile(8.0, 0.5, 4.0), tau));
  const Field u = without_nyquist(random_field(shape_of(kGrid), 6), kGrid);
  CHECK(max_diff(free.preconditioner()(free.system_operator()(u)), u) < 1e-12);
}

TEST_CASE("increment form solves the same scheme") {
  const auto prof = bermudez_profile(2, 3.0, 0.5, 4.0);
  auto p = params_for(prof, 0.01);
  p.krylov.tol = 1e-13;
  auto q = p;
  q.increment_form = false;
  const Pml2Solver a(kGrid, p), b(kGrid, q);
  auto [u0, v0] = gaussian_sech().sample(kGrid);
  auto sa = a.first_step(u0, v0);
  auto sb = b.first_step(u0, v0);
  for (int n = 0; n < 20; ++n) {
    a.advance(sa);
    b.advance(sb);
  }
  CHECK(max_diff(sa.u_curr, sb.u_curr) < 1e-9);
}

TEST_CASE("bounded for large time steps") {
  const Grid1D g(4.5, 144);
  auto [u0, v0] = gaussian_sech().sample(g);
  const double m0 = u0.max_abs();
  for (double tau : {1e-3, 1e-2, 0.1}) {
    const Pml2Solver solver(g, params_for(bermudez_profile(2, 3.0, 0.5, 4.0), tau));
    auto s = solver.first_step(u0, v0);
    const long steps = std::lround(2.0 / tau);
    double peak = 0.0;
    for (long n = 1; n < steps; ++n) {
      solver.advance(s);
      peak = std::max(peak, s.u_curr.max_abs());
    }
    CHECK(std::isfinite(peak));
    CHECK(peak < 2.0 * m0);
  }
}

TEST_CASE("preconditioned iteration counts stay small as eps shrinks") {
  const auto prof = bermudez_profile(2, 3.0, 0.5, 4.0);
  auto [u0, v0] = gaussian_sech().sample(kGrid);
  for (double eps : {1.0, 0.5, 0.25, 0.125}) {
    const double tau = 0.01 * eps * eps;
    const Pml2Solver solver(kGrid, params_for(prof, tau, 1.0, eps));
    auto s = solver.first_step(u0, v0);
    const auto report = solver.advance(s);
    CHECK(report.converged);
    CHECK(report.iterations <= 6);
  }
}

TEST_CASE("2D run with y-independent data reduces to 1D") {
  const Grid1D gx(4.5, 36);
  const Grid2D g2{gx, Grid1D(4.5, 8)};
  auto p = params_for(polynomial_profile(8.0, 0.5, 4.0), 0.02);
  p.krylov.tol = 1e-13;
  const Pml2Solver s1(gx, p), s2(g2, p);
  auto [u0, v0] = gaussian_sech().sample(gx);
  auto u0_2 = Field::sample(g2, [](double x, double) { return 5.0 * std::exp(-x * x); });
  auto v0_2 = Field::sample(g2, [](double x, double) { return 0.5 / std::cosh(x * x); });

  auto a = s1.first_step(u0, v0);
  auto b = s2.first_step(u0_2, v0_2);
  for (int n = 0; n < 25; ++n) {
    s1.advance(a);
    s2.advance(b);
  }
  double err = 0.0;
  for (std::size_t i = 0; i < gx.size(); ++i)
    for (std::size_t j = 0; j < 8; ++j) err = std::max(err, std::abs(b.u_curr.at(i, j) - a.u_curr[i]));
  CHECK(err < 1e-8);
}

TEST_CASE("rotating initial data") {
  const Grid2D g{Grid1D(std::numbers::pi, 16), Grid1D(std::numbers::pi, 16)};
  const Field psi0 = Field::sample(g, [](double x, double) { return std::sin(2.0 * x); });
  const Field psi1 = Field::sample(g, [](double x, double y) { return x * y; });

  auto [u0, v0] = build_rotating_initial_data(g, psi0, psi1, 0.0);
  CHECK(max_diff(u0, psi0) == 0.0);
  CHECK(max_diff(v0, psi1) == 0.0);

  auto [u1, v1] = build_rotating_initial_data(g, psi0, Field(shape_of(g)), 2.0);
  const Field expected = Field::sample(g, [](double x, double y) { return 2.0 * y * 2.0 * std::cos(2.0 * x); });
  CHECK(max_diff(v1, expected) < 1e-12);

  CHECK_THROWS_AS(build_rotating_initial_data(g, Field(Shape{4, 4}), psi1, 1.0), ContractViolation);
}

TEST_CASE("four-vortex velocity against the analytic gradient") {
  const double c0 = 1.32, omega = 2.0;
  const Grid2D g{Grid1D(8.0, 64), Grid1D(8.0, 64)};
  const auto data = vortex4(c0, omega);
  auto [u0, v0] = data.sample(g);

  const Complex i(0.0, 1.0);
  auto oracle = [&](double x, double y) {
    const Complex f[4] = {x - c0 + i * y, x + c0 + i * y, x + i * (y - c0), x + i * (y + c0)};
    Complex p = f[0] * f[1] * f[2] * f[3];
    Complex dp{};  // each factor has d/dx = 1 and d/dy = i
    for (int k = 0; k < 4; ++k) {
      Complex rest = 1.0;
      for (int m = 0; m < 4; ++m)
        if (m != k) rest *= f[m];
      dp += rest;
    }
    const double e = std::exp(-(x * x + y * y) / 2.0);
    const Complex px = (dp - x * p) * e;
    const Complex py = (i * dp - y * p) * e;
    return omega * (y * px - x * py) + p * e;
  };
  CHECK(max_diff(v0, Field::sample(g, oracle)) < 1e-9);
}

TEST_CASE("parameter validation") {
  const auto prof = bermudez_profile(2, 3.0, 0.5, 4.0);
  CHECK_THROWS_AS(params_for(prof, 0.0).validate(), ConfigError);
  CHECK_THROWS_AS(params_for(prof, 0.01, 1.0, 0.0).validate(), ConfigError);
  CHECK_THROWS_AS(params_for(prof, 0.01, -1.0).validate(), ConfigError);

  auto p = params_for(prof, 0.01);
  p.profile.shift = std::polar(1.0, std::numbers::pi / 4.0);
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.allow_complex_shift = true;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("GMRES giving out is a solver divergence") {
  auto p = params_for(bermudez_profile(2, 3.0, 0.5, 4.0), 0.5);
  p.use_preconditioner = false;
  p.krylov = {1e-14, 1};
  const Pml2Solver solver(kGrid, p);
  auto [u0, v0] = gaussian_sech().sample(kGrid);
  auto s = solver.first_step(u0, v0);
  CHECK_THROWS_AS(solver.advance(s), SolverDivergence);
}

TEST_CASE("complex shift destabilizes") {
  const Grid1D g(4.5, 72);
  auto [u0, v0] = gaussian_sech().sample(g);
  auto p = params_for(polynomial_profile(8.0, 0.5, 4.0), 0.01);
  const auto stable = stability_probe(g, p, u0, v0, 4.0);
  CHECK(stable.size() == 401);
  double peak = 0.0;
  for (const auto& s : stable) peak = std::max(peak, s.max_norm);
  CHECK(peak < 3.0 * u0.max_abs());
  CHECK(stable.back().t == doctest::Approx(4.0));
}
