// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <doctest.h>

#include "kgpml/errors.hpp"
#include "kgpml/initial_data.hpp"
#include "kgpml/pml1_ewi.hpp"
#include "kgpml/reference.hpp"
#include "support.hpp"

using namespace kgpml;
using kgpml::test::max_diff;

namespace {

Pml1Params params_for(double sigma0, double tau, double lambda = 1.0, double eps = 1.0) {
  Pml1Params p;
  p.lambda = lambda;
  p.profile = polynomial_profile(sigma0, 0.5, 4.0);
  p.tau = tau;
  p.eps = eps;
  return p;
}

}  // namespace

TEST_CASE("a constant state oscillates exactly at the mass frequency") {
  const Grid1D g(4.5, 36);
  const Pml1Stepper stepper(g, params_for(1e-300, 0.05, 0.0));
  const Complex c(0.7, -0.2);
  auto s = init_pml1(Field(shape_of(g), c), Field(shape_of(g)), 0.0);
  stepper.advance(s);
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(std::abs(s.u[j] - std::cos(0.05) * c) < 1e-15);
    CHECK(std::abs(s.v[j] + std::sin(0.05) * c) < 1e-15);
  }
}

TEST_CASE("without absorption the stepper is the free-field integrator") {
  const Grid1D g(4.5, 72);
  const double tau = 0.01;
  const Pml1Stepper stepper(g, params_for(1e-300, tau));
  const FreeFieldEwi free(g, 1.0, 1.0, tau);
  auto [u0, v0] = gaussian_sech().sample(g);
  auto s = init_pml1(u0, v0, 0.0);
  Field u = u0, v = v0;
  for (int n = 0; n < 50; ++n) {
    stepper.advance(s);
    free.advance(u, v);
  }
  CHECK(max_diff(s.u, u) < 1e-12);
  CHECK(max_diff(s.v, v) < 1e-12);
}

TEST_CASE("real data stays real") {
  const Grid1D g(4.5, 72);
  const Pml1Stepper stepper(g, params_for(8.0, 0.01));
  auto [u0, v0] = gaussian_sech().sample(g);
  auto s = init_pml1(u0, v0, 0.5);
  for (int n = 0; n < 100; ++n) stepper.advance(s);
  CHECK(s.u.max_imag() < 1e-12);
  CHECK(s.eta1.max_imag() < 1e-12);
  CHECK(s.eta2.max_imag() < 1e-12);
}

TEST_CASE("outgoing waves are absorbed") {
  const double L = 4.0;
  const Grid1D g(4.5, 144);
  const double tau = 0.005;
  const Pml1Stepper stepper(g, params_for(8.0, tau));
  const auto data = gaussian_sech();
  auto [u0, v0] = data.sample(g);
  auto s = init_pml1(u0, v0, 0.0);
  for (int n = 0; n < 400; ++n) stepper.advance(s);

  ReferenceProblem prob{g};
  prob.physical_half_width = L;
  prob.data = data;
  prob.tau = tau;
  prob.t_final = 2.0;
  prob.snapshot_stride = 400;
  const auto ref = reference_solve(prob);
  const auto e = rel_l2_error(g, s.u, ref.window.back(), L);
  REQUIRE(e.has_value());
  CHECK(*e < 5e-2);
}

TEST_CASE("blow-up is detected") {
  const Grid1D g(4.5, 36);
  auto p = params_for(8.0, 0.01);
  p.blowup_amplitude = 1.0;
  const Pml1Stepper stepper(g, p);
  auto [u0, v0] = gaussian_sech().sample(g);
  auto s = init_pml1(u0, v0, 0.0);
  CHECK_THROWS_AS(stepper.advance(s), BlowUpError);
}

TEST_CASE("invalid settings") {
  const Grid1D g(4.5, 36);
  auto p = params_for(8.0, 0.01);
  p.profile = bermudez_profile(2, 3.0, 0.5, 4.0);
  CHECK_THROWS_AS(Pml1Stepper(g, p), ConfigError);

  p = params_for(8.0, 0.0);
  CHECK_THROWS_AS(Pml1Stepper(g, p), ConfigError);

  p = params_for(8.0, 0.01, 1.0, 1.5);
  CHECK_THROWS_AS(Pml1Stepper(g, p), ConfigError);

  p = params_for(8.0, 0.01);
  p.profile.shift = Complex(2.0, 0.0);
  CHECK_THROWS_AS(Pml1Stepper(g, p), ConfigError);

  CHECK_THROWS_AS(init_pml1(Field(Shape{36, 1}), Field(Shape{18, 1}), 0.0), ContractViolation);
  CHECK_THROWS_AS(init_pml1(Field(Shape{36, 1}), Field(Shape{36, 1}), -1.0), ConfigError);

  const Pml1Stepper ok(g, params_for(8.0, 0.01));
  auto s = init_pml1(Field(Shape{18, 1}), Field(Shape{18, 1}), 0.0);
  CHECK_THROWS_AS(ok.advance(s), ContractViolation);
}

TEST_CASE("damping factor of the layer") {
  CHECK(damping_factor(1.0, 0.0).real() == doctest::Approx(-std::sqrt(2.0)));
  CHECK(std::abs(damping_factor(1.0, 0.0).imag()) < 1e-15);
  CHECK(damping_factor(2.0, 1.0).real() == doctest::Approx(-std::sqrt(5.0) / 3.0));
  // Re g < 0 is what makes the layer absorbing, whatever alpha >= 0.
  for (double alpha : {0.0, 0.5, 2.0})
    for (auto s : {std::complex<double>(0.1, 3.0), std::complex<double>(1.0, -7.0), std::complex<double>(5.0, 0.5)})
      CHECK(damping_factor(s, alpha).real() < 0.0);
  // Large |s|: g -> -1 independently of alpha.
  const std::complex<double> big(1e-3, 1e6);
  CHECK(std::abs(damping_factor(big, 0.0) - damping_factor(big, 3.0)) < 1e-5);
  CHECK_THROWS_AS(damping_factor({0.0, 1.0}, 0.0), ConfigError);
}

TEST_CASE("non-relativistic scaling runs with a matching time step") {
  const Grid1D g(4.5, 72);
  const double eps = 0.5;
  const Pml1Stepper stepper(g, params_for(1e-300, 0.002, 0.0, eps));
  const Complex c(1.0);
  auto s = init_pml1(Field(shape_of(g), c), Field(shape_of(g)), 0.0);
  for (int n = 0; n < 10; ++n) stepper.advance(s);
  // zero mode frequency 1/eps^2
  CHECK(std::abs(s.u[5] - std::cos(0.02 / (eps * eps)) * c) < 1e-13);
}
