// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "kgpml/errors.hpp"
#include "kgpml/krylov.hpp"
#include "support.hpp"

using namespace kgpml;
using kgpml::test::max_diff;
using kgpml::test::random_field;

namespace {

using Dense = std::vector<std::vector<Complex>>;

Dense random_matrix(std::size_t n, unsigned seed, double diag_shift) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Dense a(n, std::vector<Complex>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Complex(dist(gen), dist(gen)) / std::sqrt(double(n));
  for (std::size_t i = 0; i < n; ++i) a[i][i] += diag_shift;
  return a;
}

LinearOperator dense_operator(const Dense& a) {
  const std::size_t n = a.size();
  return {Shape{n, 1}, [&a, n](const Field& in, Field& out) {
            for (std::size_t i = 0; i < n; ++i) {
              Complex s{};
              for (std::size_t j = 0; j < n; ++j) s += a[i][j] * in[j];
              out[i] = s;
            }
          }};
}

// Gaussian elimination with partial pivoting.
std::vector<Complex> dense_solve(Dense a, std::vector<Complex> b) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    std::swap(a[k], a[p]);
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<Complex> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Complex s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

LinearOperator scaled_identity(Shape shape, Complex c) {
  return {shape, [c](const Field& in, Field& out) {
            for (std::size_t i = 0; i < in.size(); ++i) out[i] = c * in[i];
          }};
}

}  // namespace

TEST_CASE("trivial systems") {
  const Shape shape{32, 1};
  const Field b = random_field(shape, 1);

  auto r1 = gmres_solve(scaled_identity(shape, 1.0), nullptr, b);
  CHECK(r1.report.converged);
  CHECK(r1.report.iterations == 1);
  CHECK(max_diff(r1.solution, b) < 1e-14);

  auto r2 = gmres_solve(scaled_identity(shape, 2.0), nullptr, b);
  CHECK(r2.report.iterations <= 2);
  CHECK(max_diff(2.0 * r2.solution, b) < 1e-13);

  auto r0 = gmres_solve(scaled_identity(shape, 3.0), nullptr, Field(shape));
  CHECK(r0.report.converged);
  CHECK(r0.report.iterations <= 1);
  CHECK(r0.solution.max_abs() == 0.0);
}

TEST_CASE("dense system against Gaussian elimination") {
  const std::size_t n = 40;
  const Dense a = random_matrix(n, 11, 3.0);
  const Field b = random_field(Shape{n, 1}, 12);
  const auto x = dense_solve(a, std::vector<Complex>(b.begin(), b.end()));

  const auto res = gmres_solve(dense_operator(a), nullptr, b, {1e-13, 0});
  REQUIRE(res.report.converged);
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(res.solution[i] - x[i]));
  CHECK(err < 1e-11);
}

TEST_CASE("residual history is non-increasing") {
  const std::size_t n = 60;
  const Dense a = random_matrix(n, 21, 0.5);
  const Field b = random_field(Shape{n, 1}, 22);
  const auto res = gmres_solve(dense_operator(a), nullptr, b, {1e-12, 0});
  const auto& hist = res.report.residual_history;
  REQUIRE(hist.size() == static_cast<std::size_t>(res.report.iterations) + 1);
  CHECK(hist.front() == 1.0);
  for (std::size_t i = 1; i < hist.size(); ++i) CHECK(hist[i] <= hist[i - 1] * (1.0 + 1e-12));
  CHECK(res.report.final_residual == doctest::Approx(hist.back()));
}

TEST_CASE("solution is linear in the right-hand side") {
  const std::size_t n = 30;
  const Dense a = random_matrix(n, 31, 2.0);
  const Field b1 = random_field(Shape{n, 1}, 32);
  const Field b2 = random_field(Shape{n, 1}, 33);
  const Complex c(0.3, -1.7);
  const auto x1 = gmres_solve(dense_operator(a), nullptr, b1, {1e-13, 0}).solution;
  const auto x2 = gmres_solve(dense_operator(a), nullptr, b2, {1e-13, 0}).solution;
  const auto x12 = gmres_solve(dense_operator(a), nullptr, b1 + c * b2, {1e-13, 0}).solution;
  CHECK(max_diff(x12, x1 + c * x2) < 1e-11);
}

TEST_CASE("exact preconditioner converges in one iteration") {
  const Shape shape{16, 1};
  const Field b = random_field(shape, 41);
  const auto op = scaled_identity(shape, Complex(4.0, 1.0));
  const auto inv = scaled_identity(shape, 1.0 / Complex(4.0, 1.0));
  const auto res = gmres_solve(op, &inv, b);
  CHECK(res.report.iterations == 1);
  CHECK(max_diff(Complex(4.0, 1.0) * res.solution, b) < 1e-13);
}

TEST_CASE("iteration cap is reported, not thrown") {
  const std::size_t n = 50;
  const Dense a = random_matrix(n, 51, 0.2);
  const Field b = random_field(Shape{n, 1}, 52);
  const auto res = gmres_solve(dense_operator(a), nullptr, b, {1e-12, 3});
  CHECK_FALSE(res.report.converged);
  CHECK(res.report.iterations == 3);
  CHECK(res.report.final_residual > 1e-12);
}

TEST_CASE("argument checks") {
  const Shape shape{8, 1};
  const auto op = scaled_identity(shape, 1.0);
  CHECK_THROWS_AS(gmres_solve(op, nullptr, Field(shape), {0.0, 0}), ContractViolation);
  CHECK_THROWS_AS(gmres_solve(op, nullptr, Field(shape), {1.0, 0}), ContractViolation);
  CHECK_THROWS_AS(gmres_solve(op, nullptr, Field(Shape{4, 1})), ContractViolation);
}
