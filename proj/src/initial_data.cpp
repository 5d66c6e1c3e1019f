// SPDX-License-Identifier: Apache-2.0
#include "kgpml/initial_data.hpp"

#include <cmath>

#include "kgpml/errors.hpp"
#include "kgpml/pml2_fd.hpp"

namespace kgpml {

std::pair<Field, Field> InitialData::sample(const Grid1D& g) const {
  if (dimension != 1 || !u0 || !v0) throw ContractViolation("InitialData: no 1D data");
  return {Field::sample(g, u0), Field::sample(g, v0)};
}

std::pair<Field, Field> InitialData::sample(const Grid2D& g) const {
  if (dimension != 2 || !psi0 || !psi1) throw ContractViolation("InitialData: no 2D data");
  return build_rotating_initial_data(g, Field::sample(g, psi0), Field::sample(g, psi1), omega);
}

InitialData gaussian_sech() {
  InitialData d;
  d.dimension = 1;
  d.u0 = [](double x) { return Complex(5.0 * std::exp(-x * x)); };
  d.v0 = [](double x) { return Complex(0.5 / std::cosh(x * x)); };
  return d;
}

namespace {

Complex vortex_polynomial(double c0, double x, double y) {
  const Complex i(0.0, 1.0);
  return (x - c0 + i * y) * (x + c0 + i * y) * (x + i * (y - c0)) * (x + i * (y + c0));
}

}  // namespace

InitialData vortex4(double c0, double omega) {
  InitialData d;
  d.dimension = 2;
  d.omega = omega;
  d.psi0 = [c0](double x, double y) { return vortex_polynomial(c0, x, y) * std::exp(-(x * x + y * y) / 2.0); };
  d.psi1 = d.psi0;
  return d;
}

}  // namespace kgpml
