// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "kgpml/spectral.hpp"

namespace kgpml {

/// Matrix-free linear map on Fields of one shape.
struct LinearOperator {
  Shape shape;
  std::function<void(const Field& in, Field& out)> apply;

  std::size_t dimension() const noexcept { return shape.size(); }
  Field operator()(const Field& in) const {
    Field out(shape);
    apply(in, out);
    return out;
  }
};

struct KrylovReport {
  int iterations = 0;
  double final_residual = 0.0;  ///< relative preconditioned residual
  bool converged = false;
  std::vector<double> residual_history;  ///< relative residual after each iteration (index 0: initial)
};

struct KrylovSettings {
  double tol = 1e-10;
  int max_iter = 0;  ///< 0 means the operator dimension
};

struct KrylovResult {
  Field solution;
  KrylovReport report;
};

/// Unrestarted GMRES with left preconditioning, zero initial guess.
///
/// Stops once ||M (b - A x)||_2 <= tol ||M b||_2. Arnoldi uses modified Gram-Schmidt
/// with a second pass whenever the new vector's norm drops by more than a factor 10.
/// Throws ContractViolation if tol is outside (0, 1) or shapes disagree. Hitting the
/// iteration cap is reported through KrylovReport::converged, not an exception.
KrylovResult gmres_solve(const LinearOperator& op, const LinearOperator* precond, const Field& rhs,
                         const KrylovSettings& settings = {});

}  // namespace kgpml
