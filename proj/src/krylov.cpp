// SPDX-License-Identifier: Apache-2.0
#include "kgpml/krylov.hpp"

#include <cmath>

#include "kgpml/errors.hpp"

namespace kgpml {

namespace {

void givens(Complex a, Complex b, double& c, Complex& s) {
  const double na = std::abs(a), nb = std::abs(b);
  if (nb == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (na == 0.0) {
    c = 0.0;
    s = std::conj(b) / nb;
    return;
  }
  const double r = std::hypot(na, nb);
  c = na / r;
  s = (a / na) * std::conj(b) / r;
}

}  // namespace

KrylovResult gmres_solve(const LinearOperator& op, const LinearOperator* precond, const Field& rhs,
                         const KrylovSettings& settings) {
  if (!(settings.tol > 0.0 && settings.tol < 1.0)) throw ContractViolation("gmres_solve: tol must lie in (0, 1)");
  if (rhs.shape() != op.shape) throw ContractViolation("gmres_solve: rhs shape does not match operator");
  if (precond && precond->shape != op.shape) throw ContractViolation("gmres_solve: preconditioner shape mismatch");

  const Shape shape = op.shape;
  const int max_iter = settings.max_iter > 0 ? settings.max_iter : static_cast<int>(op.dimension());

  auto apply_left = [&](const Field& x, Field& out, Field& scratch) {
    if (precond) {
      op.apply(x, scratch);
      precond->apply(scratch, out);
    } else {
      op.apply(x, out);
    }
  };

  KrylovResult result{Field(shape), {}};
  KrylovReport& report = result.report;

  Field r0(shape);
  if (precond)
    precond->apply(rhs, r0);
  else
    r0 = rhs;
  const double beta = norm2(r0);
  report.residual_history.push_back(beta == 0.0 ? 0.0 : 1.0);
  if (beta == 0.0) {
    report.converged = true;
    return result;
  }

  std::vector<Field> basis;
  basis.reserve(16);
  basis.push_back((1.0 / beta) * r0);

  // Column-major upper Hessenberg, rotated in place into R.
  std::vector<std::vector<Complex>> h;
  std::vector<double> cs;
  std::vector<Complex> sn;
  std::vector<Complex> g{Complex(beta)};

  Field w(shape), scratch(shape);
  int k = 0;
  double rel = 1.0;
  while (k < max_iter) {
    apply_left(basis[k], w, scratch);
    std::vector<Complex> col(k + 2);
    const double w_norm0 = norm2(w);
    for (int i = 0; i <= k; ++i) {
      const Complex hij = dot(basis[i], w);
      col[i] = hij;
      for (std::size_t n = 0; n < w.size(); ++n) w[n] -= hij * basis[i][n];
    }
    double w_norm = norm2(w);
    if (w_norm < 0.1 * w_norm0) {
      for (int i = 0; i <= k; ++i) {
        const Complex corr = dot(basis[i], w);
        col[i] += corr;
        for (std::size_t n = 0; n < w.size(); ++n) w[n] -= corr * basis[i][n];
      }
      w_norm = norm2(w);
    }
    col[k + 1] = w_norm;

    for (int i = 0; i < k; ++i) {
      const Complex t = cs[i] * col[i] + sn[i] * col[i + 1];
      col[i + 1] = -std::conj(sn[i]) * col[i] + cs[i] * col[i + 1];
      col[i] = t;
    }
    double c;
    Complex s;
    givens(col[k], col[k + 1], c, s);
    col[k] = c * col[k] + s * col[k + 1];
    col[k + 1] = 0.0;
    cs.push_back(c);
    sn.push_back(s);
    g.push_back(-std::conj(s) * g[k]);
    g[k] = c * g[k];
    h.push_back(std::move(col));

    ++k;
    rel = std::abs(g[k]) / beta;
    report.residual_history.push_back(rel);
    if (rel <= settings.tol || w_norm == 0.0) break;
    basis.push_back((1.0 / w_norm) * w);
  }

  // Back substitution R y = g.
  std::vector<Complex> y(k);
  for (int i = k - 1; i >= 0; --i) {
    Complex acc = g[i];
    for (int j = i + 1; j < k; ++j) acc -= h[j][i] * y[j];
    y[i] = acc / h[i][i];
  }
  Field& x = result.solution;
  for (int j = 0; j < k; ++j)
    for (std::size_t n = 0; n < x.size(); ++n) x[n] += y[j] * basis[j][n];

  report.iterations = k;
  report.final_residual = rel;
  report.converged = rel <= settings.tol;
  return result;
}

}  // namespace kgpml
