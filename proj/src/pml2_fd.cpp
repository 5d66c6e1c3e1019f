// SPDX-License-Identifier: Apache-2.0
#include "kgpml/pml2_fd.hpp"

#include <cmath>
#include <string>

#include "kgpml/errors.hpp"

namespace kgpml {

void Pml2Params::validate() const {
  if (!(tau > 0.0)) throw ConfigError("time step tau must be positive");
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
  if (!(lambda >= 0.0)) throw ConfigError("nonlinearity lambda must be nonnegative");
  profile.validate();
  const Complex r = profile.shift;
  if (!allow_complex_shift && !(r.imag() == 0.0 && r.real() > 0.0))
    throw ConfigError("PML-II shift R must be real and positive (complex R is unstable; enable the "
                      "stability demo to run it anyway)");
}

// ---------------------------------------------------------------------------
// StretchedLaplacian

StretchedLaplacian::StretchedLaplacian(const Grid1D& g, std::vector<Complex> stretch)
    : shape_(shape_of(g)), fft_(shape_), dx_(op_first_derivative(g)), sx_(std::move(stretch)) {
  if (sx_.size() != g.size()) throw ContractViolation("StretchedLaplacian: stretch length mismatch");
  hat_.resize(shape_.size());
  gx_.resize(shape_.size());
}

StretchedLaplacian::StretchedLaplacian(const Grid2D& g, std::vector<Complex> stretch_x,
                                       std::vector<Complex> stretch_y)
    : shape_(shape_of(g)),
      fft_(shape_),
      dx_(op_partial_x(g)),
      dy_(op_partial_y(g)),
      sx_(std::move(stretch_x)),
      sy_(std::move(stretch_y)) {
  if (sx_.size() != g.x.size() || sy_.size() != g.y.size())
    throw ContractViolation("StretchedLaplacian: stretch length mismatch");
  hat_.resize(shape_.size());
  gx_.resize(shape_.size());
  gy_.resize(shape_.size());
}

void StretchedLaplacian::apply(const Field& in, Field& out) const {
  if (in.shape() != shape_) throw ContractViolation("StretchedLaplacian::apply: shape mismatch");
  if (out.shape() != shape_) out = Field(shape_);
  const std::size_t n = shape_.size();
  const std::size_t ny = shape_.ny;

  std::copy(in.begin(), in.end(), hat_.begin());
  fft_.forward(hat_);

  if (!shape_.is_2d()) {
    for (std::size_t l = 0; l < n; ++l) gx_[l] = dx_[l] * hat_[l];
    fft_.backward(gx_);
    for (std::size_t j = 0; j < n; ++j) gx_[j] *= sx_[j];
    fft_.apply(gx_, dx_);
    for (std::size_t j = 0; j < n; ++j) out[j] = -sx_[j] * gx_[j];
    return;
  }

  for (std::size_t l = 0; l < n; ++l) {
    gx_[l] = dx_[l] * hat_[l];
    gy_[l] = dy_[l] * hat_[l];
  }
  fft_.backward(gx_);
  fft_.backward(gy_);
  for (std::size_t i = 0; i < shape_.nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      gx_[i * ny + j] *= sx_[i];
      gy_[i * ny + j] *= sy_[j];
    }
  fft_.apply(gx_, dx_);
  fft_.apply(gy_, dy_);
  for (std::size_t i = 0; i < shape_.nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t k = i * ny + j;
      out[k] = -sx_[i] * gx_[k] - sy_[j] * gy_[k];
    }
}

LinearOperator StretchedLaplacian::as_operator() const {
  return {shape_, [this](const Field& in, Field& out) { apply(in, out); }};
}

// ---------------------------------------------------------------------------
// Pml2Solver

namespace {

FourierMultiplier neg_laplacian(const Grid1D& g) { return -1.0 * op_second_derivative(g); }
FourierMultiplier neg_laplacian(const Grid2D& g) { return -1.0 * op_laplacian(g); }

AbsorptionProfile sample_checked(const Grid1D& g, const Pml2Params& p) {
  p.validate();
  return sample_profile(g, p.profile, ProfileConsumer::stretch_only);
}

}  // namespace

Pml2Solver::Pml2Solver(Shape shape, const Pml2Params& params, AbsorptionProfile px, AbsorptionProfile py,
                       StretchedLaplacian lap, FourierMultiplier neg_lap)
    : shape_(shape),
      params_(params),
      profile_x_(std::move(px)),
      profile_y_(std::move(py)),
      laplacian_(std::move(lap)),
      fft_(shape) {
  const double e2 = params.eps * params.eps;
  diag_ = e2 / (params.tau * params.tau) + 1.0 / (2.0 * e2);
  std::vector<Complex> p(neg_lap.size());
  for (std::size_t l = 0; l < p.size(); ++l) p[l] = 1.0 / (diag_ + 0.5 * neg_lap[l].real());
  precond_symbol_ = FourierMultiplier(shape, std::move(p));
}

Pml2Solver::Pml2Solver(const Grid1D& g, const Pml2Params& params)
    : Pml2Solver(shape_of(g), params, sample_checked(g, params), AbsorptionProfile(params.profile, {}, {}),
                 StretchedLaplacian(g, sample_profile(g, params.profile).stretch()), neg_laplacian(g)) {}

Pml2Solver::Pml2Solver(const Grid2D& g, const Pml2Params& params)
    : Pml2Solver(shape_of(g), params, sample_checked(g.x, params), sample_checked(g.y, params),
                 StretchedLaplacian(g, sample_profile(g.x, params.profile).stretch(),
                                    sample_profile(g.y, params.profile).stretch()),
                 neg_laplacian(g)) {}

Pml2Solver Pml2Solver::free_field(const Grid1D& g, const Pml2Params& params) {
  Pml2Params p = params;
  p.profile.shift = 1.0;
  p.validate();
  const AbsorptionProfile zero = zero_profile(g);
  return Pml2Solver(shape_of(g), p, zero, AbsorptionProfile(p.profile, {}, {}), StretchedLaplacian(g, zero.stretch()),
                    neg_laplacian(g));
}

Pml2Solver Pml2Solver::free_field(const Grid2D& g, const Pml2Params& params) {
  Pml2Params p = params;
  p.profile.shift = 1.0;
  p.validate();
  const AbsorptionProfile zx = zero_profile(g.x), zy = zero_profile(g.y);
  return Pml2Solver(shape_of(g), p, zx, zy, StretchedLaplacian(g, zx.stretch(), zy.stretch()), neg_laplacian(g));
}

Field Pml2Solver::step_rhs(const Field& u) const {
  const double e2 = params_.eps * params_.eps;
  const double a = 2.0 * e2 / (params_.tau * params_.tau);
  Field r(u.shape());
  for (std::size_t j = 0; j < u.size(); ++j) r[j] = a * u[j] - params_.lambda * std::norm(u[j]) * u[j];
  return r;
}

LinearOperator Pml2Solver::system_operator() const {
  return {shape_, [this](const Field& in, Field& out) {
            laplacian_.apply(in, out);
            for (std::size_t j = 0; j < in.size(); ++j) out[j] = diag_ * in[j] + 0.5 * out[j];
          }};
}

LinearOperator Pml2Solver::preconditioner() const {
  return {shape_, [this](const Field& in, Field& out) {
            out = in;
            fft_.apply(out.values(), precond_symbol_);
          }};
}

Pml2State Pml2Solver::first_step_classical(const Field& u0, const Field& v0) const {
  if (params_.eps != 1.0) throw ConfigError("the Taylor starting value applies to the classical scaling only");
  if (u0.shape() != shape_ || v0.shape() != shape_) throw ContractViolation("first_step: shape mismatch");
  const double tau = params_.tau;
  const Field au = laplacian_(u0);
  Field u1(shape_);
  for (std::size_t j = 0; j < u0.size(); ++j) {
    const Complex cubic = params_.lambda * std::norm(u0[j]) * u0[j];
    u1[j] = u0[j] + tau * v0[j] - 0.5 * tau * tau * (au[j] + u0[j] + cubic);
  }
  return {u0, std::move(u1), 1};
}

Pml2State Pml2Solver::first_step_filtered(const Field& u0, const Field& v0) const {
  const double eps = params_.eps;
  if (!(eps < 1.0)) throw ConfigError("the filtered starting value requires epsilon < 1");
  if (u0.shape() != shape_ || v0.shape() != shape_) throw ContractViolation("first_step: shape mismatch");
  const double tau = params_.tau;
  const double e2 = eps * eps;
  const double s1 = 0.5 * tau * std::sin(tau / e2);
  const double s2 = 0.5 * tau * std::sin(tau / (e2 * e2));
  const Field au = laplacian_(u0);
  Field u1(shape_);
  for (std::size_t j = 0; j < u0.size(); ++j) {
    const Complex cubic = params_.lambda * std::norm(u0[j]) * u0[j];
    u1[j] = u0[j] + tau * v0[j] - s1 * (au[j] + cubic) - s2 * u0[j];
  }
  return {u0, std::move(u1), 1};
}

Pml2State Pml2Solver::first_step(const Field& u0, const Field& v0) const {
  return params_.eps == 1.0 ? first_step_classical(u0, v0) : first_step_filtered(u0, v0);
}

KrylovReport Pml2Solver::advance(Pml2State& s) const {
  if (s.u_prev.shape() != shape_ || s.u_curr.shape() != shape_)
    throw ContractViolation("Pml2Solver::advance: state does not live on this grid");

  const LinearOperator g = system_operator();
  const LinearOperator p = preconditioner();
  Field rhs = step_rhs(s.u_curr);
  Field base(shape_);
  if (params_.increment_form) {
    base = Complex(2.0) * s.u_curr;
    rhs -= g(base);
  }
  auto [w, report] = gmres_solve(g, params_.use_preconditioner ? &p : nullptr, rhs, params_.krylov);
  if (params_.increment_form) w += base;
  if (!report.converged)
    throw SolverDivergence("GMRES did not reach tol " + std::to_string(params_.krylov.tol) + " within " +
                           std::to_string(report.iterations) + " iterations at time index " +
                           std::to_string(s.time_index) + " (residual " + std::to_string(report.final_residual) +
                           ")");
  w -= s.u_prev;
  s.u_prev = std::move(s.u_curr);
  s.u_curr = std::move(w);
  ++s.time_index;

  if (!s.u_curr.all_finite()) throw BlowUpError("FD-FP produced non-finite values", s.time_index);
  if (s.u_curr.max_abs() > params_.blowup_amplitude)
    throw BlowUpError("FD-FP amplitude exceeded the blow-up threshold", s.time_index);
  return report;
}

// ---------------------------------------------------------------------------

std::pair<Field, Field> build_rotating_initial_data(const Grid2D& g, const Field& psi0, const Field& psi1,
                                                    double omega) {
  const Shape shape = shape_of(g);
  if (psi0.shape() != shape || psi1.shape() != shape)
    throw ContractViolation("build_rotating_initial_data: fields are not on the 2D grid");
  Transform fft(shape);
  const Field gx = apply_multiplier(fft, psi0, op_partial_x(g));
  const Field gy = apply_multiplier(fft, psi0, op_partial_y(g));
  Field v0(shape);
  const std::size_t ny = g.y.size();
  for (std::size_t i = 0; i < g.x.size(); ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t k = i * ny + j;
      const double x = g.x.node(i), y = g.y.node(j);
      v0[k] = omega * (gx[k] * y - gy[k] * x) + psi1[k];
    }
  return {psi0, std::move(v0)};
}

std::vector<StabilitySample> stability_probe(const Grid1D& g, Pml2Params params, const Field& u0, const Field& v0,
                                             double t_final, double cap) {
  params.allow_complex_shift = true;
  params.blowup_amplitude = cap;
  const Pml2Solver solver(g, params);
  const auto steps = static_cast<long>(std::llround(t_final / params.tau));

  std::vector<StabilitySample> out;
  out.push_back({0.0, std::min(u0.max_abs(), cap)});
  bool blown = false;
  Pml2State state;
  try {
    state = solver.first_step(u0, v0);
    out.push_back({params.tau, std::min(state.u_curr.max_abs(), cap)});
    blown = !state.u_curr.all_finite() || state.u_curr.max_abs() >= cap;
  } catch (const std::runtime_error&) {
    blown = true;
  }
  for (long n = static_cast<long>(out.size()); n <= steps; ++n) {
    const double t = static_cast<double>(n) * params.tau;
    if (!blown) {
      try {
        solver.advance(state);
        out.push_back({t, std::min(state.u_curr.max_abs(), cap)});
        continue;
      } catch (const BlowUpError&) {
        blown = true;
      } catch (const SolverDivergence&) {
        blown = true;
      }
    }
    out.push_back({t, cap});
  }
  return out;
}

}  // namespace kgpml
