// SPDX-License-Identifier: Apache-2.0
#include "kgpml/pml1_ewi.hpp"

#include <cmath>
#include <vector>

#include "kgpml/errors.hpp"

namespace kgpml {

Pml1State init_pml1(const Field& u0, const Field& v0, double alpha) {
  if (u0.shape() != v0.shape()) throw ContractViolation("init_pml1: u0 and v0 live on different grids");
  if (!(alpha >= 0.0)) throw ConfigError("PML-I shift alpha must be nonnegative");
  Pml1State s;
  s.u = u0;
  s.v = v0;
  s.eta1 = Field(u0.shape());
  s.eta2 = Field(u0.shape());
  s.alpha = alpha;
  return s;
}

Pml1Stepper::Pml1Stepper(const Grid1D& grid, const Pml1Params& params)
    : grid_(grid),
      params_(params),
      profile_(sample_profile(grid, params.profile, ProfileConsumer::needs_sigma)),
      fft_(shape_of(grid)) {
  if (!(params.tau > 0.0)) throw ConfigError("time step tau must be positive");
  if (!(params.lambda >= 0.0)) throw ConfigError("nonlinearity lambda must be nonnegative");
  if (params.profile.shift != Complex(1.0, 0.0))
    throw ConfigError("PML-I does not use the complex shift R; leave it at 1");
  const FourierMultiplier bracket =
      params.eps == 1.0 ? op_bracket(grid) : op_bracket_eps(grid, params.eps);
  dx_ = op_first_derivative(grid);
  cos_ = op_trig(bracket, params.tau, TrigKind::cos);
  sinc_ = op_trig(bracket, params.tau, TrigKind::sinc);
  sin_times_ = op_trig(bracket, params.tau, TrigKind::sin_times);
}

Field Pml1Stepper::forcing_without_v(const Field& u, const Field& eta1, const Field& eta2, double alpha) const {
  const auto& sigma = profile_.sigma();
  const double e2 = params_.eps * params_.eps;
  const double lambda = params_.lambda;

  Field flux(u.shape());
  for (std::size_t j = 0; j < u.size(); ++j) flux[j] = sigma[j] * eta1[j];
  fft_.apply(flux.values(), dx_);

  Field f(u.shape());
  for (std::size_t j = 0; j < u.size(); ++j) {
    f[j] = sigma[j] * (eta2[j] + e2 * alpha * u[j]) + flux[j] - lambda * std::norm(u[j]) * u[j];
  }
  return f;
}

void Pml1Stepper::advance(Pml1State& s) const {
  const Shape shape = shape_of(grid_);
  if (s.u.shape() != shape || s.v.shape() != shape || s.eta1.shape() != shape || s.eta2.shape() != shape)
    throw ContractViolation("Pml1Stepper::advance: state does not live on this grid");

  const auto& sigma = profile_.sigma();
  const double tau = params_.tau;
  const double e2 = params_.eps * params_.eps;
  const double alpha = s.alpha;
  const double lambda = params_.lambda;
  const double q = tau / (2.0 * e2);
  const double c_eta = e2 * alpha * alpha + 1.0 / e2;
  const std::size_t n = grid_.size();

  Field f_old = forcing_without_v(s.u, s.eta1, s.eta2, alpha);
  for (std::size_t j = 0; j < n; ++j) f_old[j] -= sigma[j] * e2 * s.v[j];

  std::vector<Complex> uh(s.u.begin(), s.u.end());
  std::vector<Complex> vh(s.v.begin(), s.v.end());
  std::vector<Complex> fh(f_old.begin(), f_old.end());
  fft_.forward(uh);
  fft_.forward(vh);
  fft_.forward(fh);

  std::vector<Complex> u_new(n), du_new(n), v_star(n), du_old(n);
  for (std::size_t l = 0; l < n; ++l) {
    u_new[l] = cos_[l] * uh[l] + sinc_[l] * vh[l] + q * sinc_[l] * fh[l];
    du_new[l] = dx_[l] * u_new[l];
    v_star[l] = -sin_times_[l] * uh[l] + cos_[l] * vh[l] + q * cos_[l] * fh[l];
    du_old[l] = dx_[l] * uh[l];
  }
  fft_.backward(u_new);
  fft_.backward(du_new);
  fft_.backward(v_star);
  fft_.backward(du_old);

  Field u1(shape, std::move(u_new));
  Field eta1(shape), eta2(shape);
  const double decay2 = std::exp(-alpha * tau);
  for (std::size_t j = 0; j < n; ++j) {
    const double decay1 = std::exp(-(sigma[j] + alpha) * tau);
    eta1[j] = decay1 * s.eta1[j] - 0.5 * tau * (decay1 * du_old[j] + du_new[j]);
    const Complex src_old = c_eta * s.u[j] + lambda * std::norm(s.u[j]) * s.u[j];
    const Complex src_new = c_eta * u1[j] + lambda * std::norm(u1[j]) * u1[j];
    eta2[j] = decay2 * s.eta2[j] - 0.5 * tau * (decay2 * src_old + src_new);
  }

  const Field g_new = forcing_without_v(u1, eta1, eta2, alpha);
  Field v1(shape);
  for (std::size_t j = 0; j < n; ++j) v1[j] = (v_star[j] + q * g_new[j]) / (1.0 + 0.5 * tau * sigma[j]);

  s.u = std::move(u1);
  s.v = std::move(v1);
  s.eta1 = std::move(eta1);
  s.eta2 = std::move(eta2);
  ++s.time_index;

  if (!s.u.all_finite() || !s.v.all_finite() || !s.eta1.all_finite() || !s.eta2.all_finite())
    throw BlowUpError("EWI-FP produced non-finite values", s.time_index);
  if (s.u.max_abs() > params_.blowup_amplitude)
    throw BlowUpError("EWI-FP amplitude exceeded the blow-up threshold", s.time_index);
}

std::complex<double> damping_factor(std::complex<double> s, double alpha) {
  if (!(s.real() > 0.0)) throw ConfigError("damping_factor requires Re(s) > 0");
  return -std::sqrt(s * s + 1.0) / (s + alpha);
}

}  // namespace kgpml
