// SPDX-License-Identifier: Apache-2.0
#include "kgpml/reference.hpp"

#include <cmath>
#include <fmt/format.h>

#include "kgpml/errors.hpp"
#include "kgpml/pml2_fd.hpp"

namespace kgpml {

// ---------------------------------------------------------------------------
// FreeFieldEwi

FreeFieldEwi::FreeFieldEwi(Shape shape, const FourierMultiplier& bracket, double lambda, double eps, double tau)
    : shape_(shape),
      lambda_(lambda),
      eps_(eps),
      tau_(tau),
      fft_(shape),
      cos_(op_trig(bracket, tau, TrigKind::cos)),
      sinc_(op_trig(bracket, tau, TrigKind::sinc)),
      sin_times_(op_trig(bracket, tau, TrigKind::sin_times)) {
  if (!(tau > 0.0)) throw ConfigError("time step tau must be positive");
}

FreeFieldEwi::FreeFieldEwi(const Grid1D& g, double lambda, double eps, double tau)
    : FreeFieldEwi(shape_of(g), eps == 1.0 ? op_bracket(g) : op_bracket_eps(g, eps), lambda, eps, tau) {}

FreeFieldEwi::FreeFieldEwi(const Grid2D& g, double lambda, double eps, double tau)
    : FreeFieldEwi(shape_of(g), eps == 1.0 ? op_bracket(g) : op_bracket_eps(g, eps), lambda, eps, tau) {}

Field FreeFieldEwi::forcing(const Field& u) const {
  Field f(u.shape());
  for (std::size_t j = 0; j < u.size(); ++j) f[j] = -lambda_ * std::norm(u[j]) * u[j];
  return f;
}

void FreeFieldEwi::advance(Field& u, Field& v) const {
  if (u.shape() != shape_ || v.shape() != shape_) throw ContractViolation("FreeFieldEwi::advance: shape mismatch");
  const double q = tau_ / (2.0 * eps_ * eps_);
  const std::size_t n = u.size();

  Field fh = forcing(u);
  fft_.forward(fh.values());
  fft_.forward(u.values());
  fft_.forward(v.values());
  for (std::size_t l = 0; l < n; ++l) {
    const Complex uh = u[l], vh = v[l];
    u[l] = cos_[l] * uh + sinc_[l] * vh + q * sinc_[l] * fh[l];
    v[l] = -sin_times_[l] * uh + cos_[l] * vh + q * cos_[l] * fh[l];
  }
  fft_.backward(u.values());
  fft_.backward(v.values());
  const Field f_new = forcing(u);
  for (std::size_t j = 0; j < n; ++j) v[j] += q * f_new[j];
}

// ---------------------------------------------------------------------------
// Grids and restriction

Grid1D enlarged_grid(const Grid1D& target, double physical_half_width, double factor) {
  const double h = target.mesh();
  const double Ls = target.half_width_total();
  const double extra = std::round((factor * physical_half_width - Ls) / h);
  if (extra < 0) throw ConfigError("enlarged domain would be smaller than the PML domain");
  return Grid1D(Ls + extra * h, target.size() + 2 * static_cast<std::size_t>(extra));
}

std::size_t enlarged_offset(const Grid1D& target, const Grid1D& enlarged) {
  if (std::abs(target.mesh() - enlarged.mesh()) > 1e-12 * target.mesh())
    throw ContractViolation("enlarged grid mesh differs from target mesh");
  return (enlarged.size() - target.size()) / 2;
}

Field restrict_to(const Field& f, const Grid1D& enlarged, const Grid1D& target) {
  if (f.shape() != shape_of(enlarged)) throw ContractViolation("restrict_to: field is not on the enlarged grid");
  const std::size_t off = enlarged_offset(target, enlarged);
  Field out(shape_of(target));
  for (std::size_t j = 0; j < target.size(); ++j) out[j] = f[off + j];
  return out;
}

Field restrict_to(const Field& f, const Grid2D& enlarged, const Grid2D& target) {
  if (f.shape() != shape_of(enlarged)) throw ContractViolation("restrict_to: field is not on the enlarged grid");
  const std::size_t ox = enlarged_offset(target.x, enlarged.x);
  const std::size_t oy = enlarged_offset(target.y, enlarged.y);
  Field out(shape_of(target));
  for (std::size_t i = 0; i < target.x.size(); ++i)
    for (std::size_t j = 0; j < target.y.size(); ++j) out.at(i, j) = f.at(ox + i, oy + j);
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

template <class Visit>
void for_window(const Grid1D& g, double L, Visit&& visit) {
  for (std::size_t j = 0; j < g.size(); ++j)
    if (std::abs(g.node(j)) < L) visit(j);
}

template <class Visit>
void for_window(const Grid2D& g, double L, Visit&& visit) {
  const std::size_t ny = g.y.size();
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    if (!(std::abs(g.x.node(i)) < L)) continue;
    for (std::size_t j = 0; j < ny; ++j)
      if (std::abs(g.y.node(j)) < L) visit(i * ny + j);
  }
}

template <class Grid>
std::optional<double> rel_l2(const Grid& g, const Field& u_num, const Field& u_ref, double L) {
  if (u_num.shape() != shape_of(g) || u_ref.shape() != shape_of(g))
    throw ContractViolation("rel_l2_error: fields are not on the grid");
  double num = 0.0, den = 0.0;
  for_window(g, L, [&](std::size_t k) {
    num += std::norm(u_ref[k] - u_num[k]);
    den += std::norm(u_ref[k]);
  });
  // The cell measure cancels in the ratio.
  if (den == 0.0) return std::nullopt;
  return std::sqrt(num / den);
}

template <class Grid>
std::optional<double> rel_linf(const Grid& g, const Field& u_num, const Field& u_ref, double L) {
  if (u_num.shape() != shape_of(g) || u_ref.shape() != shape_of(g))
    throw ContractViolation("rel_linf_error: fields are not on the grid");
  double num = 0.0, den = 0.0;
  for_window(g, L, [&](std::size_t k) {
    num = std::max(num, std::abs(u_ref[k] - u_num[k]));
    den = std::max(den, std::abs(u_ref[k]));
  });
  if (den == 0.0) return std::nullopt;
  return num / den;
}

}  // namespace

std::optional<double> rel_l2_error(const Grid1D& g, const Field& u_num, const Field& u_ref, double L) {
  return rel_l2(g, u_num, u_ref, L);
}
std::optional<double> rel_l2_error(const Grid2D& g, const Field& u_num, const Field& u_ref, double L) {
  return rel_l2(g, u_num, u_ref, L);
}
std::optional<double> rel_linf_error(const Grid1D& g, const Field& u_num, const Field& u_ref, double L) {
  return rel_linf(g, u_num, u_ref, L);
}
std::optional<double> rel_linf_error(const Grid2D& g, const Field& u_num, const Field& u_ref, double L) {
  return rel_linf(g, u_num, u_ref, L);
}

double energy_HI(const Grid1D& g, const Field& u, const Field& u_dot, double lambda, double L) {
  if (u.shape() != shape_of(g) || u_dot.shape() != shape_of(g))
    throw ContractViolation("energy_HI: fields are not on the grid");
  const Field ux = apply_multiplier(u, op_first_derivative(g));
  double sum = 0.0;
  for_window(g, L, [&](std::size_t j) {
    const double a2 = std::norm(u[j]);
    sum += std::norm(u_dot[j]) + std::norm(ux[j]) + a2 + 0.5 * lambda * a2 * a2;
  });
  return sum * g.mesh();
}

double energy_HI(const Grid2D& g, const Field& u, const Field& u_dot, double lambda, double L) {
  if (u.shape() != shape_of(g) || u_dot.shape() != shape_of(g))
    throw ContractViolation("energy_HI: fields are not on the grid");
  Transform fft(shape_of(g));
  const Field ux = apply_multiplier(fft, u, op_partial_x(g));
  const Field uy = apply_multiplier(fft, u, op_partial_y(g));
  double sum = 0.0;
  for_window(g, L, [&](std::size_t k) {
    const double a2 = std::norm(u[k]);
    sum += std::norm(u_dot[k]) + std::norm(ux[k]) + std::norm(uy[k]) + a2 + 0.5 * lambda * a2 * a2;
  });
  return sum * g.x.mesh() * g.y.mesh();
}

// ---------------------------------------------------------------------------
// Reference solve

namespace {

double outer_band_amplitude(const Grid1D& g, const Field& u) {
  const double edge = 0.9 * g.half_width_total();
  double m = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (std::abs(g.node(j)) >= edge) m = std::max(m, std::abs(u[j]));
  return m;
}

double outer_band_amplitude(const Grid2D& g, const Field& u) {
  const double ex = 0.9 * g.x.half_width_total(), ey = 0.9 * g.y.half_width_total();
  double m = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i)
    for (std::size_t j = 0; j < g.y.size(); ++j)
      if (std::abs(g.x.node(i)) >= ex || std::abs(g.y.node(j)) >= ey) m = std::max(m, std::abs(u.at(i, j)));
  return m;
}

Grid2D enlarge(const Grid2D& t, double L, double factor) {
  return {enlarged_grid(t.x, L, factor), enlarged_grid(t.y, L, factor)};
}
Grid1D enlarge(const Grid1D& t, double L, double factor) { return enlarged_grid(t, L, factor); }

std::size_t origin_index(const Grid1D& g) { return g.size() / 2; }
std::size_t origin_index(const Grid2D& g) { return (g.x.size() / 2) * g.y.size() + g.y.size() / 2; }

// Advances (u, u_t) on the enlarged grid with either integrator. The FD-FP state
// lags one step behind: u_t at level n needs u^{n+1}.
template <class Grid>
class FreeFieldDriver {
public:
  FreeFieldDriver(const Grid& g, const ReferenceProblem& p, Field u0, Field v0) : scheme_(p.scheme), tau_(p.tau) {
    if (scheme_ == ReferenceScheme::ewi) {
      ewi_.emplace(g, p.lambda, p.eps, p.tau);
      u_ = std::move(u0);
      v_ = std::move(v0);
      return;
    }
    Pml2Params params;
    params.lambda = p.lambda;
    params.eps = p.eps;
    params.tau = p.tau;
    params.krylov = p.krylov;
    fd_.emplace(Pml2Solver::free_field(g, params));
    state_ = fd_->first_step(u0, v0);
    u_ = std::move(u0);
    v_ = std::move(v0);
  }

  const Field& u() const { return u_; }
  const Field& u_dot() const { return v_; }

  void advance() {
    if (ewi_) {
      ewi_->advance(u_, v_);
      return;
    }
    fd_->advance(state_);
    // state_ holds (u^n, u^{n+1}) and u_ becomes u^n.
    Field dot = state_.u_curr - u_;
    dot *= Complex(0.5 / tau_);
    u_ = state_.u_prev;
    v_ = std::move(dot);
  }

private:
  ReferenceScheme scheme_;
  double tau_;
  std::optional<FreeFieldEwi> ewi_;
  std::optional<Pml2Solver> fd_;
  Pml2State state_;
  Field u_, v_;
};

template <class Grid>
ReferenceRun solve_on(const Grid& target, const ReferenceProblem& p, double factor) {
  const Grid big = enlarge(target, p.physical_half_width, factor);
  auto [u0, v0] = p.data.sample(big);
  const long steps = std::lround(p.t_final / p.tau);
  const long stride = std::max(1L, p.snapshot_stride);
  const double u_scale = u0.max_abs();
  const std::size_t origin = origin_index(big);
  FreeFieldDriver<Grid> driver(big, p, std::move(u0), std::move(v0));

  ReferenceRun run{big, {}, {}, {}, {}, 0.0, {}};
  bool warned = false;
  auto snapshot = [&](long n) {
    const Field& u = driver.u();
    const double t = static_cast<double>(n) * p.tau;
    run.times.push_back(t);
    run.window.push_back(restrict_to(u, big, target));
    run.energy.times.push_back(t);
    run.energy.values.push_back(energy_HI(big, u, driver.u_dot(), p.lambda, p.physical_half_width));
    const double band = outer_band_amplitude(big, u);
    run.boundary_amplitude = std::max(run.boundary_amplitude, band);
    if (!warned && band > p.contamination_threshold * u_scale) {
      run.warnings.push_back(fmt::format(
          "reference amplitude {:.3e} near the enlarged boundary at t = {:.4g}; periodic images may "
          "contaminate the physical window later on",
          band, t));
      warned = true;
    }
  };

  run.origin_record.push_back(driver.u()[origin]);
  snapshot(0);
  for (long n = 1; n <= steps; ++n) {
    driver.advance();
    run.origin_record.push_back(driver.u()[origin]);
    if (n % stride == 0 || n == steps) snapshot(n);
  }
  if (!driver.u().all_finite()) throw BlowUpError("reference solve produced non-finite values", steps);
  return run;
}

}  // namespace

ReferenceRun reference_solve(const ReferenceProblem& problem, double enlargement_factor) {
  if (!(enlargement_factor >= 2.0)) throw ConfigError("reference enlargement factor must be >= 2");
  if (!(problem.t_final >= 0.0)) throw ConfigError("final time must be nonnegative");
  return std::visit([&](const auto& target) { return solve_on(target, problem, enlargement_factor); },
                    problem.target);
}

// ---------------------------------------------------------------------------

std::complex<double> dispersion_root(std::complex<double> s) {
  if (s.real() < 0.0) throw ConfigError("dispersion_root requires Re(s) >= 0");
  return -std::sqrt(s * s + 1.0);
}

double phase_velocity_eps(double k, double eps) {
  if (k == 0.0) throw ConfigError("phase velocity is undefined for k = 0");
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("epsilon must lie in (0, 1]");
  const double e2 = eps * eps;
  return std::sqrt(1.0 / (k * k) + e2) / e2;
}

std::array<double, 2> rotate_to_lab_frame(std::array<double, 2> x_tilde, double t, double omega) {
  const double c = std::cos(omega * t), s = std::sin(omega * t);
  return {c * x_tilde[0] + s * x_tilde[1], -s * x_tilde[0] + c * x_tilde[1]};
}

}  // namespace kgpml
