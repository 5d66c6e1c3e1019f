// SPDX-License-Identifier: Apache-2.0
#include "kgpml/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "kgpml/errors.hpp"

namespace kgpml {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void require_same_shape(Shape a, Shape b, const char* where) {
  if (a != b) throw ContractViolation(std::string(where) + ": shape mismatch");
}

template <class Symbol>
FourierMultiplier symbol_1d(const Grid1D& g, Symbol&& s) {
  std::vector<Complex> f(g.size());
  const auto& mu = g.wavenumbers();
  for (std::size_t l = 0; l < g.size(); ++l) f[l] = s(mu[l], l);
  return FourierMultiplier(shape_of(g), std::move(f));
}

template <class Symbol>
FourierMultiplier symbol_2d(const Grid2D& g, Symbol&& s) {
  const std::size_t nx = g.x.size(), ny = g.y.size();
  std::vector<Complex> f(nx * ny);
  const auto& mx = g.x.wavenumbers();
  const auto& my = g.y.wavenumbers();
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) f[i * ny + j] = s(mx[i], my[j], i, j);
  return FourierMultiplier(shape_of(g), std::move(f));
}

void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw ConfigError("epsilon must lie in (0, 1], got " + std::to_string(eps));
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid1D

Grid1D::Grid1D(double half_width_total, std::size_t num_nodes) : half_width_(half_width_total) {
  if (!(half_width_total > 0.0) || !std::isfinite(half_width_total))
    throw ConfigError("grid half-width must be positive");
  if (num_nodes < 4 || num_nodes % 2 != 0)
    throw ConfigError("grid node count must be even and >= 4, got " + std::to_string(num_nodes));

  mesh_ = 2.0 * half_width_total / static_cast<double>(num_nodes);
  nodes_.resize(num_nodes);
  wavenumbers_.resize(num_nodes);
  const auto n = static_cast<long>(num_nodes);
  for (long j = 0; j < n; ++j) {
    nodes_[j] = -half_width_total + static_cast<double>(j) * mesh_;
    const long l = j < n / 2 ? j : j - n;
    wavenumbers_[j] = std::numbers::pi * static_cast<double>(l) / half_width_total;
  }
}

Grid1D make_grid(double half_width_total, std::size_t num_nodes) {
  return Grid1D(half_width_total, num_nodes);
}

// ---------------------------------------------------------------------------
// Field

Field::Field(Shape shape, std::vector<Complex> values) : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.size()) throw ContractViolation("Field: value count does not match shape");
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& z : values_) m = std::max(m, std::abs(z));
  return m;
}

double Field::max_imag() const noexcept {
  double m = 0.0;
  for (const auto& z : values_) m = std::max(m, std::abs(z.imag()));
  return m;
}

Field& Field::operator+=(const Field& other) {
  require_same_shape(shape_, other.shape_, "Field::operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_shape(shape_, other.shape_, "Field::operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(Complex s) {
  for (auto& z : values_) z *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Complex s, Field a) { return a *= s; }

double norm2(const Field& f) {
  double s = 0.0;
  for (const auto& z : f) s += std::norm(z);
  return std::sqrt(s);
}

Complex dot(const Field& a, const Field& b) {
  require_same_shape(a.shape(), b.shape(), "dot");
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// FourierMultiplier

FourierMultiplier::FourierMultiplier(Shape shape, std::vector<Complex> factors)
    : shape_(shape), factors_(std::move(factors)) {
  if (factors_.size() != shape_.size()) throw ContractViolation("FourierMultiplier: factor count does not match shape");
}

FourierMultiplier operator*(const FourierMultiplier& a, const FourierMultiplier& b) {
  require_same_shape(a.shape_, b.shape_, "FourierMultiplier::operator*");
  std::vector<Complex> f(a.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = a.factors_[i] * b.factors_[i];
  return FourierMultiplier(a.shape_, std::move(f));
}

FourierMultiplier operator+(const FourierMultiplier& a, const FourierMultiplier& b) {
  require_same_shape(a.shape_, b.shape_, "FourierMultiplier::operator+");
  std::vector<Complex> f(a.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = a.factors_[i] + b.factors_[i];
  return FourierMultiplier(a.shape_, std::move(f));
}

FourierMultiplier operator*(Complex s, const FourierMultiplier& a) {
  std::vector<Complex> f(a.factors_);
  for (auto& z : f) z *= s;
  return FourierMultiplier(a.shape_, std::move(f));
}

FourierMultiplier FourierMultiplier::inverse() const {
  std::vector<Complex> f(factors_.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (factors_[i] == Complex{}) throw ContractViolation("FourierMultiplier::inverse: zero factor");
    f[i] = 1.0 / factors_[i];
  }
  return FourierMultiplier(shape_, std::move(f));
}

FourierMultiplier FourierMultiplier::constant(Shape shape, Complex value) {
  return FourierMultiplier(shape, std::vector<Complex>(shape.size(), value));
}

// ---------------------------------------------------------------------------
// Transform

Transform::Transform(Shape shape) : shape_(shape) {
  if (shape.size() == 0) throw ContractViolation("Transform: empty shape");
  std::vector<Complex> scratch(shape.size());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  // ESTIMATE keeps plan selection, and therefore roundoff, reproducible.
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  if (shape.is_2d()) {
    const int nx = static_cast<int>(shape.nx), ny = static_cast<int>(shape.ny);
    forward_plan_ = fftw_plan_dft_2d(nx, ny, buf, buf, FFTW_FORWARD, flags);
    backward_plan_ = fftw_plan_dft_2d(nx, ny, buf, buf, FFTW_BACKWARD, flags);
  } else {
    const int n = static_cast<int>(shape.nx);
    forward_plan_ = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags);
    backward_plan_ = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags);
  }
}

Transform::~Transform() { release(); }

Transform::Transform(Transform&& other) noexcept
    : shape_(other.shape_), forward_plan_(other.forward_plan_), backward_plan_(other.backward_plan_) {
  other.forward_plan_ = nullptr;
  other.backward_plan_ = nullptr;
}

Transform& Transform::operator=(Transform&& other) noexcept {
  if (this != &other) {
    release();
    shape_ = other.shape_;
    forward_plan_ = other.forward_plan_;
    backward_plan_ = other.backward_plan_;
    other.forward_plan_ = nullptr;
    other.backward_plan_ = nullptr;
  }
  return *this;
}

void Transform::release() noexcept {
  if (!forward_plan_ && !backward_plan_) return;
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  forward_plan_ = backward_plan_ = nullptr;
}

void Transform::forward(std::span<Complex> data) const {
  if (data.size() != shape_.size()) throw ContractViolation("Transform::forward: size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), buf, buf);
}

void Transform::backward(std::span<Complex> data) const {
  if (data.size() != shape_.size()) throw ContractViolation("Transform::backward: size mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), buf, buf);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& z : data) z *= scale;
}

void Transform::apply(std::span<Complex> data, const FourierMultiplier& m) const {
  if (m.shape() != shape_) throw ContractViolation("Transform::apply: multiplier shape mismatch");
  forward(data);
  const auto f = m.factors();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= f[i];
  backward(data);
}

Field apply_multiplier(const Transform& t, const Field& f, const FourierMultiplier& m) {
  require_same_shape(f.shape(), m.shape(), "apply_multiplier");
  Field out = f;
  t.apply(out.values(), m);
  return out;
}

Field apply_multiplier(const Field& f, const FourierMultiplier& m) {
  require_same_shape(f.shape(), m.shape(), "apply_multiplier");
  Transform t(f.shape());
  return apply_multiplier(t, f, m);
}

// ---------------------------------------------------------------------------
// Operator symbols

FourierMultiplier op_first_derivative(const Grid1D& g) {
  const std::size_t nyq = g.nyquist_index();
  return symbol_1d(g, [nyq](double mu, std::size_t l) { return l == nyq ? Complex{} : Complex(0.0, mu); });
}

FourierMultiplier op_second_derivative(const Grid1D& g) {
  return symbol_1d(g, [](double mu, std::size_t) { return Complex(-mu * mu); });
}

FourierMultiplier op_bracket(const Grid1D& g) {
  return symbol_1d(g, [](double mu, std::size_t) { return Complex(std::sqrt(1.0 + mu * mu)); });
}

FourierMultiplier op_bracket_eps(const Grid1D& g, double eps) {
  check_eps(eps);
  const double e2 = eps * eps;
  return symbol_1d(g, [e2](double mu, std::size_t) { return Complex(std::sqrt(1.0 + e2 * mu * mu) / e2); });
}

FourierMultiplier op_partial_x(const Grid2D& g) {
  const std::size_t nyq = g.x.nyquist_index();
  return symbol_2d(g, [nyq](double mx, double, std::size_t i, std::size_t) {
    return i == nyq ? Complex{} : Complex(0.0, mx);
  });
}

FourierMultiplier op_partial_y(const Grid2D& g) {
  const std::size_t nyq = g.y.nyquist_index();
  return symbol_2d(g, [nyq](double, double my, std::size_t, std::size_t j) {
    return j == nyq ? Complex{} : Complex(0.0, my);
  });
}

FourierMultiplier op_laplacian(const Grid2D& g) {
  return symbol_2d(g, [](double mx, double my, std::size_t, std::size_t) { return Complex(-mx * mx - my * my); });
}

FourierMultiplier op_bracket(const Grid2D& g) {
  return symbol_2d(g, [](double mx, double my, std::size_t, std::size_t) {
    return Complex(std::sqrt(1.0 + mx * mx + my * my));
  });
}

FourierMultiplier op_bracket_eps(const Grid2D& g, double eps) {
  check_eps(eps);
  const double e2 = eps * eps;
  return symbol_2d(g, [e2](double mx, double my, std::size_t, std::size_t) {
    return Complex(std::sqrt(1.0 + e2 * (mx * mx + my * my)) / e2);
  });
}

FourierMultiplier op_trig(const FourierMultiplier& m, double tau, TrigKind kind) {
  std::vector<Complex> f(m.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = m[i].real();
    switch (kind) {
      case TrigKind::cos: f[i] = std::cos(w * tau); break;
      case TrigKind::sinc: f[i] = std::sin(w * tau) / w; break;
      case TrigKind::sin_times: f[i] = w * std::sin(w * tau); break;
    }
  }
  return FourierMultiplier(m.shape(), std::move(f));
}

}  // namespace kgpml
