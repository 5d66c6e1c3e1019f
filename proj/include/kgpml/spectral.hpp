// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file spectral.hpp
 * @brief Periodic collocation grids, nodal fields and Fourier multipliers.
 *
 * All spatial operators of both PML schemes are diagonal in Fourier space
 * (derivatives, the Klein-Gordon bracket and trigonometric functions of it),
 * or pointwise in physical space (absorption profiles). This header provides
 * the first kind; pointwise products are plain loops over Field values.
 *
 * 2D fields are stored row-major as an [nx][ny] array: value (ix, iy) lives
 * at index ix * ny + iy. 1D fields use ny == 1.
 */

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace kgpml {

using Complex = std::complex<double>;

/// Uniform periodic grid x_j = -L* + j h on [-L*, L*), h = 2 L* / N.
class Grid1D {
public:
  /// Throws ConfigError unless N >= 4, N even and L* > 0.
  Grid1D(double half_width_total, std::size_t num_nodes);

  double half_width_total() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double mesh() const noexcept { return mesh_; }
  double node(std::size_t j) const { return nodes_[j]; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }

  /// Wavenumbers pi l / L* in FFT order: l = 0, 1, ..., N/2-1, -N/2, ..., -1.
  const std::vector<double>& wavenumbers() const noexcept { return wavenumbers_; }

  /// Index of the Nyquist mode (l = -N/2) in FFT order.
  std::size_t nyquist_index() const noexcept { return nodes_.size() / 2; }

  friend bool operator==(const Grid1D& a, const Grid1D& b) {
    return a.half_width_ == b.half_width_ && a.nodes_.size() == b.nodes_.size();
  }

private:
  double half_width_;
  double mesh_;
  std::vector<double> nodes_;
  std::vector<double> wavenumbers_;
};

Grid1D make_grid(double half_width_total, std::size_t num_nodes);

struct Grid2D {
  Grid1D x;
  Grid1D y;

  std::size_t size() const noexcept { return x.size() * y.size(); }
  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

struct Shape {
  std::size_t nx = 0;
  std::size_t ny = 1;

  std::size_t size() const noexcept { return nx * ny; }
  bool is_2d() const noexcept { return ny > 1; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

inline Shape shape_of(const Grid1D& g) { return {g.size(), 1}; }
inline Shape shape_of(const Grid2D& g) { return {g.x.size(), g.y.size()}; }

/// Complex nodal values of one function at one time level.
class Field {
public:
  Field() = default;
  explicit Field(Shape shape, Complex fill = {}) : shape_(shape), values_(shape.size(), fill) {}
  Field(Shape shape, std::vector<Complex> values);

  template <class F>
  static Field sample(const Grid1D& g, F&& f) {
    Field out(shape_of(g));
    for (std::size_t j = 0; j < g.size(); ++j) out.values_[j] = Complex(f(g.node(j)));
    return out;
  }

  template <class F>
  static Field sample(const Grid2D& g, F&& f) {
    Field out(shape_of(g));
    const std::size_t ny = g.y.size();
    for (std::size_t i = 0; i < g.x.size(); ++i)
      for (std::size_t j = 0; j < ny; ++j) out.values_[i * ny + j] = Complex(f(g.x.node(i), g.y.node(j)));
    return out;
  }

  Shape shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return values_.size(); }

  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  Complex& at(std::size_t ix, std::size_t iy) { return values_[ix * shape_.ny + iy]; }
  const Complex& at(std::size_t ix, std::size_t iy) const { return values_[ix * shape_.ny + iy]; }

  std::span<Complex> values() noexcept { return values_; }
  std::span<const Complex> values() const noexcept { return values_; }
  Complex* data() noexcept { return values_.data(); }
  const Complex* data() const noexcept { return values_.data(); }
  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  bool all_finite() const noexcept;
  double max_abs() const noexcept;
  /// Largest |Im| over all entries.
  double max_imag() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(Complex s);

private:
  Shape shape_;
  std::vector<Complex> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Complex s, Field a);

/// Euclidean norm of the value vector (no mesh weight).
double norm2(const Field& f);
/// Hermitian inner product sum conj(a_i) b_i.
Complex dot(const Field& a, const Field& b);

/// Per-mode factors in the transform's natural (FFT) ordering.
class FourierMultiplier {
public:
  FourierMultiplier() = default;
  FourierMultiplier(Shape shape, std::vector<Complex> factors);

  Shape shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return factors_.size(); }
  const Complex& operator[](std::size_t i) const { return factors_[i]; }
  std::span<const Complex> factors() const noexcept { return factors_; }

  /// Mode-wise product (composition of the two operators).
  friend FourierMultiplier operator*(const FourierMultiplier& a, const FourierMultiplier& b);
  friend FourierMultiplier operator+(const FourierMultiplier& a, const FourierMultiplier& b);
  friend FourierMultiplier operator*(Complex s, const FourierMultiplier& a);
  /// Mode-wise reciprocal; throws ContractViolation on a zero factor.
  FourierMultiplier inverse() const;

  static FourierMultiplier constant(Shape shape, Complex value);

private:
  Shape shape_;
  std::vector<Complex> factors_;
};

/// Owns FFTW plans for one shape. Plans are created under a global lock;
/// executing them is thread-safe. One instance per solver.
class Transform {
public:
  explicit Transform(Shape shape);
  ~Transform();
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;
  Transform(Transform&& other) noexcept;
  Transform& operator=(Transform&& other) noexcept;

  Shape shape() const noexcept { return shape_; }

  /// Unnormalized forward DFT, in place.
  void forward(std::span<Complex> data) const;
  /// Inverse DFT including the 1/size normalization, in place.
  void backward(std::span<Complex> data) const;
  /// data <- IFFT(m .* FFT(data))
  void apply(std::span<Complex> data, const FourierMultiplier& m) const;

private:
  void release() noexcept;

  Shape shape_;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

Field apply_multiplier(const Transform& t, const Field& f, const FourierMultiplier& m);
/// Convenience overload that plans a transform on the fly.
Field apply_multiplier(const Field& f, const FourierMultiplier& m);

// 1D operator symbols.
FourierMultiplier op_first_derivative(const Grid1D& g);
FourierMultiplier op_second_derivative(const Grid1D& g);
FourierMultiplier op_bracket(const Grid1D& g);
FourierMultiplier op_bracket_eps(const Grid1D& g, double eps);

// 2D operator symbols.
FourierMultiplier op_partial_x(const Grid2D& g);
FourierMultiplier op_partial_y(const Grid2D& g);
FourierMultiplier op_laplacian(const Grid2D& g);
FourierMultiplier op_bracket(const Grid2D& g);
FourierMultiplier op_bracket_eps(const Grid2D& g, double eps);

enum class TrigKind { cos, sinc, sin_times };

/// Per mode cos(w tau), sin(w tau)/w or w sin(w tau) for the (real, positive) factors w of m.
FourierMultiplier op_trig(const FourierMultiplier& m, double tau, TrigKind kind);

}  // namespace kgpml
