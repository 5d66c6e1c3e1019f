// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "kgpml/spectral.hpp"

namespace kgpml::test {

inline Field random_field(Shape shape, unsigned seed, bool real = false) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field f(shape);
  for (auto& z : f) z = Complex(dist(gen), real ? 0.0 : dist(gen));
  return f;
}

inline double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace kgpml::test
