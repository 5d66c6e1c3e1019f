// SPDX-License-Identifier: Apache-2.0
#include "kgpml/absorption.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kgpml/errors.hpp"

namespace kgpml {

void ProfileSpec::validate() const {
  if (!(sigma0 > 0.0)) throw ConfigError("absorption strength sigma0 must be positive");
  if (!(thickness > 0.0)) throw ConfigError("layer thickness delta must be positive");
  if (!(physical_half_width > 0.0)) throw ConfigError("physical half-width L must be positive");
  if (kind == ProfileKind::bermudez && bermudez_order < -1)
    throw ConfigError("Bermudez order must be >= -1, got " + std::to_string(bermudez_order));
}

ProfileSpec polynomial_profile(double sigma0, double thickness, double physical_half_width) {
  ProfileSpec s;
  s.kind = ProfileKind::polynomial;
  s.sigma0 = sigma0;
  s.thickness = thickness;
  s.physical_half_width = physical_half_width;
  s.validate();
  return s;
}

ProfileSpec bermudez_profile(int order, double sigma0, double thickness, double physical_half_width) {
  ProfileSpec s;
  s.kind = ProfileKind::bermudez;
  s.bermudez_order = order;
  s.sigma0 = sigma0;
  s.thickness = thickness;
  s.physical_half_width = physical_half_width;
  s.validate();
  return s;
}

double sigma_polynomial(double x, const ProfileSpec& spec) {
  const double ax = std::abs(x);
  const double L = spec.physical_half_width;
  const double Ls = spec.total_half_width();
  if (ax < L || ax > Ls) return 0.0;
  // 1 - ((|x| - L*)/delta)^2 written without cancellation near |x| = L
  const double y = (ax - L) / spec.thickness;
  const double b = y * (2.0 - y);
  const double b2 = b * b, b4 = b2 * b2;
  return spec.sigma0 * b4 * b4;
}

std::vector<double> bermudez_taylor_coefficients(int order, double thickness) {
  std::vector<double> c;
  double p = 1.0 / thickness;
  for (int j = 0; j <= order; ++j) {
    c.push_back(p);
    p /= thickness;
  }
  return c;
}

double sigma_bermudez(double x, const ProfileSpec& spec) {
  const double ax = std::abs(x);
  const double L = spec.physical_half_width;
  const double Ls = spec.total_half_width();
  if (ax < L) return 0.0;
  if (ax >= Ls) return std::numeric_limits<double>::infinity();

  // -1/z minus its order-k Taylor polynomial about the interface is the geometric-series
  // remainder (y/delta)^(k+1) / (delta - y), which avoids cancelling two O(1/delta) terms.
  const double y = ax - L;
  const double r = std::pow(y / spec.thickness, spec.bermudez_order + 1);
  return spec.sigma0 * r / (Ls - ax);
}

double sigma_value(double x, const ProfileSpec& spec) {
  return spec.kind == ProfileKind::polynomial ? sigma_polynomial(x, spec) : sigma_bermudez(x, spec);
}

// ---------------------------------------------------------------------------

AbsorptionProfile::AbsorptionProfile(ProfileSpec spec, std::vector<double> sigma, std::vector<Complex> stretch)
    : spec_(spec), sigma_(std::move(sigma)), stretch_(std::move(stretch)) {
  if (sigma_.size() != stretch_.size()) throw ContractViolation("AbsorptionProfile: size mismatch");
}

bool AbsorptionProfile::has_pole_nodes() const noexcept {
  return std::any_of(sigma_.begin(), sigma_.end(), [](double s) { return s == kSigmaPoleSentinel; });
}

AbsorptionProfile sample_profile(const Grid1D& g, const ProfileSpec& spec, ProfileConsumer consumer) {
  spec.validate();
  if (consumer == ProfileConsumer::needs_sigma && spec.kind == ProfileKind::bermudez)
    throw ConfigError(
        "Bermudez absorption is singular at the outer boundary and cannot drive a formulation that uses sigma "
        "directly (PML-I); use the polynomial profile");
  const double Ls = spec.total_half_width();
  if (std::abs(g.half_width_total() - Ls) > 1e-12 * Ls)
    throw ConfigError("grid half-width must equal L + delta");

  std::vector<double> sigma(g.size());
  std::vector<Complex> stretch(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double s = sigma_value(g.node(j), spec);
    if (std::isinf(s)) {
      sigma[j] = kSigmaPoleSentinel;
      stretch[j] = 0.0;
    } else {
      sigma[j] = s;
      stretch[j] = 1.0 / (1.0 + spec.shift * s);
    }
  }
  return AbsorptionProfile(spec, std::move(sigma), std::move(stretch));
}

AbsorptionProfile zero_profile(const Grid1D& g) {
  ProfileSpec spec;
  spec.physical_half_width = g.half_width_total();
  return AbsorptionProfile(spec, std::vector<double>(g.size(), 0.0), std::vector<Complex>(g.size(), 1.0));
}

int continuity_order_estimate(const ProfileSpec& spec, int max_order) {
  spec.validate();
  const double L = spec.physical_half_width;
  const double d = spec.thickness;

  // m-th forward difference quotient at x = L.
  auto one_sided = [&](int m, double h) {
    double acc = 0.0;
    double binom = 1.0;
    for (int i = 0; i <= m; ++i) {
      const double sign = ((m - i) % 2 == 0) ? 1.0 : -1.0;
      acc += sign * binom * sigma_value(L + i * h, spec);
      binom = binom * (m - i) / (i + 1);
    }
    return acc / std::pow(h, m);
  };

  // The first few halvings can be pre-asymptotic; judge the tail of the sequence.
  constexpr int kHalvings = 12;
  constexpr int kTail = 4;
  for (int m = 0; m <= max_order; ++m) {
    // Stencil must stay well inside the layer.
    double h = d / (8.0 * (m + 1));
    std::vector<double> q;
    for (int s = 0; s <= kHalvings; ++s, h *= 0.5) q.push_back(std::abs(one_sided(m, h)));
    bool vanishing = true;
    for (int s = kHalvings - kTail + 1; s <= kHalvings; ++s) {
      if (q[s] == 0.0 && q[s - 1] == 0.0) continue;
      // Continuous derivatives decay at least linearly in h; a jump stays O(1).
      if (!(q[s] < 0.75 * q[s - 1])) vanishing = false;
    }
    if (!vanishing) return m - 1;
  }
  return max_order;
}

}  // namespace kgpml
