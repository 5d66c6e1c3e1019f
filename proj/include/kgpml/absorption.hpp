// SPDX-License-Identifier: Apache-2.0
#pragma once

/**
 * @file absorption.hpp
 * @brief Absorption functions for the layer L <= |x| <= L* = L + delta.
 *
 * Two families are provided:
 *  - a degree-16 polynomial bump, bounded by sigma0 and flat to order 7 at |x| = L;
 *  - regularized Bermudez functions sigma0 * beta_k(|x| - L*), where beta_{-1}(z) = -1/z
 *    and beta_k subtracts the order-k Taylor polynomial of beta_{-1} about the interface.
 *    These have a pole at |x| = L* (non-integrable) and k continuous derivatives at |x| = L.
 *
 * Both are evaluated with |x| so one formula covers both sides of the domain.
 */

#include <complex>
#include <limits>
#include <vector>

#include "kgpml/spectral.hpp"

namespace kgpml {

enum class ProfileKind { polynomial, bermudez };

struct ProfileSpec {
  ProfileKind kind = ProfileKind::polynomial;
  int bermudez_order = 2;          ///< k >= -1, used for ProfileKind::bermudez only
  double sigma0 = 8.0;             ///< strength
  double thickness = 0.5;          ///< delta
  double physical_half_width = 4.0;  ///< L
  Complex shift{1.0, 0.0};         ///< R in S = 1/(1 + R sigma)

  double total_half_width() const noexcept { return physical_half_width + thickness; }

  /// Throws ConfigError on nonpositive sigma0/delta/L or k < -1.
  void validate() const;
};

ProfileSpec polynomial_profile(double sigma0, double thickness, double physical_half_width);
ProfileSpec bermudez_profile(int order, double sigma0, double thickness, double physical_half_width);

/// sigma0 [1 - ((|x| - L*)/delta)^2]^8 on the layer, 0 elsewhere.
double sigma_polynomial(double x, const ProfileSpec& spec);

/// sigma0 beta_k(|x| - L*) on the layer, 0 elsewhere; +inf at |x| >= L*.
double sigma_bermudez(double x, const ProfileSpec& spec);

/// Dispatch on spec.kind.
double sigma_value(double x, const ProfileSpec& spec);

/// Taylor coefficients (1/j!) beta_{-1}^{(j)}(-delta) = delta^{-(j+1)}, j = 0..k.
std::vector<double> bermudez_taylor_coefficients(int order, double thickness);

/// Stand-in for sigma at a pole node. Only the stretch (which is exactly 0) is meaningful there.
inline constexpr double kSigmaPoleSentinel = std::numeric_limits<double>::max();

/// Whether the consumer reads sigma itself (PML-I) or only the stretch 1/(1 + R sigma) (PML-II).
enum class ProfileConsumer { stretch_only, needs_sigma };

/// A profile sampled on one axis.
class AbsorptionProfile {
public:
  AbsorptionProfile(ProfileSpec spec, std::vector<double> sigma, std::vector<Complex> stretch);

  const ProfileSpec& spec() const noexcept { return spec_; }
  const std::vector<double>& sigma() const noexcept { return sigma_; }
  const std::vector<Complex>& stretch() const noexcept { return stretch_; }
  std::size_t size() const noexcept { return sigma_.size(); }

  /// True if any node sits on the pole (sigma stored as the sentinel, stretch 0).
  bool has_pole_nodes() const noexcept;

private:
  ProfileSpec spec_;
  std::vector<double> sigma_;
  std::vector<Complex> stretch_;
};

/// Samples spec on g. The grid half-width must equal L + delta. A Bermudez profile is
/// rejected for consumers that need sigma itself.
AbsorptionProfile sample_profile(const Grid1D& g, const ProfileSpec& spec,
                                 ProfileConsumer consumer = ProfileConsumer::stretch_only);

/// Identically zero absorption (stretch 1) on g.
AbsorptionProfile zero_profile(const Grid1D& g);

/// Numerical estimate of the number of continuous derivatives of sigma at |x| = L.
///
/// Uses right-sided forward differences at x = L with successively halved steps; the
/// inner side is identically zero, so derivative m is continuous iff its one-sided
/// estimate tends to zero. Returns -1 if sigma itself jumps.
int continuity_order_estimate(const ProfileSpec& spec, int max_order = 10);

}  // namespace kgpml
