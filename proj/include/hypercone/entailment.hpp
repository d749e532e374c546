#pragma once

// Entailment cones on the Lorentz hyperboloid. A text embedding x projects a
// cone away from the origin; an image y is "entailed" by x when the exterior
// angle at x of the triangle O-x-y is no larger than the cone's half-aperture.

#include "hypercone/geometry.hpp"

namespace hypercone {

inline constexpr double kDefaultConeK = 0.1;

/// Distance kept from +-1 when clamping asin/acos arguments.
inline constexpr double kAngleClampEps = 1e-8;

/// Floor on (c<x,y>_L)^2 - 1 inside the exterior-angle denominator.
inline constexpr double kExteriorSqrtFloor = 1e-16;

struct ConeParams {
  double K = kDefaultConeK;

  void validate() const;
};

/// asin(2K / (sqrt(c) |x_space|)), argument clamped to at most 1 - 1e-8.
/// Throws ValidationError at the origin, where the cone is undefined.
double half_aperture(const HyperbolicPoint& x, ConeParams params = {});

/// pi minus the angle at x in the geodesic triangle O-x-y.
double exterior_angle(const HyperbolicPoint& x, const HyperbolicPoint& y);

/// max(0, ext(x, y) - aper(x)) with x as the cone apex.
double entailment_loss_pair(const HyperbolicPoint& x_text, const HyperbolicPoint& y_image,
                            ConeParams params = {});

/// Raw (unclamped) asin argument of half_aperture. Used to keep gradient
/// checks away from the clamp.
double aperture_argument(const HyperbolicPoint& x, ConeParams params = {});

/// Raw (unclamped) acos argument of exterior_angle.
double exterior_argument(const HyperbolicPoint& x, const HyperbolicPoint& y);

}  // namespace hypercone
