#include "hypercone/entailment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hypercone {

void ConeParams::validate() const {
  if (!std::isfinite(K) || !(K > 0.0)) {
    throw ValidationError("cone constant K must be positive, got " + std::to_string(K));
  }
}

double aperture_argument(const HyperbolicPoint& x, ConeParams params) {
  params.validate();
  const double r = x.space_norm();
  if (r == 0.0) {
    throw ValidationError("half_aperture: cone is undefined at the origin");
  }
  return 2.0 * params.K / (x.curvature().sqrt() * r);
}

double half_aperture(const HyperbolicPoint& x, ConeParams params) {
  return std::asin(std::min(aperture_argument(x, params), 1.0 - kAngleClampEps));
}

double exterior_argument(const HyperbolicPoint& x, const HyperbolicPoint& y) {
  const double r = x.space_norm();
  if (r == 0.0) {
    throw ValidationError("exterior_angle: apex at the origin");
  }
  const double cxy = x.curvature().value() * lorentz_inner(x, y);
  const double numer = y.time() + x.time() * cxy;
  const double denom = r * std::sqrt(std::max(cxy * cxy - 1.0, kExteriorSqrtFloor));
  return numer / denom;
}

double exterior_angle(const HyperbolicPoint& x, const HyperbolicPoint& y) {
  const double arg = exterior_argument(x, y);
  return std::acos(std::clamp(arg, -1.0 + kAngleClampEps, 1.0 - kAngleClampEps));
}

double entailment_loss_pair(const HyperbolicPoint& x_text, const HyperbolicPoint& y_image,
                            ConeParams params) {
  return std::max(0.0, exterior_angle(x_text, y_image) - half_aperture(x_text, params));
}

}  // namespace hypercone
