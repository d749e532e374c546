#pragma once

// Lorentz-model primitives. A point on the hyperboloid of curvature -c stores
// only its space components; the time component is recomputed on demand as
// sqrt(1/c + |space|^2), so the constraint <x,x>_L = -1/c cannot drift.

#include <cstddef>
#include <span>
#include <vector>

#include "hypercone/errors.hpp"

namespace hypercone {

inline constexpr double kMinCurvature = 0.1;
inline constexpr double kMaxCurvature = 10.0;

/// Floor applied to the acosh argument when differentiating distances.
inline constexpr double kAcoshEps = 1e-8;

/// Positive curvature magnitude c; the hyperboloid has curvature -c.
class Curvature {
 public:
  explicit Curvature(double c);

  /// Clamps a trainable curvature into [kMinCurvature, kMaxCurvature].
  static Curvature clamped(double c);

  double value() const noexcept { return c_; }
  double sqrt() const noexcept { return sqrt_c_; }

  friend bool operator==(Curvature a, Curvature b) noexcept { return a.c_ == b.c_; }

 private:
  double c_;
  double sqrt_c_;
};

/// General element of R^{n+1}, written as [space, time].
struct AmbientVector {
  std::vector<double> space;
  double time = 0.0;

  std::size_t dim() const noexcept { return space.size(); }
};

/// Vector in the tangent space at the hyperboloid origin (time component 0).
class TangentVector {
 public:
  TangentVector() = default;
  explicit TangentVector(std::vector<double> space) : space_(std::move(space)) {}

  std::span<const double> space() const noexcept { return space_; }
  std::size_t dim() const noexcept { return space_.size(); }
  AmbientVector ambient() const { return {space_, 0.0}; }

 private:
  std::vector<double> space_;
};

class HyperbolicPoint {
 public:
  static HyperbolicPoint origin(std::size_t dim, Curvature curv);

  std::span<const double> space() const noexcept { return space_; }
  std::size_t dim() const noexcept { return space_.size(); }
  Curvature curvature() const noexcept { return curv_; }

  double time() const;
  double space_norm() const;
  bool is_origin() const;
  AmbientVector ambient() const { return {space_, time()}; }

 private:
  friend HyperbolicPoint lift(std::vector<double> space, Curvature curv);
  HyperbolicPoint(std::vector<double> space, Curvature curv)
      : space_(std::move(space)), curv_(curv) {}

  std::vector<double> space_;
  Curvature curv_;
};

/// <x,y>_L = <x_space, y_space> - x_time * y_time.
double lorentz_inner(const AmbientVector& x, const AmbientVector& y);

/// Inner product of two hyperboloid points. Evaluated without cancellation
/// so that <x,x>_L = -1/c holds to relative precision at any scale.
double lorentz_inner(const HyperbolicPoint& x, const HyperbolicPoint& y);

double time_component(std::span<const double> space, Curvature curv);

/// Packages space components into a point; rejects non-finite input.
HyperbolicPoint lift(std::vector<double> space, Curvature curv);

/// Geodesic distance (1/sqrt(c)) * acosh(-c <x,y>_L). The acosh argument is
/// floored at 1, so d(x, x) = 0.
double lorentz_distance(const HyperbolicPoint& x, const HyperbolicPoint& y);

/// d(O, x) = asinh(sqrt(c) |x_space|) / sqrt(c).
double distance_from_origin(const HyperbolicPoint& x);

/// sinh(t) / t, with a Taylor branch near zero.
double sinhc(double t);

/// asinh(t) / t, with a Taylor branch near zero.
double asinhc(double t);

/// Exponential map at the origin: x_space = sinh(sqrt(c)|v|)/(sqrt(c)|v|) * v.
/// Throws NumericalError if the result overflows.
HyperbolicPoint exp_map_origin(const TangentVector& v, Curvature curv);

/// Inverse of exp_map_origin.
TangentVector log_map_origin(const HyperbolicPoint& x);

/// Orthogonal projection onto the tangent space at z: u + c z <z,u>_L.
AmbientVector tangent_project(const HyperbolicPoint& z, const AmbientVector& u);

/// Maps a Poincaré-ball point onto the hyperboloid: 2 xb / (1 - c |xb|^2).
HyperbolicPoint poincare_to_lorentz(std::span<const double> xb, Curvature curv);

}  // namespace hypercone
