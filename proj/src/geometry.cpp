#include "hypercone/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hypercone/linalg.hpp"

namespace hypercone {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw ValidationError(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

void require_same_curvature(const HyperbolicPoint& x, const HyperbolicPoint& y, const char* op) {
  if (!(x.curvature() == y.curvature())) {
    throw ValidationError(std::string(op) + ": curvature mismatch");
  }
  require_same_dim(x.dim(), y.dim(), op);
}

// Returns -c<x,y>_L - 1 >= 0. With hyperbolic radii a, b and angle theta,
// cosh(a - b) - 1 + sinh(a) sinh(b) (1 - cos theta); every term is
// nonnegative, so precision holds for near pairs and for far ones.
double acosh_arg_minus_one(const HyperbolicPoint& x, const HyperbolicPoint& y) {
  const double sc = x.curvature().sqrt();
  const auto xs = x.space();
  const auto ys = y.space();
  const double nx = norm(xs);
  const double ny = norm(ys);
  const double half = 0.5 * (std::asinh(sc * nx) - std::asinh(sc * ny));
  const double radial = 2.0 * std::sinh(half) * std::sinh(half);
  if (nx == 0.0 || ny == 0.0) {
    return radial;
  }
  double chord_sq = 0.0;  // |x/|x| - y/|y||^2 = 2 (1 - cos theta)
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] / nx - ys[i] / ny;
    chord_sq += d * d;
  }
  return radial + 0.5 * (sc * nx) * (sc * ny) * chord_sq;
}

}  // namespace

Curvature::Curvature(double c) : c_(c), sqrt_c_(std::sqrt(c)) {
  if (!std::isfinite(c) || !(c > 0.0)) {
    throw ValidationError("curvature must be finite and positive, got " + std::to_string(c));
  }
}

Curvature Curvature::clamped(double c) {
  return Curvature(std::clamp(c, kMinCurvature, kMaxCurvature));
}

HyperbolicPoint HyperbolicPoint::origin(std::size_t dim, Curvature curv) {
  return HyperbolicPoint(std::vector<double>(dim, 0.0), curv);
}

double HyperbolicPoint::time() const { return time_component(space_, curv_); }

double HyperbolicPoint::space_norm() const { return norm(space_); }

bool HyperbolicPoint::is_origin() const {
  return std::all_of(space_.begin(), space_.end(), [](double v) { return v == 0.0; });
}

double lorentz_inner(const AmbientVector& x, const AmbientVector& y) {
  require_same_dim(x.dim(), y.dim(), "lorentz_inner");
  return dot(x.space, y.space) - x.time * y.time;
}

double lorentz_inner(const HyperbolicPoint& x, const HyperbolicPoint& y) {
  require_same_curvature(x, y, "lorentz_inner");
  const double xy = dot(x.space(), y.space());
  const double xt = x.time();
  const double yt = y.time();
  if (xy <= 0.0) {
    return xy - xt * yt;  // both terms non-positive: no cancellation
  }
  // x_t y_t - <x,y> = (x_t^2 y_t^2 - <x,y>^2) / (x_t y_t + <x,y>), and
  // x_t^2 y_t^2 - <x,y>^2 = 1/c^2 + (|x|^2 + |y|^2)/c + |x|^2 |y_perp|^2.
  const double inv_c = 1.0 / x.curvature().value();
  const double xx = squared_norm(x.space());
  const double yy = squared_norm(y.space());
  double perp_sq = 0.0;
  const double coef = xy / xx;
  const auto xs = x.space();
  const auto ys = y.space();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double p = ys[i] - coef * xs[i];
    perp_sq += p * p;
  }
  const double numer = inv_c * inv_c + (xx + yy) * inv_c + xx * perp_sq;
  return -numer / (xt * yt + xy);
}

double time_component(std::span<const double> space, Curvature curv) {
  return std::sqrt(1.0 / curv.value() + squared_norm(space));
}

HyperbolicPoint lift(std::vector<double> space, Curvature curv) {
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!std::isfinite(space[i])) {
      throw ValidationError("lift: non-finite space component at index " + std::to_string(i));
    }
  }
  return HyperbolicPoint(std::move(space), curv);
}

double lorentz_distance(const HyperbolicPoint& x, const HyperbolicPoint& y) {
  require_same_curvature(x, y, "lorentz_distance");
  const double delta = acosh_arg_minus_one(x, y);
  // acosh(1 + delta), stable for small delta
  return std::log1p(delta + std::sqrt(delta * (delta + 2.0))) / x.curvature().sqrt();
}

double distance_from_origin(const HyperbolicPoint& x) {
  const double sc = x.curvature().sqrt();
  return std::asinh(sc * x.space_norm()) / sc;
}

double sinhc(double t) {
  if (std::abs(t) < 1e-4) {
    return 1.0 + t * t / 6.0;
  }
  return std::sinh(t) / t;
}

double asinhc(double t) {
  if (std::abs(t) < 1e-4) {
    return 1.0 - t * t / 6.0;
  }
  return std::asinh(t) / t;
}

HyperbolicPoint exp_map_origin(const TangentVector& v, Curvature curv) {
  if (!all_finite(v.space())) {
    throw ValidationError("exp_map_origin: non-finite tangent vector");
  }
  const double t = curv.sqrt() * norm(v.space());
  const double factor = sinhc(t);
  if (!std::isfinite(factor)) {
    throw NumericalError("exp_map_origin: overflow at |v| = " + std::to_string(norm(v.space())));
  }
  std::vector<double> space = scaled(v.space(), factor);
  if (!all_finite(space) || !std::isfinite(squared_norm(space))) {
    throw NumericalError("exp_map_origin: overflow at |v| = " + std::to_string(norm(v.space())));
  }
  return lift(std::move(space), curv);
}

TangentVector log_map_origin(const HyperbolicPoint& x) {
  // acosh(sqrt(c) x_time) / sqrt(c x_time^2 - 1) = asinh(sqrt(c)|x|) / (sqrt(c)|x|)
  const double t = x.curvature().sqrt() * x.space_norm();
  return TangentVector(scaled(x.space(), asinhc(t)));
}

AmbientVector tangent_project(const HyperbolicPoint& z, const AmbientVector& u) {
  require_same_dim(z.dim(), u.dim(), "tangent_project");
  const AmbientVector za = z.ambient();
  const double k = z.curvature().value() * lorentz_inner(za, u);
  AmbientVector w = u;
  for (std::size_t i = 0; i < w.space.size(); ++i) {
    w.space[i] += k * za.space[i];
  }
  w.time += k * za.time;
  return w;
}

HyperbolicPoint poincare_to_lorentz(std::span<const double> xb, Curvature curv) {
  const double denom = 1.0 - curv.value() * squared_norm(xb);
  if (!(denom > 0.0)) {
    throw ValidationError("poincare_to_lorentz: point is on or outside the ball boundary");
  }
  return lift(scaled(xb, 2.0 / denom), curv);
}

}  // namespace hypercone
