#pragma once

// Shared helpers for the test suites: random inputs and independent oracles.
// Nothing here calls into the library's geometry routines.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "hypercone/linalg.hpp"
#include "hypercone/random.hpp"

namespace hypercone::testing {

inline std::vector<double> random_vector(Rng& rng, std::size_t n, double stddev = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) {
    x = rng.normal(0.0, stddev);
  }
  return v;
}

/// Random direction scaled to a norm drawn uniformly from [0, max_norm].
inline std::vector<double> random_ball_vector(Rng& rng, std::size_t n, double max_norm) {
  std::vector<double> v = random_vector(rng, n);
  const double target = rng.uniform(0.0, max_norm);
  const double len = norm(v);
  for (double& x : v) {
    x *= target / len;
  }
  return v;
}

/// Random orthogonal matrix via Gram-Schmidt on a Gaussian matrix.
inline Matrix random_orthogonal(Rng& rng, std::size_t n) {
  Matrix q(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> v = random_vector(rng, n);
    for (std::size_t p = 0; p < r; ++p) {
      const double proj = dot(v, q.row(p));
      for (std::size_t k = 0; k < n; ++k) {
        v[k] -= proj * q(p, k);
      }
    }
    const double len = norm(v);
    for (std::size_t k = 0; k < n; ++k) {
      q(r, k) = v[k] / len;
    }
  }
  return q;
}

inline std::vector<double> apply(const Matrix& m, std::span<const double> v) {
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out[r] = dot(m.row(r), v);
  }
  return out;
}

/// Textbook formulas, written out independently of src/.
namespace oracle {

inline double time_of(std::span<const double> s, double c) {
  double sq = 0.0;
  for (double v : s) sq += v * v;
  return std::sqrt(1.0 / c + sq);
}

inline double inner(std::span<const double> x, std::span<const double> y, double c) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d += x[i] * y[i];
  return d - time_of(x, c) * time_of(y, c);
}

inline double distance(std::span<const double> x, std::span<const double> y, double c) {
  return std::acosh(std::max(1.0, -c * inner(x, y, c))) / std::sqrt(c);
}

/// pi minus the angle at x in triangle O-x-y, from the hyperbolic law of
/// cosines on the three pairwise distances.
inline double exterior_angle_law_of_cosines(std::span<const double> x, std::span<const double> y,
                                            double c) {
  const std::vector<double> o(x.size(), 0.0);
  const double sc = std::sqrt(c);
  const double d_oy = distance(o, y, c);  // side opposite x
  const double d_ox = distance(o, x, c);
  const double d_xy = distance(x, y, c);
  const double cos_at_x = (std::cosh(sc * d_xy) * std::cosh(sc * d_ox) - std::cosh(sc * d_oy)) /
                          (std::sinh(sc * d_xy) * std::sinh(sc * d_ox));
  return std::numbers::pi - std::acos(std::clamp(cos_at_x, -1.0, 1.0));
}

inline double poincare_half_aperture(std::span<const double> xb, double c, double K) {
  double sq = 0.0;
  for (double v : xb) sq += v * v;
  return std::asin(K * (1.0 - c * sq) / (std::sqrt(c) * std::sqrt(sq)));
}

}  // namespace oracle

}  // namespace hypercone::testing
