#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hypercone::grad {

inline constexpr double kDefaultFiniteDiffStep = 1e-5;

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h per coordinate.
/// Throws NumericalError naming the coordinate if an evaluation is not finite.
std::vector<double> finite_diff(const ScalarFunction& f, std::span<const double> x,
                                double h = kDefaultFiniteDiffStep);

struct GradReport {
  std::vector<double> analytic;
  std::vector<double> numeric;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  /// |analytic - numeric| <= atol + rtol * |numeric| held for every entry.
  bool passed = false;
};

GradReport compare_gradients(std::vector<double> analytic, std::vector<double> numeric, double rtol,
                             double atol);

}  // namespace hypercone::grad
