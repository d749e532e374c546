#include "hypercone/grad/finite_diff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hypercone/errors.hpp"

namespace hypercone::grad {

std::vector<double> finite_diff(const ScalarFunction& f, std::span<const double> x, double h) {
  if (!(h > 0.0)) {
    throw ValidationError("finite_diff: step must be positive");
  }
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericalError("finite_diff: non-finite evaluation at coordinate " + std::to_string(i));
    }
    out[i] = (fp - fm) / (2.0 * h);
  }
  return out;
}

GradReport compare_gradients(std::vector<double> analytic, std::vector<double> numeric, double rtol,
                             double atol) {
  if (analytic.size() != numeric.size()) {
    throw ValidationError("compare_gradients: shape mismatch");
  }
  GradReport r;
  r.passed = true;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double err = std::abs(analytic[i] - numeric[i]);
    r.max_abs_err = std::max(r.max_abs_err, err);
    const double scale = std::abs(numeric[i]);
    if (scale > 0.0) {
      r.max_rel_err = std::max(r.max_rel_err, err / scale);
    }
    if (!(err <= atol + rtol * scale)) {
      r.passed = false;
    }
  }
  r.analytic = std::move(analytic);
  r.numeric = std::move(numeric);
  return r;
}

}  // namespace hypercone::grad
