#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hypercone/loss.hpp"

namespace hypercone::grad {

struct GradcheckOptions {
  int seeds = 20;
  std::size_t batch = 4;
  std::size_t dim = 8;
  int primitive_points = 100;
  double rtol = 1e-4;
  double atol = 1e-6;
  double primitive_rtol = 1e-6;
  double primitive_atol = 1e-9;
  /// Samples closer than this to a clamp or hinge boundary are redrawn.
  double boundary_margin = 1e-3;
  std::uint64_t base_seed = 1;
};

struct GradcheckCase {
  std::string name;
  bool passed = false;
  int checked = 0;
  int skipped = 0;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
};

struct GradcheckSummary {
  std::vector<GradcheckCase> cases;

  bool passed() const;
};

/// Smallest distance from any clamp or hinge boundary that total_loss passes
/// through for this input. Finite differences straddling a boundary are not
/// comparable with the one-sided analytic subgradient.
double boundary_margin(const BatchEmbeddings& batch, const LossParams& params, SimilarityMode mode);

/// One case per differentiable tape primitive.
GradcheckSummary run_primitive_checks(const GradcheckOptions& opts = {});

/// End-to-end total_loss checks over similarity modes and lambda in {0, 0.2}.
GradcheckSummary run_loss_checks(const GradcheckOptions& opts = {});

GradcheckSummary run_gradcheck_suite(const GradcheckOptions& opts = {});

}  // namespace hypercone::grad
