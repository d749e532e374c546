#pragma once

#include <string>
#include <vector>

#include "hypercone/analysis/index.hpp"
#include "hypercone/entailment.hpp"

namespace hypercone::analysis {

inline constexpr std::size_t kDefaultTraversalSteps = 50;

/// Points on the path from y to ROOT. Lorentz: lift(logm_O(y) (1 - t_k)).
/// Sphere: normalized lerp toward ROOT. Step 0 is y and the last step is
/// ROOT, both exactly.
Matrix interpolate_steps(const EmbeddingIndex& index, std::span<const double> y,
                         std::size_t steps = kDefaultTraversalSteps);

struct TraversalStep {
  std::size_t step = 0;
  std::size_t row = 0;  // retrieved index row
  std::string label;
};

struct TraversalResult {
  std::vector<TraversalStep> steps;

  /// Unique labels in first-hit order.
  std::vector<std::string> unique_labels() const;
};

struct TraverseOptions {
  std::size_t steps = kDefaultTraversalSteps;
  ConeParams cone{};
  /// A text entails a step when its entailment loss is <= slack.
  double cone_slack = 0.0;
};

/// Per step, retrieves the text (or ROOT) closest to the step embedding.
/// Lorentz restricts candidates to texts whose cone contains the step and
/// ranks them by Lorentzian inner product; a step at the exact origin
/// returns ROOT. Sphere ranks by cosine with no cone filter. Ties go to the
/// lower row index. The index must contain a root row.
TraversalResult traverse(const EmbeddingIndex& index, std::span<const double> y, const TraverseOptions& options = {});

}  // namespace hypercone::analysis
