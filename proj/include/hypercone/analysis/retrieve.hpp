#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypercone/analysis/index.hpp"
#include "hypercone/loss.hpp"

namespace hypercone::analysis {

struct Hit {
  std::size_t row = 0;
  std::string label;
  double score = 0.0;
};

struct RetrieveOptions {
  std::size_t k = 10;
  /// Scores become softmax(-d / tau) (lorentz) or softmax(cos / tau) (sphere)
  /// over all candidates; the ranking is unchanged.
  bool calibrated = false;
  double tau = kInitialTemperature;
  /// Restrict candidates to one label class.
  std::optional<LabelClass> only;
  /// Leave one row out, e.g. the query itself.
  std::optional<std::size_t> exclude;
};

/// Top-k candidates by Lorentzian inner product (lorentz) or cosine (sphere),
/// descending, ties broken by ascending row. k larger than the candidate set
/// is an error; k = 0 returns nothing.
std::vector<Hit> retrieve(const EmbeddingIndex& index, std::span<const double> query,
                          const RetrieveOptions& options);

}  // namespace hypercone::analysis
