#include "hypercone/analysis/retrieve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hypercone/errors.hpp"

namespace hypercone::analysis {

std::vector<Hit> retrieve(const EmbeddingIndex& index, std::span<const double> query,
                          const RetrieveOptions& options) {
  if (query.size() != index.dim()) throw ValidationError("query dimension does not match the index");
  if (options.calibrated && !(options.tau > 0.0)) throw ValidationError("tau must be positive");
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (options.only && index.labels[i].cls != *options.only) continue;
    if (options.exclude && *options.exclude == i) continue;
    rows.push_back(i);
  }
  if (options.k > rows.size()) {
    throw ValidationError("k = " + std::to_string(options.k) + " exceeds the " + std::to_string(rows.size()) +
                          " candidates");
  }
  if (options.k == 0) return {};

  std::vector<double> key(rows.size());
  std::vector<double> logit(rows.size());
  if (index.space == Space::Lorentz) {
    const HyperbolicPoint q = lift({query.begin(), query.end()}, index.curv());
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto x = index.point(rows[j]);
      key[j] = lorentz_inner(q, x);
      if (options.calibrated) logit[j] = -lorentz_distance(q, x) / options.tau;
    }
  } else {
    const auto q = normalized(query);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      key[j] = dot(q, index.rows.row(rows[j]));
      logit[j] = key[j] / options.tau;
    }
  }

  std::vector<double> score = key;
  if (options.calibrated) {
    const double m = *std::max_element(logit.begin(), logit.end());
    double z = 0.0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      score[j] = std::exp(logit[j] - m);
      z += score[j];
    }
    for (double& s : score) s /= z;
  }

  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });

  std::vector<Hit> hits;
  hits.reserve(options.k);
  for (std::size_t n = 0; n < options.k; ++n) {
    const std::size_t j = order[n];
    hits.push_back({rows[j], index.labels[rows[j]].text, score[j]});
  }
  return hits;
}

}  // namespace hypercone::analysis
