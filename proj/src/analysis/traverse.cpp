#include "hypercone/analysis/traverse.hpp"

#include <set>

#include "hypercone/errors.hpp"

namespace hypercone::analysis {

Matrix interpolate_steps(const EmbeddingIndex& index, std::span<const double> y, std::size_t steps) {
  if (steps < 2) throw ValidationError("traversal needs at least 2 steps");
  if (y.size() != index.dim()) throw ValidationError("query dimension does not match the index");
  Matrix out(steps, y.size());
  const double last = static_cast<double>(steps - 1);
  std::copy(y.begin(), y.end(), out.row(0).begin());
  if (index.space == Space::Lorentz) {
    const Curvature c = index.curv();
    const TangentVector v = log_map_origin(lift({y.begin(), y.end()}, c));
    for (std::size_t k = 1; k + 1 < steps; ++k) {
      const double keep = 1.0 - static_cast<double>(k) / last;
      const auto p = exp_map_origin(TangentVector(scaled(v.space(), keep)), c);
      std::copy(p.space().begin(), p.space().end(), out.row(k).begin());
    }
    // last row stays at the origin
    return out;
  }
  if (std::abs(norm(y) - 1.0) > kSphereNormTolerance) throw ValidationError("sphere query must be unit norm");
  const auto root = root_of(index);
  for (std::size_t k = 1; k + 1 < steps; ++k) {
    const double t = static_cast<double>(k) / last;
    std::vector<double> mix(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) mix[i] = (1.0 - t) * y[i] + t * root[i];
    if (norm(mix) < 1e-9) throw ValidationError("sphere interpolation passes through zero norm");
    const auto unit = normalized(mix, 1e-9);
    std::copy(unit.begin(), unit.end(), out.row(k).begin());
  }
  std::copy(root.begin(), root.end(), out.row(steps - 1).begin());
  return out;
}

std::vector<std::string> TraversalResult::unique_labels() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& s : steps) {
    if (seen.insert(s.label).second) out.push_back(s.label);
  }
  return out;
}

TraversalResult traverse(const EmbeddingIndex& index, std::span<const double> y, const TraverseOptions& options) {
  options.cone.validate();
  const auto root_row = index.root_row();
  if (!root_row) throw ValidationError("traversal index has no root row");
  const Matrix path = interpolate_steps(index, y, options.steps);

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index.labels[i].cls == LabelClass::Text || i == *root_row) candidates.push_back(i);
  }

  TraversalResult result;
  auto emit = [&](std::size_t step, std::size_t row) {
    result.steps.push_back({step, row, index.labels[row].text});
  };

  if (index.space == Space::Sphere) {
    for (std::size_t k = 0; k < path.rows(); ++k) {
      if (k + 1 == path.rows()) {
        emit(k, *root_row);
        continue;
      }
      std::size_t best = *root_row;
      double best_score = -2.0;
      for (std::size_t r : candidates) {
        const double s = dot(index.rows.row(r), path.row(k));
        if (s > best_score) {
          best_score = s;
          best = r;
        }
      }
      emit(k, best);
    }
    return result;
  }

  const Curvature c = index.curv();
  std::vector<HyperbolicPoint> points;
  points.reserve(candidates.size());
  for (std::size_t r : candidates) points.push_back(index.point(r));

  for (std::size_t k = 0; k < path.rows(); ++k) {
    const HyperbolicPoint step = lift(path.row_vector(k), c);
    if (step.is_origin()) {
      emit(k, *root_row);
      continue;
    }
    std::size_t best = *root_row;
    bool found = false;
    double best_score = 0.0;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      const std::size_t r = candidates[j];
      const auto& x = points[j];
      const bool entails = r == *root_row || x.is_origin() ||
                           entailment_loss_pair(x, step, options.cone) <= options.cone_slack;
      if (!entails) continue;
      const double s = lorentz_inner(x, step);
      if (!found || s > best_score) {
        best_score = s;
        best = r;
        found = true;
      }
    }
    emit(k, best);
  }
  return result;
}

}  // namespace hypercone::analysis
