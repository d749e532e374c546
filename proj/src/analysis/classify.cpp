#include "hypercone/analysis/classify.hpp"

#include "hypercone/errors.hpp"

namespace hypercone::analysis {

std::vector<double> class_embedding(const ClassPrompts& cls, const ClassifierSpace& space) {
  if (cls.prompts.empty()) throw ValidationError("class '" + cls.name + "' has no prompts");
  const std::size_t dim = cls.prompts.front().size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& p : cls.prompts) {
    if (p.size() != dim) throw ValidationError("class '" + cls.name + "' has prompts of different dimension");
    for (std::size_t i = 0; i < dim; ++i) mean[i] += p[i];
  }
  for (double& v : mean) v /= static_cast<double>(cls.prompts.size());
  if (space.space == Space::Sphere) return normalized(mean);
  const auto point = exp_map_origin(TangentVector(scaled(mean, space.scale)), Curvature(space.curvature));
  return {point.space().begin(), point.space().end()};
}

Classification classify(std::span<const double> image, const std::vector<ClassPrompts>& classes,
                        const ClassifierSpace& space) {
  if (classes.empty()) throw ValidationError("no classes to score");
  Classification out;
  const Curvature c(space.curvature);
  for (const auto& cls : classes) {
    const auto emb = class_embedding(cls, space);
    if (emb.size() != image.size()) throw ValidationError("class '" + cls.name + "' dimension does not match image");
    double score = 0.0;
    if (space.space == Space::Lorentz) {
      score = lorentz_inner(lift({image.begin(), image.end()}, c), lift(emb, c));
    } else {
      score = dot(normalized(image), emb);
    }
    out.scores.push_back({cls.name, score});
  }
  for (std::size_t i = 1; i < out.scores.size(); ++i) {
    if (out.scores[i].score > out.scores[out.predicted].score) out.predicted = i;
  }
  return out;
}

}  // namespace hypercone::analysis
