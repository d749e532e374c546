#pragma once

#include <string>
#include <vector>

#include "hypercone/analysis/index.hpp"

namespace hypercone::analysis {

struct ClassPrompts {
  std::string name;
  std::vector<std::vector<double>> prompts;  // pre-lift text vectors
};

struct ClassifierSpace {
  Space space = Space::Lorentz;
  double curvature = 1.0;
  double scale = 1.0;  // alpha applied before the exp map
};

struct ClassScore {
  std::string name;
  double score = 0.0;
};

struct Classification {
  std::vector<ClassScore> scores;
  std::size_t predicted = 0;
};

/// Mean of the prompt vectors, then scaled and lifted (lorentz) or
/// normalized (sphere).
std::vector<double> class_embedding(const ClassPrompts& cls, const ClassifierSpace& space);

/// Scores each class by Lorentzian inner product (lorentz) or cosine (sphere)
/// with the image embedding; the prediction is the argmax, ties to the
/// earlier class.
Classification classify(std::span<const double> image, const std::vector<ClassPrompts>& classes,
                        const ClassifierSpace& space);

}  // namespace hypercone::analysis
