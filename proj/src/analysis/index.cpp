#include "hypercone/analysis/index.hpp"

#include <cmath>

#include "hypercone/errors.hpp"

namespace hypercone::analysis {

std::string_view to_string(Space space) { return space == Space::Lorentz ? "lorentz" : "sphere"; }

std::string_view to_string(LabelClass cls) {
  switch (cls) {
    case LabelClass::Text:
      return "text";
    case LabelClass::Image:
      return "image";
    case LabelClass::Root:
      return "root";
  }
  return "?";
}

Space parse_space(std::string_view s) {
  if (s == "lorentz") return Space::Lorentz;
  if (s == "sphere") return Space::Sphere;
  throw ValidationError("unknown space '" + std::string(s) + "'");
}

LabelClass parse_label_class(std::string_view s) {
  if (s == "text") return LabelClass::Text;
  if (s == "image") return LabelClass::Image;
  if (s == "root") return LabelClass::Root;
  throw ValidationError("unknown label class '" + std::string(s) + "'");
}

Label parse_label(std::string_view line) {
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos) throw ValidationError("label line has no tab: '" + std::string(line) + "'");
  return Label{parse_label_class(line.substr(0, tab)), std::string(line.substr(tab + 1))};
}

std::string format_label(const Label& label) {
  if (label.text.find_first_of("\t\n") != std::string::npos) {
    throw ValidationError("label text may not contain tabs or newlines");
  }
  return std::string(to_string(label.cls)) + "\t" + label.text;
}

void EmbeddingIndex::validate() const {
  if (rows.rows() != labels.size()) {
    throw ValidationError("label count " + std::to_string(labels.size()) + " does not match row count " +
                          std::to_string(rows.rows()));
  }
  if (space == Space::Lorentz) (void)Curvature(curvature);
  bool seen_root = false;
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    if (!all_finite(rows.row(i))) throw ValidationError("row " + std::to_string(i) + " is not finite");
    if (space == Space::Sphere && std::abs(norm(rows.row(i)) - 1.0) > kSphereNormTolerance) {
      throw ValidationError("sphere row " + std::to_string(i) + " is not unit norm");
    }
    if (space == Space::Lorentz) (void)time_component(rows.row(i), curv());
    if (labels[i].cls == LabelClass::Root) {
      if (seen_root) throw ValidationError("more than one root row");
      seen_root = true;
    }
  }
}

std::optional<std::size_t> EmbeddingIndex::root_row() const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].cls == LabelClass::Root) return i;
  }
  return std::nullopt;
}

HyperbolicPoint EmbeddingIndex::point(std::size_t i) const {
  if (space != Space::Lorentz) throw ValidationError("point() needs a lorentz index");
  return lift(rows.row_vector(i), curv());
}

std::vector<double> estimate_root(const EmbeddingIndex& index) {
  if (index.size() == 0) throw ValidationError("cannot estimate ROOT of an empty index");
  if (index.space == Space::Lorentz) return std::vector<double>(index.dim(), 0.0);
  std::vector<double> mean(index.dim(), 0.0);
  std::size_t n = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index.labels.at(i).cls == LabelClass::Root) continue;
    const auto r = index.rows.row(i);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += r[k];
    ++n;
  }
  if (n == 0) throw ValidationError("cannot estimate ROOT without non-root rows");
  for (double& v : mean) v /= static_cast<double>(n);
  if (norm(mean) < 1e-9) throw ValidationError("sphere mean has near-zero norm; ROOT direction undefined");
  return normalized(mean, 1e-9);
}

std::vector<double> root_of(const EmbeddingIndex& index) {
  if (auto r = index.root_row()) return index.rows.row_vector(*r);
  return estimate_root(index);
}

}  // namespace hypercone::analysis
