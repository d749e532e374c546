#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hypercone/geometry.hpp"
#include "hypercone/linalg.hpp"

namespace hypercone::analysis {

enum class Space : std::uint8_t { Lorentz = 0, Sphere = 1 };

enum class LabelClass { Text, Image, Root };

std::string_view to_string(Space space);
std::string_view to_string(LabelClass cls);
Space parse_space(std::string_view s);
LabelClass parse_label_class(std::string_view s);

struct Label {
  LabelClass cls = LabelClass::Text;
  std::string text;

  friend bool operator==(const Label&, const Label&) = default;
};

/// "class<TAB>text". Throws ValidationError on a missing tab or unknown class.
Label parse_label(std::string_view line);
std::string format_label(const Label& label);

inline constexpr double kSphereNormTolerance = 1e-6;

/// Embedding rows (space components for lorentz, unit vectors for sphere)
/// with one label per row. At most one row carries the root class.
struct EmbeddingIndex {
  Space space = Space::Lorentz;
  double curvature = 1.0;  // lorentz only
  Matrix rows;
  std::vector<Label> labels;

  std::size_t size() const noexcept { return rows.rows(); }
  std::size_t dim() const noexcept { return rows.cols(); }

  /// Row count matches label count, entries are finite, sphere rows are
  /// unit norm, at most one root row.
  void validate() const;

  std::optional<std::size_t> root_row() const;

  /// Row i on the hyperboloid (lorentz only).
  HyperbolicPoint point(std::size_t i) const;
  Curvature curv() const { return Curvature(curvature); }
};

/// The origin for lorentz; the normalized mean of the non-root rows for
/// sphere. Throws when the sphere mean norm is below 1e-9 or there are no rows.
std::vector<double> estimate_root(const EmbeddingIndex& index);

/// The index's root row when it has one, otherwise estimate_root.
std::vector<double> root_of(const EmbeddingIndex& index);

}  // namespace hypercone::analysis
