#pragma once

#include <iosfwd>
#include <vector>

#include "hypercone/analysis/index.hpp"

namespace hypercone::analysis {

/// Monotone distance-to-ROOT proxy: ||x_space|| for lorentz,
/// 0.5 (1 - <z, ROOT>) for sphere.
double root_proxy(const EmbeddingIndex& index, std::size_t row, std::span<const double> root);
std::vector<double> root_proxies(const EmbeddingIndex& index);

struct ClassSummary {
  LabelClass cls = LabelClass::Text;
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

struct HistogramBin {
  LabelClass cls = LabelClass::Text;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct RootDistanceStats {
  std::vector<ClassSummary> summaries;  // text, image, root; absent classes omitted
  std::vector<HistogramBin> histogram;  // shared bin edges across classes

  const ClassSummary* find(LabelClass cls) const;
};

/// Linear-interpolated quantile of sorted values, q in [0, 1].
double quantile(std::span<const double> sorted, double q);

ClassSummary summarize(LabelClass cls, std::vector<double> values);

RootDistanceStats root_distance_stats(const EmbeddingIndex& index, std::size_t bins = 20);

/// Signed mean difference (image minus text) and its standard error
/// sqrt(s_t^2/n_t + s_i^2/n_i).
struct Separation {
  double gap = 0.0;
  double standard_error = 0.0;

  double ratio() const { return gap / standard_error; }
};

Separation text_image_separation(const RootDistanceStats& stats);

void write_summary_csv(std::ostream& out, const RootDistanceStats& stats);
void write_histogram_csv(std::ostream& out, const RootDistanceStats& stats);

}  // namespace hypercone::analysis
