#include "hypercone/analysis/stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hypercone/errors.hpp"

namespace hypercone::analysis {

double root_proxy(const EmbeddingIndex& index, std::size_t row, std::span<const double> root) {
  if (index.space == Space::Lorentz) return norm(index.rows.row(row));
  return 0.5 * (1.0 - dot(index.rows.row(row), root));
}

std::vector<double> root_proxies(const EmbeddingIndex& index) {
  std::vector<double> out(index.size());
  if (index.size() == 0) return out;
  const auto root = root_of(index);
  for (std::size_t i = 0; i < index.size(); ++i) out[i] = root_proxy(index, i, root);
  return out;
}

const ClassSummary* RootDistanceStats::find(LabelClass cls) const {
  for (const auto& s : summaries) {
    if (s.cls == cls) return &s;
  }
  return nullptr;
}

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ValidationError("quantile of an empty set");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

ClassSummary summarize(LabelClass cls, std::vector<double> values) {
  if (values.empty()) throw ValidationError("cannot summarize an empty class");
  std::sort(values.begin(), values.end());
  ClassSummary s;
  s.cls = cls;
  s.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  s.min = values.front();
  s.max = values.back();
  s.q25 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q75 = quantile(values, 0.75);
  return s;
}

RootDistanceStats root_distance_stats(const EmbeddingIndex& index, std::size_t bins) {
  if (bins == 0) throw ValidationError("histogram needs at least one bin");
  index.validate();
  const auto proxies = root_proxies(index);
  RootDistanceStats out;
  if (proxies.empty()) return out;
  const double lo = *std::min_element(proxies.begin(), proxies.end());
  const double hi = *std::max_element(proxies.begin(), proxies.end());
  const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
  for (LabelClass cls : {LabelClass::Text, LabelClass::Image, LabelClass::Root}) {
    std::vector<double> values;
    for (std::size_t i = 0; i < proxies.size(); ++i) {
      if (index.labels[i].cls == cls) values.push_back(proxies[i]);
    }
    if (values.empty()) continue;
    std::vector<std::size_t> counts(hi > lo ? bins : 1, 0);
    for (double v : values) {
      auto b = static_cast<std::size_t>((v - lo) / width);
      counts[std::min(b, counts.size() - 1)] += 1;
    }
    for (std::size_t b = 0; b < counts.size(); ++b) {
      const double edge = lo + width * static_cast<double>(b);
      out.histogram.push_back({cls, edge, counts.size() == 1 ? hi : edge + width, counts[b]});
    }
    out.summaries.push_back(summarize(cls, std::move(values)));
  }
  return out;
}

Separation text_image_separation(const RootDistanceStats& stats) {
  const auto* t = stats.find(LabelClass::Text);
  const auto* i = stats.find(LabelClass::Image);
  if (t == nullptr || i == nullptr || t->count < 2 || i->count < 2) {
    throw ValidationError("separation needs at least two text and two image rows");
  }
  Separation s;
  s.gap = i->mean - t->mean;
  s.standard_error = std::sqrt(t->std * t->std / static_cast<double>(t->count) +
                               i->std * i->std / static_cast<double>(i->count));
  return s;
}

void write_summary_csv(std::ostream& out, const RootDistanceStats& stats) {
  out << "class,count,mean,std,min,q25,median,q75,max\n";
  out.precision(17);
  for (const auto& s : stats.summaries) {
    out << to_string(s.cls) << ',' << s.count << ',' << s.mean << ',' << s.std << ',' << s.min << ','
        << s.q25 << ',' << s.median << ',' << s.q75 << ',' << s.max << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const RootDistanceStats& stats) {
  out << "class,bin_lo,bin_hi,count\n";
  out.precision(17);
  for (const auto& b : stats.histogram) {
    out << to_string(b.cls) << ',' << b.lo << ',' << b.hi << ',' << b.count << '\n';
  }
}

}  // namespace hypercone::analysis
