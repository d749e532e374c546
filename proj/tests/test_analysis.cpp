#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hypercone/analysis/classify.hpp"
#include "hypercone/analysis/retrieve.hpp"
#include "hypercone/analysis/stats.hpp"
#include "hypercone/analysis/traverse.hpp"
#include "hypercone/errors.hpp"
#include "test_util.hpp"

using namespace hypercone;
using namespace hypercone::analysis;
using hypercone::testing::random_vector;

namespace {

constexpr double kSinh1 = 1.1752011936438014;

std::vector<double> space_of(const HyperbolicPoint& p) { return {p.space().begin(), p.space().end()}; }

std::vector<double> on_ray(double radius, double angle_deg, std::size_t dim = 3) {
  const double a = angle_deg * std::numbers::pi / 180.0;
  std::vector<double> v(dim, 0.0);
  v[0] = radius * std::cos(a);
  v[1] = radius * std::sin(a);
  return space_of(exp_map_origin(TangentVector(v), Curvature(1.0)));
}

EmbeddingIndex make_index(Space space, std::vector<std::pair<Label, std::vector<double>>> rows) {
  EmbeddingIndex index;
  index.space = space;
  std::vector<std::vector<double>> data;
  for (auto& [label, v] : rows) {
    index.labels.push_back(label);
    data.push_back(v);
  }
  index.rows = Matrix::from_rows(data, data.empty() ? 0 : data.front().size());
  return index;
}

/// A chain of texts on one ray (A nearer the origin than B), an image further
/// out, and a distractor D off the ray that is close but never entails.
EmbeddingIndex chain_fixture() {
  return make_index(Space::Lorentz, {{{LabelClass::Root, "[ROOT]"}, {0.0, 0.0, 0.0}},
                                     {{LabelClass::Text, "A"}, on_ray(0.5, 0.0)},
                                     {{LabelClass::Text, "B"}, on_ray(1.0, 0.0)},
                                     {{LabelClass::Text, "D"}, on_ray(0.75, 25.0)},
                                     {{LabelClass::Image, "img"}, on_ray(2.0, 0.0)}});
}

}  // namespace

TEST(Root, Estimates) {
  auto lorentz = make_index(Space::Lorentz, {{{LabelClass::Text, "a"}, {3.0, 1.0}}});
  EXPECT_EQ(estimate_root(lorentz), (std::vector<double>{0.0, 0.0}));
  auto sphere = make_index(Space::Sphere, {{{LabelClass::Text, "a"}, {1.0, 0.0}}, {{LabelClass::Image, "b"}, {0.0, 1.0}}});
  const auto r = estimate_root(sphere);
  EXPECT_NEAR(r[0], 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r[1], 1.0 / std::sqrt(2.0), 1e-15);
  auto opposite = make_index(Space::Sphere, {{{LabelClass::Text, "a"}, {1.0, 0.0}}, {{LabelClass::Text, "b"}, {-1.0, 0.0}}});
  EXPECT_THROW(estimate_root(opposite), ValidationError);
  EXPECT_THROW(estimate_root(EmbeddingIndex{}), ValidationError);
}

TEST(Labels, ParseAndFormat) {
  EXPECT_EQ(parse_label("image\t1.2.3:0"), (Label{LabelClass::Image, "1.2.3:0"}));
  EXPECT_EQ(parse_label("text\ta dog\twith tab").text, "a dog\twith tab");
  EXPECT_THROW(parse_label("caption\tdog"), ValidationError);
  EXPECT_THROW(parse_label("text dog"), ValidationError);
  EXPECT_EQ(format_label({LabelClass::Root, "[ROOT]"}), "root\t[ROOT]");
}

TEST(Index, Validation) {
  auto idx = make_index(Space::Sphere, {{{LabelClass::Text, "a"}, {0.6, 0.8}}});
  EXPECT_NO_THROW(idx.validate());
  idx.rows(0, 0) = 0.7;
  EXPECT_THROW(idx.validate(), ValidationError);
  auto two_roots = make_index(Space::Lorentz, {{{LabelClass::Root, "r"}, {0.0}}, {{LabelClass::Root, "s"}, {0.0}}});
  EXPECT_THROW(two_roots.validate(), ValidationError);
  auto mismatch = make_index(Space::Lorentz, {{{LabelClass::Text, "a"}, {0.0}}});
  mismatch.labels.push_back({LabelClass::Text, "b"});
  EXPECT_THROW(mismatch.validate(), ValidationError);
}

TEST(Stats, ProxyExamples) {
  auto lorentz = make_index(Space::Lorentz, {{{LabelClass::Root, "[ROOT]"}, {0.0, 0.0}},
                                             {{LabelClass::Image, "x"}, space_of(exp_map_origin(TangentVector({1.0, 0.0}), Curvature(1.0)))}});
  const auto p = root_proxies(lorentz);
  EXPECT_EQ(p[0], 0.0);
  EXPECT_NEAR(p[1], kSinh1, 1e-15);

  auto sphere = make_index(Space::Sphere, {{{LabelClass::Root, "[ROOT]"}, {0.0, 1.0}},
                                           {{LabelClass::Text, "same"}, {0.0, 1.0}},
                                           {{LabelClass::Text, "anti"}, {0.0, -1.0}}});
  const auto q = root_proxies(sphere);
  EXPECT_EQ(q[1], 0.0);
  EXPECT_EQ(q[2], 1.0);
}

TEST(Stats, SummaryAndSeparation) {
  std::vector<std::pair<Label, std::vector<double>>> rows;
  for (double r : {1.0, 2.0, 3.0, 4.0}) rows.push_back({{LabelClass::Text, "t"}, {r, 0.0}});
  for (double r : {3.0, 5.0, 7.0}) rows.push_back({{LabelClass::Image, "i"}, {0.0, r}});
  const auto stats = root_distance_stats(make_index(Space::Lorentz, rows), 4);
  const auto* t = stats.find(LabelClass::Text);
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->count, 4u);
  EXPECT_DOUBLE_EQ(t->mean, 2.5);
  EXPECT_DOUBLE_EQ(t->std, std::sqrt(5.0 / 3.0));
  EXPECT_DOUBLE_EQ(t->q25, 1.75);
  EXPECT_DOUBLE_EQ(t->median, 2.5);
  EXPECT_DOUBLE_EQ(t->q75, 3.25);
  EXPECT_EQ(stats.find(LabelClass::Root), nullptr);
  const auto sep = text_image_separation(stats);
  EXPECT_DOUBLE_EQ(sep.gap, 2.5);
  EXPECT_DOUBLE_EQ(sep.standard_error, std::sqrt(5.0 / 3.0 / 4.0 + 4.0 / 3.0));

  std::size_t total = 0;
  for (const auto& b : stats.histogram) total += b.count;
  EXPECT_EQ(total, 7u);
}

TEST(Stats, SingleOriginRow) {
  const auto stats = root_distance_stats(make_index(Space::Lorentz, {{{LabelClass::Root, "[ROOT]"}, {0.0, 0.0}}}));
  ASSERT_EQ(stats.summaries.size(), 1u);
  EXPECT_EQ(stats.summaries[0].mean, 0.0);
  EXPECT_EQ(stats.summaries[0].max, 0.0);
}

TEST(Interpolate, LorentzEndpointsAndRadialLinearity) {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const Curvature c(rng.uniform(0.1, 10.0));
    auto index = make_index(Space::Lorentz, {{{LabelClass::Root, "[ROOT]"}, std::vector<double>(5, 0.0)}});
    index.curvature = c.value();
    const auto y = space_of(exp_map_origin(TangentVector(random_vector(rng, 5)), c));
    const Matrix path = interpolate_steps(index, y);
    ASSERT_EQ(path.rows(), 50u);
    EXPECT_EQ(path.row_vector(0), y);
    for (double v : path.row(49)) EXPECT_EQ(v, 0.0);
    const double d0 = distance_from_origin(lift(y, c));
    double previous = norm(path.row(0));
    for (std::size_t k = 0; k < 50; ++k) {
      const double t = static_cast<double>(k) / 49.0;
      EXPECT_NEAR(distance_from_origin(lift(path.row_vector(k), c)), (1.0 - t) * d0, 1e-8);
      EXPECT_LE(norm(path.row(k)), previous);
      previous = norm(path.row(k));
    }
  }
}

TEST(Interpolate, SphereStepsAreUnit) {
  Rng rng(42);
  const auto root = normalized(random_vector(rng, 4));
  auto index = make_index(Space::Sphere, {{{LabelClass::Root, "[ROOT]"}, root}});
  const auto y = normalized(random_vector(rng, 4));
  const Matrix path = interpolate_steps(index, y, 20);
  EXPECT_EQ(path.row_vector(0), y);
  EXPECT_EQ(path.row_vector(19), root);
  for (std::size_t k = 0; k < 20; ++k) EXPECT_NEAR(norm(path.row(k)), 1.0, 1e-9);

  std::vector<double> anti = root;
  for (double& v : anti) v = -v;
  EXPECT_THROW(interpolate_steps(index, anti, 3), ValidationError);
  EXPECT_THROW(interpolate_steps(index, y, 1), ValidationError);
}

TEST(Traverse, OriginStepRetrievesRoot) {
  const auto index = chain_fixture();
  const auto result = traverse(index, std::vector<double>{0.0, 0.0, 0.0});
  for (const auto& s : result.steps) EXPECT_EQ(s.label, "[ROOT]");
}

TEST(Traverse, ConstructedChainInOrder) {
  const auto index = chain_fixture();
  const auto y = index.rows.row_vector(4);
  const auto result = traverse(index, y);
  ASSERT_EQ(result.steps.size(), 50u);
  EXPECT_EQ(result.unique_labels(), (std::vector<std::string>{"B", "A", "[ROOT]"}));
  EXPECT_EQ(result.steps.back().label, "[ROOT]");
  for (std::size_t k = 1; k < result.steps.size(); ++k) EXPECT_GT(result.steps[k].step, result.steps[k - 1].step);

  // D is the nearest text for some steps but its cone never holds them.
  const Matrix path = interpolate_steps(index, y);
  const auto d = index.point(3);
  bool d_nearest_somewhere = false;
  for (std::size_t k = 0; k + 1 < path.rows(); ++k) {
    const auto step = lift(path.row_vector(k), Curvature(1.0));
    EXPECT_GT(entailment_loss_pair(d, step), 0.0);
    const auto chosen = index.point(result.steps[k].row);
    d_nearest_somewhere = d_nearest_somewhere || lorentz_inner(d, step) > lorentz_inner(chosen, step);
  }
  EXPECT_TRUE(d_nearest_somewhere);
}

TEST(Traverse, LargeSlackReducesToNearestText) {
  const auto index = chain_fixture();
  TraverseOptions opt;
  opt.cone_slack = 10.0;
  const auto y = index.rows.row_vector(4);
  const auto result = traverse(index, y, opt);
  const Matrix path = interpolate_steps(index, y);
  for (std::size_t k = 0; k + 1 < path.rows(); ++k) {
    const auto step = lift(path.row_vector(k), Curvature(1.0));
    std::size_t best = 0;
    for (std::size_t r : {1u, 2u, 3u}) {
      if (lorentz_inner(index.point(r), step) > lorentz_inner(index.point(best), step)) best = r;
    }
    EXPECT_EQ(result.steps[k].row, best) << k;
  }
  const auto strict = traverse(index, y);
  std::size_t differing = 0;
  for (std::size_t k = 0; k < path.rows(); ++k) differing += strict.steps[k].row != result.steps[k].row;
  EXPECT_GT(differing, 0u);
}

TEST(Traverse, SphereUsesCosineOnly) {
  const double s = 1.0 / std::sqrt(2.0);
  auto index = make_index(Space::Sphere, {{{LabelClass::Root, "[ROOT]"}, {0.0, 1.0, 0.0}},
                                          {{LabelClass::Text, "near"}, {0.98, 0.0, std::sqrt(1.0 - 0.98 * 0.98)}},
                                          {{LabelClass::Text, "mid"}, {s, s, 0.0}},
                                          {{LabelClass::Image, "img"}, {1.0, 0.0, 0.0}}});
  const auto result = traverse(index, index.rows.row_vector(3), {.steps = 11});
  const Matrix path = interpolate_steps(index, index.rows.row_vector(3), 11);
  for (std::size_t k = 0; k + 1 < 11; ++k) {
    std::size_t best = 0;
    for (std::size_t r : {0u, 1u, 2u}) {
      if (dot(index.rows.row(r), path.row(k)) > dot(index.rows.row(best), path.row(k))) best = r;
    }
    EXPECT_EQ(result.steps[k].row, best) << k;
  }
  EXPECT_EQ(result.unique_labels(), (std::vector<std::string>{"near", "mid", "[ROOT]"}));
  EXPECT_THROW(traverse(make_index(Space::Sphere, {{{LabelClass::Text, "a"}, {1.0, 0.0}}}), std::vector<double>{1.0, 0.0}),
               ValidationError);
}

TEST(Retrieve, SelfRanksFirstAndScoresCalibrate) {
  Rng rng(43);
  std::vector<std::pair<Label, std::vector<double>>> rows;
  for (int i = 0; i < 12; ++i) {
    rows.push_back({{LabelClass::Text, "t" + std::to_string(i)},
                    space_of(exp_map_origin(TangentVector(random_vector(rng, 3)), Curvature(2.0)))});
  }
  auto index = make_index(Space::Lorentz, rows);
  index.curvature = 2.0;
  const auto hits = retrieve(index, index.rows.row(5), {.k = 12});
  EXPECT_EQ(hits.front().row, 5u);
  EXPECT_NEAR(hits.front().score, -1.0 / 2.0, 1e-12);
  for (std::size_t i = 1; i < hits.size(); ++i) EXPECT_GE(hits[i - 1].score, hits[i].score);

  const auto top4 = retrieve(index, index.rows.row(5), {.k = 4});
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(top4[i].row, hits[i].row);

  const auto cal = retrieve(index, index.rows.row(5), {.k = 12, .calibrated = true, .tau = 0.5});
  double total = 0.0;
  for (const auto& h : cal) total += h.score;
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(cal[i].row, hits[i].row);

  EXPECT_TRUE(retrieve(index, index.rows.row(0), {.k = 0}).empty());
  EXPECT_THROW(retrieve(index, index.rows.row(0), {.k = 13}), ValidationError);
}

TEST(Retrieve, TiesFilterAndSphere) {
  auto index = make_index(Space::Sphere, {{{LabelClass::Text, "a"}, {1.0, 0.0}},
                                          {{LabelClass::Image, "b"}, {0.0, 1.0}},
                                          {{LabelClass::Text, "c"}, {0.0, 1.0}},
                                          {{LabelClass::Text, "d"}, {0.0, 1.0}}});
  const std::vector<double> q{0.0, 2.0};
  const auto hits = retrieve(index, q, {.k = 4});
  EXPECT_EQ(hits[0].row, 1u);
  EXPECT_EQ(hits[1].row, 2u);
  EXPECT_EQ(hits[2].row, 3u);
  EXPECT_DOUBLE_EQ(hits[0].score, 1.0);
  const auto texts = retrieve(index, q, {.k = 3, .only = LabelClass::Text});
  EXPECT_EQ(texts[0].label, "c");
  const auto others = retrieve(index, q, {.k = 3, .exclude = 1});
  EXPECT_EQ(others[0].row, 2u);
}

TEST(Classify, EnsemblingSemantics) {
  const ClassifierSpace space{Space::Lorentz, 1.0, 0.5};
  const std::vector<double> p{0.3, -0.2};
  const auto single = class_embedding({"a", {p}}, space);
  const auto direct = exp_map_origin(TangentVector(scaled(p, 0.5)), Curvature(1.0));
  EXPECT_EQ(single, space_of(direct));
  const ClassPrompts two{"b", {{1.0, 0.0}, {0.0, 1.0}}};
  ClassPrompts dup = two;
  dup.prompts.push_back({1.0, 0.0});
  dup.prompts.push_back({0.0, 1.0});
  const auto e1 = class_embedding(two, space);
  const auto e2 = class_embedding(dup, space);
  EXPECT_NEAR(e1[0], e2[0], 1e-15);
  EXPECT_NEAR(e1[1], e2[1], 1e-15);
  EXPECT_THROW(class_embedding({"empty", {}}, space), ValidationError);
}

TEST(Classify, TwoClassFixture) {
  const ClassifierSpace space{Space::Lorentz, 1.0, 1.0};
  const std::vector<ClassPrompts> classes{{"A", {{1.0, 0.1}, {0.9, -0.1}}}, {"B", {{-1.0, 0.0}, {0.0, -1.0}}}};
  const auto image = on_ray(1.2, 5.0, 2);
  const auto result = classify(image, classes, space);
  const auto ia = lift(class_embedding(classes[0], space), Curvature(1.0));
  const auto ib = lift(class_embedding(classes[1], space), Curvature(1.0));
  const auto y = lift(image, Curvature(1.0));
  ASSERT_LT(lorentz_distance(y, ia), lorentz_distance(y, ib));
  EXPECT_EQ(result.scores[result.predicted].name, "A");

  const ClassifierSpace sphere{Space::Sphere, 1.0, 1.0};
  EXPECT_EQ(classify(std::vector<double>{-0.5, -0.4}, classes, sphere).predicted, 1u);
}
