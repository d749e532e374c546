#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hypercone/entailment.hpp"
#include "test_util.hpp"

using namespace hypercone;
namespace oracle = hypercone::testing::oracle;
using hypercone::testing::random_ball_vector;

namespace {

const Curvature kUnit{1.0};

// mpmath, 40 digits
constexpr double kAperExp1 = 0.1710160100969950039732855026247667209564;  // asin(0.2 / sinh 1)
constexpr double kAsinClampEdge = 1.5706549054385414585959785998028628612;  // asin(1 - 1e-8)
constexpr double kAcosLowEdge = 0.0001414213563551606353430918368885808987125;  // acos(1 - 1e-8)
constexpr double kAcosHighEdge = 3.141451232233438077827300291442614303298;  // acos(-1 + 1e-8)

HyperbolicPoint exp1(double a, double b = 0.0) {
  return exp_map_origin(TangentVector({a, b}), kUnit);
}

}  // namespace

TEST(HalfAperture, Examples) {
  EXPECT_NEAR(half_aperture(lift({0.2, 0.0}, kUnit)), kAsinClampEdge, 1e-12);
  EXPECT_NEAR(half_aperture(lift({0.4, 0.0}, kUnit)), std::numbers::pi / 6.0, 1e-14);
  EXPECT_GT(half_aperture(lift({0.4, 0.0}, kUnit)), half_aperture(lift({0.8, 0.0}, kUnit)));
  EXPECT_NEAR(half_aperture(exp1(1.0)), kAperExp1, 1e-15);
}

TEST(HalfAperture, OriginIsAnError) {
  EXPECT_THROW(half_aperture(HyperbolicPoint::origin(2, kUnit)), ValidationError);
  EXPECT_THROW(half_aperture(lift({1.0}, kUnit), ConeParams{0.0}), ValidationError);
}

TEST(HalfAperture, ReducesToFixedCurvatureFormAtCEqualsOne) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto s = random_ball_vector(rng, 4, 5.0);
    const double r = norm(s);
    if (r < 0.25) continue;
    EXPECT_NEAR(half_aperture(lift(s, kUnit)), std::asin(0.2 / r), 1e-14);
  }
}

TEST(HalfAperture, MatchesPoincareBallForm) {
  Rng rng(4);
  int checked = 0;
  while (checked < 500) {
    const double c = rng.uniform(0.1, 10.0);
    const auto xb = random_ball_vector(rng, 5, 0.999 / std::sqrt(c));
    const double sq = squared_norm(xb);
    const double arg = 0.1 * (1.0 - c * sq) / (std::sqrt(c) * std::sqrt(sq));
    if (!(arg < 0.999)) continue;
    const Curvature curv(c);
    EXPECT_NEAR(half_aperture(poincare_to_lorentz(xb, curv)), oracle::poincare_half_aperture(xb, c, 0.1),
                1e-10);
    ++checked;
  }
}

TEST(ExteriorAngle, Examples) {
  EXPECT_NEAR(exterior_angle(exp1(1.0), exp1(2.0)), kAcosLowEdge, 1e-9);
  EXPECT_NEAR(exterior_angle(exp1(1.0), exp1(-1.0)), kAcosHighEdge, 1e-9);
  EXPECT_THROW(exterior_angle(HyperbolicPoint::origin(2, kUnit), exp1(1.0)), ValidationError);
}

TEST(ExteriorAngle, MatchesLawOfCosines) {
  Rng rng(8);
  int checked = 0;
  while (checked < 1000) {
    const double c = rng.uniform(0.1, 10.0);
    const Curvature curv(c);
    const auto xs = random_ball_vector(rng, 4, 3.0);
    const auto ys = random_ball_vector(rng, 4, 3.0);
    const auto x = lift(xs, curv);
    const auto y = lift(ys, curv);
    if (std::abs(exterior_argument(x, y)) > 1.0 - 1e-4 || oracle::distance(xs, ys, c) < 1e-2 ||
        x.space_norm() < 1e-2) {
      continue;
    }
    EXPECT_NEAR(exterior_angle(x, y), oracle::exterior_angle_law_of_cosines(xs, ys, c), 1e-6);
    ++checked;
  }
}

TEST(EntailmentLoss, Examples) {
  EXPECT_EQ(entailment_loss_pair(exp1(1.0), exp1(2.0)), 0.0);
  EXPECT_NEAR(entailment_loss_pair(exp1(1.0), exp1(-1.0)), kAcosHighEdge - kAperExp1, 1e-9);
  EXPECT_NEAR(entailment_loss_pair(exp1(1.0), exp1(-1.0)), 2.970435222136443, 1e-9);
}

TEST(EntailmentLoss, HingeDichotomyAndNonNegativity) {
  Rng rng(9);
  int zero = 0;
  int positive = 0;
  for (int i = 0; i < 3000; ++i) {
    const Curvature curv(rng.uniform(0.1, 10.0));
    const auto x = lift(random_ball_vector(rng, 3, 2.0), curv);
    const auto y = lift(random_ball_vector(rng, 3, 4.0), curv);
    if (x.space_norm() < 1e-6) continue;
    const double loss = entailment_loss_pair(x, y);
    const bool inside = exterior_angle(x, y) <= half_aperture(x);
    EXPECT_GE(loss, 0.0);
    EXPECT_EQ(loss == 0.0, inside);
    (inside ? zero : positive)++;
  }
  EXPECT_GT(zero, 0);
  EXPECT_GT(positive, 0);
}

TEST(EntailmentLoss, InvariantUnderJointRotation) {
  Rng rng(10);
  for (int i = 0; i < 300; ++i) {
    const Curvature curv(rng.uniform(0.1, 10.0));
    const auto xs = random_ball_vector(rng, 5, 3.0);
    const auto ys = random_ball_vector(rng, 5, 3.0);
    const Matrix q = hypercone::testing::random_orthogonal(rng, 5);
    const auto x = lift(xs, curv);
    const auto y = lift(ys, curv);
    const auto rx = lift(hypercone::testing::apply(q, xs), curv);
    const auto ry = lift(hypercone::testing::apply(q, ys), curv);
    EXPECT_NEAR(half_aperture(x), half_aperture(rx), 1e-9);
    EXPECT_NEAR(exterior_angle(x, y), exterior_angle(rx, ry), 1e-6);
    EXPECT_NEAR(entailment_loss_pair(x, y), entailment_loss_pair(rx, ry), 1e-6);
  }
}
