#include "hypercone/grad/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "hypercone/grad/finite_diff.hpp"
#include "hypercone/grad/objective.hpp"
#include "hypercone/grad/tape.hpp"
#include "hypercone/random.hpp"

namespace hypercone::grad {

namespace {

struct PrimitiveCase {
  Op op;
  std::size_t arity;
  std::function<double(Rng&)> sample;
  std::function<Var(std::span<const Var>)> build;
  /// Rejects samples near a kink or clamp edge.
  std::function<bool(std::span<const double>)> valid = [](std::span<const double>) { return true; };
};

std::function<double(Rng&)> uniform_in(double lo, double hi) {
  return [lo, hi](Rng& rng) { return rng.uniform(lo, hi); };
}

std::function<bool(std::span<const double>)> away_from(double edge, double margin) {
  return [edge, margin](std::span<const double> x) { return std::abs(x[0] - edge) > margin; };
}

std::vector<PrimitiveCase> primitive_cases(double margin) {
  const std::array<double, 5> weights{0.7, -1.3, 0.25, 2.0, -0.4};
  std::vector<PrimitiveCase> cases = {
      {Op::Add, 2, uniform_in(-2, 2), [](auto v) { return v[0] + v[1]; }},
      {Op::Sub, 2, uniform_in(-2, 2), [](auto v) { return v[0] - v[1]; }},
      {Op::Mul, 2, uniform_in(-2, 2), [](auto v) { return v[0] * v[1]; }},
      {Op::Div, 2, uniform_in(0.5, 2), [](auto v) { return v[0] / v[1]; }},
      {Op::Neg, 1, uniform_in(-2, 2), [](auto v) { return -v[0]; }},
      {Op::Square, 1, uniform_in(-2, 2), [](auto v) { return square(v[0]); }},
      {Op::Exp, 1, uniform_in(-2, 2), [](auto v) { return exp(v[0]); }},
      {Op::Log, 1, uniform_in(0.2, 3), [](auto v) { return log(v[0]); }},
      {Op::Sqrt, 1, uniform_in(0.2, 3), [](auto v) { return sqrt(v[0]); }},
      {Op::Sinh, 1, uniform_in(-2, 2), [](auto v) { return sinh(v[0]); }},
      {Op::Cosh, 1, uniform_in(-2, 2), [](auto v) { return cosh(v[0]); }},
      {Op::Tanh, 1, uniform_in(-2, 2), [](auto v) { return tanh(v[0]); }},
      {Op::Asinh, 1, uniform_in(-3, 3), [](auto v) { return asinh(v[0]); }},
      {Op::AcoshClamped, 1, uniform_in(1.05, 4), [](auto v) { return acosh_clamped(v[0]); }},
      {Op::AsinClamped, 1, uniform_in(-0.95, 0.95), [](auto v) { return asin_clamped(v[0], 0.8); },
       away_from(0.8, margin)},
      {Op::AcosClamped, 1, uniform_in(-0.95, 0.95),
       [](auto v) { return acos_clamped(v[0], -0.8, 0.8); },
       [margin](auto x) { return std::abs(std::abs(x[0]) - 0.8) > margin; }},
      {Op::ClampMin, 1, uniform_in(-1, 1), [](auto v) { return clamp_min(v[0], 0.3); },
       away_from(0.3, margin)},
      {Op::ClampMax, 1, uniform_in(-1, 1), [](auto v) { return clamp_max(v[0], 0.3); },
       away_from(0.3, margin)},
      {Op::Relu, 1, uniform_in(-1, 1), [](auto v) { return relu(v[0]); }, away_from(0.0, margin)},
      // log-uniform so the small-argument series branch is exercised too
      {Op::SinhcSqrt, 1, [](Rng& rng) { return std::exp(rng.uniform(std::log(2e-5), std::log(9.0))); },
       [](auto v) { return sinhc_sqrt(v[0]); }},
      {Op::Dot, 8, uniform_in(-2, 2), [](auto v) { return dot(v.subspan(0, 4), v.subspan(4, 4)); }},
      {Op::Sum, 5, uniform_in(-2, 2), [](auto v) { return sum(v); }},
      {Op::LinComb, 5, uniform_in(-2, 2), [weights](auto v) { return lincomb(v, weights); }},
      {Op::LogSumExp, 5, uniform_in(-3, 3), [](auto v) { return logsumexp(v); }},
  };
  return cases;
}

struct RandomCase {
  BatchEmbeddings batch;
  LossParams params;
};

RandomCase random_case(Rng& rng, std::size_t b, std::size_t n, double lambda) {
  RandomCase rc;
  rc.batch.images = Matrix(b, n);
  rc.batch.texts = Matrix(b, n);
  for (double& v : rc.batch.images.data()) {
    v = rng.normal();
  }
  for (double& v : rc.batch.texts.data()) {
    v = rng.normal();
  }
  rc.params = LossParams::initial(n);
  rc.params.log_inv_temp += rng.uniform(-0.5, 0.5);
  rc.params.log_curv = rng.uniform(-0.7, 0.7);
  rc.params.log_scale_img += rng.uniform(-0.5, 0.5);
  rc.params.log_scale_txt += rng.uniform(-0.5, 0.5);
  rc.params.lambda = lambda;
  return rc;
}

}  // namespace

bool GradcheckSummary::passed() const {
  return !cases.empty() &&
         std::all_of(cases.begin(), cases.end(), [](const GradcheckCase& c) { return c.passed; });
}

double boundary_margin(const BatchEmbeddings& batch, const LossParams& params, SimilarityMode mode) {
  double m = std::numeric_limits<double>::infinity();
  m = std::min(m, std::abs(std::exp(-params.log_inv_temp) - kMinTemperature));
  if (mode == SimilarityMode::Cosine) {
    return m;
  }
  const double c = std::exp(params.log_curv);
  m = std::min({m, std::abs(c - kMinCurvature), std::abs(c - kMaxCurvature)});
  const LiftedBatch lifted = lift_batch(batch, params);
  const double cv = params.curvature().value();
  if (mode == SimilarityMode::NegLorentzDistance) {
    for (const auto& x : lifted.images) {
      for (const auto& y : lifted.texts) {
        m = std::min(m, -cv * lorentz_inner(x, y) - 1.0);
      }
    }
  }
  if (params.lambda > 0.0) {
    const double edge = 1.0 - kAngleClampEps;
    for (std::size_t i = 0; i < lifted.texts.size(); ++i) {
      const auto& x = lifted.texts[i];
      const auto& y = lifted.images[i];
      m = std::min(m, std::abs(edge - aperture_argument(x, params.cone())));
      m = std::min(m, edge - std::abs(exterior_argument(x, y)));
      const double cxy = cv * lorentz_inner(x, y);
      m = std::min(m, cxy * cxy - 1.0 - kExteriorSqrtFloor);
      m = std::min(m, std::abs(exterior_angle(x, y) - half_aperture(x, params.cone())));
    }
  }
  return m;
}

GradcheckSummary run_primitive_checks(const GradcheckOptions& opts) {
  GradcheckSummary summary;
  Rng rng(opts.base_seed);
  for (const PrimitiveCase& pc : primitive_cases(opts.boundary_margin)) {
    GradcheckCase result;
    result.name = "primitive/" + std::string(op_name(pc.op));
    result.passed = true;
    auto evaluate = [&pc](std::span<const double> x) {
      Tape tape;
      std::vector<Var> vars;
      for (double v : x) {
        vars.push_back(tape.leaf(v));
      }
      return pc.build(vars).value();
    };
    while (result.checked < opts.primitive_points) {
      std::vector<double> x(pc.arity);
      for (double& v : x) {
        v = pc.sample(rng);
      }
      if (!pc.valid(x)) {
        ++result.skipped;
        continue;
      }
      Tape tape;
      std::vector<Var> vars;
      for (double v : x) {
        vars.push_back(tape.leaf(v));
      }
      const Gradients g = tape.backward(pc.build(vars));
      std::vector<double> analytic;
      for (const Var& v : vars) {
        analytic.push_back(g.wrt(v));
      }
      const GradReport r =
          compare_gradients(analytic, finite_diff(evaluate, x, 1e-6), opts.primitive_rtol,
                            opts.primitive_atol);
      result.passed = result.passed && r.passed;
      result.max_abs_err = std::max(result.max_abs_err, r.max_abs_err);
      result.max_rel_err = std::max(result.max_rel_err, r.max_rel_err);
      ++result.checked;
    }
    summary.cases.push_back(result);
  }
  return summary;
}

GradcheckSummary run_loss_checks(const GradcheckOptions& opts) {
  struct Config {
    SimilarityMode mode;
    double lambda;
  };
  const std::array configs{
      Config{SimilarityMode::NegLorentzDistance, 0.0}, Config{SimilarityMode::NegLorentzDistance, 0.2},
      Config{SimilarityMode::LorentzInner, 0.0},       Config{SimilarityMode::LorentzInner, 0.2},
      Config{SimilarityMode::Cosine, 0.0},
  };
  GradcheckSummary summary;
  for (const Config& cfg : configs) {
    GradcheckCase result;
    result.name = std::string("total_loss/") + to_string(cfg.mode) +
                  "/lambda=" + (cfg.lambda > 0.0 ? "0.2" : "0");
    result.passed = true;
    Rng rng(opts.base_seed * 7919 + static_cast<std::uint64_t>(cfg.mode) * 31 +
            (cfg.lambda > 0.0 ? 1 : 0));
    while (result.checked < opts.seeds) {
      RandomCase rc = random_case(rng, opts.batch, opts.dim, cfg.lambda);
      if (boundary_margin(rc.batch, rc.params, cfg.mode) < opts.boundary_margin) {
        ++result.skipped;
        if (result.skipped > 100 * opts.seeds) {
          result.passed = false;
          break;
        }
        continue;
      }
      const LossGradient lg = loss_with_gradient(rc.batch, rc.params, cfg.mode);
      const double reference = total_loss(rc.batch, rc.params, cfg.mode).total;
      const bool forward_ok =
          std::abs(lg.loss.total - reference) <= 1e-10 * (1.0 + std::abs(reference));

      auto f = [&](std::span<const double> flat) {
        BatchEmbeddings b = rc.batch;
        LossParams p = rc.params;
        unflatten_inputs(flat, b, p);
        return total_loss(b, p, cfg.mode).total;
      };
      const GradReport r = compare_gradients(
          lg.flatten(), finite_diff(f, flatten_inputs(rc.batch, rc.params)), opts.rtol, opts.atol);
      result.passed = result.passed && r.passed && forward_ok;
      result.max_abs_err = std::max(result.max_abs_err, r.max_abs_err);
      result.max_rel_err = std::max(result.max_rel_err, r.max_rel_err);
      ++result.checked;
    }
    summary.cases.push_back(result);
  }
  return summary;
}

GradcheckSummary run_gradcheck_suite(const GradcheckOptions& opts) {
  GradcheckSummary all = run_primitive_checks(opts);
  GradcheckSummary loss = run_loss_checks(opts);
  all.cases.insert(all.cases.end(), loss.cases.begin(), loss.cases.end());
  return all;
}

}  // namespace hypercone::grad
