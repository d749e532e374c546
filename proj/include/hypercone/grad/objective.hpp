#pragma once

// The training objective expressed on a Tape. Each function mirrors its
// double-precision counterpart in geometry/entailment/loss; the two routes
// are checked against each other (forward values) and against finite
// differences of the double route (gradients).

#include <vector>

#include "hypercone/grad/tape.hpp"
#include "hypercone/loss.hpp"

namespace hypercone::grad {

struct TapedScalars {
  Var log_inv_temp;
  Var log_curv;
  Var log_scale_img;
  Var log_scale_txt;
};

struct TapedPoint {
  std::vector<Var> space;
  Var time;
};

struct TapedLoss {
  Var contrastive;
  Var entailment;
  Var total;
};

using VarRows = std::vector<std::vector<Var>>;

Var clamped_temperature(Var log_inv_temp);
Var clamped_curvature(Var log_curv);

TapedPoint exp_map_origin(std::span<const Var> v, Var scale, Var curv);
Var lorentz_inner(const TapedPoint& x, const TapedPoint& y);
Var lorentz_distance(const TapedPoint& x, const TapedPoint& y, Var curv);
Var half_aperture(const TapedPoint& x, Var curv, double K);
Var exterior_angle(const TapedPoint& x, const TapedPoint& y, Var curv);
Var entailment_loss_pair(const TapedPoint& x_text, const TapedPoint& y_image, Var curv, double K);
Var contrastive_loss(const VarRows& logits);

TapedLoss total_loss(Tape& tape, const VarRows& images, const VarRows& texts,
                     const TapedScalars& scalars, double lambda, double K, SimilarityMode mode);

/// Loss value plus its gradient with respect to every batch entry and the
/// four log-space scalars.
struct LossGradient {
  LossBreakdown loss;
  Matrix d_images;
  Matrix d_texts;
  double d_log_inv_temp = 0.0;
  double d_log_curv = 0.0;
  double d_log_scale_img = 0.0;
  double d_log_scale_txt = 0.0;

  /// images (row-major), texts (row-major), then the four scalars.
  std::vector<double> flatten() const;
};

LossGradient loss_with_gradient(const BatchEmbeddings& batch, const LossParams& params,
                                SimilarityMode mode);

/// Inverse of LossGradient::flatten's layout for inputs: packs a batch and
/// the four scalars into one vector, and unpacks it again.
std::vector<double> flatten_inputs(const BatchEmbeddings& batch, const LossParams& params);
void unflatten_inputs(std::span<const double> flat, BatchEmbeddings& batch, LossParams& params);

}  // namespace hypercone::grad
