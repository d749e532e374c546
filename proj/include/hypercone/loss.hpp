#pragma once

// Batch contrastive objective with an entailment term. Logit convention:
// row i of the logit matrix is image i scored against every text; the text
// direction of the symmetric loss uses the transpose.

#include <cstddef>
#include <span>
#include <vector>

#include "hypercone/entailment.hpp"
#include "hypercone/geometry.hpp"
#include "hypercone/linalg.hpp"

namespace hypercone {

inline constexpr double kMinTemperature = 0.01;
inline constexpr double kInitialTemperature = 0.07;
inline constexpr double kDefaultLambda = 0.2;

enum class SimilarityMode {
  NegLorentzDistance,
  LorentzInner,
  Cosine,  // spherical baseline only
};

const char* to_string(SimilarityMode mode);

/// Learnable scalars, stored in log space. Clamps are applied when a value is
/// read, never written back, so optimizer state is unaffected by clamping.
struct LossParams {
  double log_inv_temp = 0.0;
  double log_curv = 0.0;
  double log_scale_img = 0.0;
  double log_scale_txt = 0.0;
  double lambda = kDefaultLambda;
  double K = kDefaultConeK;

  /// tau = 0.07, c = 1, alpha_img = alpha_txt = 1/sqrt(dim).
  static LossParams initial(std::size_t dim);

  /// max(exp(-log_inv_temp), 0.01).
  double temperature() const;
  /// exp(log_curv) clamped into [0.1, 10].
  Curvature curvature() const;
  double scale_img() const;
  double scale_txt() const;
  ConeParams cone() const { return ConeParams{K}; }

  bool temperature_clamped() const;
  bool curvature_clamped() const;

  void validate() const;
};

/// Pre-lift encoder outputs; texts row i is paired with images row i.
struct BatchEmbeddings {
  Matrix images;
  Matrix texts;

  std::size_t size() const noexcept { return images.rows(); }
  std::size_t dim() const noexcept { return images.cols(); }

  /// Requires B >= 2, matching shapes and finite entries.
  void validate() const;
};

struct LiftedBatch {
  std::vector<HyperbolicPoint> images;
  std::vector<HyperbolicPoint> texts;
};

struct LossBreakdown {
  double contrastive = 0.0;
  double entailment = 0.0;  // unweighted batch mean of pair losses
  double total = 0.0;
};

/// Scales each row by its modality's alpha and applies the origin exp map.
LiftedBatch lift_batch(const BatchEmbeddings& batch, const LossParams& params);

/// B x B similarity logits divided by the (clamped) temperature.
/// Cosine mode is rejected here; spherical embeddings go through
/// cosine_logit_matrix.
Matrix logit_matrix(std::span<const HyperbolicPoint> images, std::span<const HyperbolicPoint> texts,
                    const LossParams& params, SimilarityMode mode);

/// Cosine logits between unit-normalized rows, divided by the temperature.
Matrix cosine_logit_matrix(const Matrix& images, const Matrix& texts, const LossParams& params);

/// Mean cross-entropy against the diagonal, averaged over the matrix and
/// its transpose.
double contrastive_loss(const Matrix& logits);

/// Cross-entropy of one row against target column; stable log-sum-exp.
double row_cross_entropy(std::span<const double> row, std::size_t target);

/// contrastive + lambda * mean entailment. With lambda == 0 or in cosine mode
/// the entailment term is not evaluated and reported as 0.
LossBreakdown total_loss(const BatchEmbeddings& batch, const LossParams& params,
                         SimilarityMode mode);

Matrix normalize_rows(const Matrix& m);

}  // namespace hypercone
