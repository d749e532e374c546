#include "hypercone/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hypercone {

const char* to_string(SimilarityMode mode) {
  switch (mode) {
    case SimilarityMode::NegLorentzDistance:
      return "neg_lorentz_distance";
    case SimilarityMode::LorentzInner:
      return "lorentz_inner";
    case SimilarityMode::Cosine:
      return "cosine";
  }
  return "unknown";
}

LossParams LossParams::initial(std::size_t dim) {
  if (dim == 0) {
    throw ValidationError("LossParams::initial: dimension must be positive");
  }
  LossParams p;
  p.log_inv_temp = std::log(1.0 / kInitialTemperature);
  p.log_curv = 0.0;
  p.log_scale_img = -0.5 * std::log(static_cast<double>(dim));
  p.log_scale_txt = p.log_scale_img;
  return p;
}

double LossParams::temperature() const {
  return std::max(std::exp(-log_inv_temp), kMinTemperature);
}

Curvature LossParams::curvature() const { return Curvature::clamped(std::exp(log_curv)); }

double LossParams::scale_img() const { return std::exp(log_scale_img); }

double LossParams::scale_txt() const { return std::exp(log_scale_txt); }

bool LossParams::temperature_clamped() const { return std::exp(-log_inv_temp) < kMinTemperature; }

bool LossParams::curvature_clamped() const {
  const double c = std::exp(log_curv);
  return c < kMinCurvature || c > kMaxCurvature;
}

void LossParams::validate() const {
  for (double v : {log_inv_temp, log_curv, log_scale_img, log_scale_txt, lambda, K}) {
    if (!std::isfinite(v)) {
      throw ValidationError("LossParams: non-finite value");
    }
  }
  if (lambda < 0.0) {
    throw ValidationError("LossParams: lambda must be non-negative");
  }
  cone().validate();
}

void BatchEmbeddings::validate() const {
  if (images.rows() < 2) {
    throw ValidationError("batch needs at least 2 pairs, got " + std::to_string(images.rows()));
  }
  if (images.rows() != texts.rows() || images.cols() != texts.cols()) {
    throw ValidationError("batch: image and text matrices differ in shape");
  }
  for (const Matrix* m : {&images, &texts}) {
    for (std::size_t r = 0; r < m->rows(); ++r) {
      if (!all_finite(m->row(r))) {
        throw ValidationError(std::string("batch: non-finite ") +
                              (m == &images ? "image" : "text") + " row " + std::to_string(r));
      }
    }
  }
}

LiftedBatch lift_batch(const BatchEmbeddings& batch, const LossParams& params) {
  batch.validate();
  params.validate();
  const Curvature curv = params.curvature();
  LiftedBatch out;
  out.images.reserve(batch.size());
  out.texts.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out.images.push_back(
        exp_map_origin(TangentVector(scaled(batch.images.row(i), params.scale_img())), curv));
    out.texts.push_back(
        exp_map_origin(TangentVector(scaled(batch.texts.row(i), params.scale_txt())), curv));
  }
  return out;
}

Matrix logit_matrix(std::span<const HyperbolicPoint> images, std::span<const HyperbolicPoint> texts,
                    const LossParams& params, SimilarityMode mode) {
  if (mode == SimilarityMode::Cosine) {
    throw ValidationError("logit_matrix: cosine similarity is undefined for hyperbolic points");
  }
  if (images.size() != texts.size()) {
    throw ValidationError("logit_matrix: batch size mismatch");
  }
  const double tau = params.temperature();
  Matrix logits(images.size(), texts.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = 0; j < texts.size(); ++j) {
      const double sim = mode == SimilarityMode::NegLorentzDistance
                             ? -lorentz_distance(images[i], texts[j])
                             : lorentz_inner(images[i], texts[j]);
      logits(i, j) = sim / tau;
    }
  }
  return logits;
}

Matrix cosine_logit_matrix(const Matrix& images, const Matrix& texts, const LossParams& params) {
  if (images.rows() != texts.rows() || images.cols() != texts.cols()) {
    throw ValidationError("cosine_logit_matrix: shape mismatch");
  }
  const Matrix img = normalize_rows(images);
  const Matrix txt = normalize_rows(texts);
  const double tau = params.temperature();
  Matrix logits(img.rows(), txt.rows());
  for (std::size_t i = 0; i < img.rows(); ++i) {
    for (std::size_t j = 0; j < txt.rows(); ++j) {
      logits(i, j) = dot(img.row(i), txt.row(j)) / tau;
    }
  }
  return logits;
}

double row_cross_entropy(std::span<const double> row, std::size_t target) {
  const double mx = *std::max_element(row.begin(), row.end());
  double sum = 0.0;
  for (double v : row) {
    sum += std::exp(v - mx);
  }
  return mx + std::log(sum) - row[target];
}

double contrastive_loss(const Matrix& logits) {
  if (logits.rows() != logits.cols() || logits.rows() < 2) {
    throw ValidationError("contrastive_loss: need a square matrix with B >= 2");
  }
  const std::size_t b = logits.rows();
  const Matrix transposed = logits.transposed();
  double image_dir = 0.0;
  double text_dir = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    image_dir += row_cross_entropy(logits.row(i), i);
    text_dir += row_cross_entropy(transposed.row(i), i);
  }
  return 0.5 * (image_dir / static_cast<double>(b) + text_dir / static_cast<double>(b));
}

LossBreakdown total_loss(const BatchEmbeddings& batch, const LossParams& params,
                         SimilarityMode mode) {
  LossBreakdown out;
  if (mode == SimilarityMode::Cosine) {
    batch.validate();
    params.validate();
    out.contrastive = contrastive_loss(cosine_logit_matrix(batch.images, batch.texts, params));
    out.total = out.contrastive;
    return out;
  }
  const LiftedBatch lifted = lift_batch(batch, params);
  out.contrastive = contrastive_loss(logit_matrix(lifted.images, lifted.texts, params, mode));
  if (params.lambda > 0.0) {
    double sum = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      sum += entailment_loss_pair(lifted.texts[i], lifted.images[i], params.cone());
    }
    out.entailment = sum / static_cast<double>(batch.size());
  }
  out.total = out.contrastive + params.lambda * out.entailment;
  return out;
}

Matrix normalize_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto n = normalized(m.row(r));
    std::copy(n.begin(), n.end(), out.row(r).begin());
  }
  return out;
}

}  // namespace hypercone
