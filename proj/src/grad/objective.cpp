#include "hypercone/grad/objective.hpp"

#include <string>

namespace hypercone::grad {

Var clamped_temperature(Var log_inv_temp) {
  return clamp_min(exp(-log_inv_temp), kMinTemperature);
}

Var clamped_curvature(Var log_curv) {
  return clamp_max(clamp_min(exp(log_curv), kMinCurvature), kMaxCurvature);
}

TapedPoint exp_map_origin(std::span<const Var> v, Var scale, Var curv) {
  std::vector<Var> u;
  u.reserve(v.size());
  for (const Var& x : v) {
    u.push_back(scale * x);
  }
  const Var factor = sinhc_sqrt(curv * dot(u, u));
  TapedPoint p;
  p.space.reserve(u.size());
  for (const Var& x : u) {
    p.space.push_back(factor * x);
  }
  p.time = sqrt(1.0 / curv + dot(p.space, p.space));
  return p;
}

Var lorentz_inner(const TapedPoint& x, const TapedPoint& y) {
  return dot(x.space, y.space) - x.time * y.time;
}

Var lorentz_distance(const TapedPoint& x, const TapedPoint& y, Var curv) {
  return acosh_clamped(-(curv * lorentz_inner(x, y))) / sqrt(curv);
}

Var half_aperture(const TapedPoint& x, Var curv, double K) {
  const Var r = sqrt(dot(x.space, x.space));
  return asin_clamped(2.0 * K / (sqrt(curv) * r), 1.0 - kAngleClampEps);
}

Var exterior_angle(const TapedPoint& x, const TapedPoint& y, Var curv) {
  const Var cxy = curv * lorentz_inner(x, y);
  const Var numer = y.time + x.time * cxy;
  const Var denom = sqrt(dot(x.space, x.space)) * sqrt(clamp_min(square(cxy) - 1.0, kExteriorSqrtFloor));
  return acos_clamped(numer / denom, -1.0 + kAngleClampEps, 1.0 - kAngleClampEps);
}

Var entailment_loss_pair(const TapedPoint& x_text, const TapedPoint& y_image, Var curv, double K) {
  return relu(exterior_angle(x_text, y_image, curv) - half_aperture(x_text, curv, K));
}

Var contrastive_loss(const VarRows& logits) {
  const std::size_t b = logits.size();
  if (b < 2) {
    throw ValidationError("contrastive_loss: need B >= 2");
  }
  std::vector<Var> image_terms;
  std::vector<Var> text_terms;
  std::vector<Var> column(b);
  for (std::size_t i = 0; i < b; ++i) {
    if (logits[i].size() != b) {
      throw ValidationError("contrastive_loss: logits must be square");
    }
    image_terms.push_back(logsumexp(logits[i]) - logits[i][i]);
    for (std::size_t r = 0; r < b; ++r) {
      column[r] = logits[r][i];
    }
    text_terms.push_back(logsumexp(column) - logits[i][i]);
  }
  const double inv_b = 1.0 / static_cast<double>(b);
  return 0.5 * (sum(image_terms) * inv_b + sum(text_terms) * inv_b);
}

TapedLoss total_loss(Tape& tape, const VarRows& images, const VarRows& texts,
                     const TapedScalars& s, double lambda, double K, SimilarityMode mode) {
  const std::size_t b = images.size();
  if (b < 2 || texts.size() != b) {
    throw ValidationError("total_loss: need matching batches with B >= 2");
  }
  const Var tau = clamped_temperature(s.log_inv_temp);
  VarRows logits(b, std::vector<Var>(b));
  TapedLoss out;
  out.entailment = tape.constant(0.0);

  if (mode == SimilarityMode::Cosine) {
    auto unit = [](const std::vector<Var>& v) {
      const Var n = sqrt(dot(v, v));
      std::vector<Var> u;
      u.reserve(v.size());
      for (const Var& x : v) {
        u.push_back(x / n);
      }
      return u;
    };
    VarRows img;
    VarRows txt;
    for (std::size_t i = 0; i < b; ++i) {
      img.push_back(unit(images[i]));
      txt.push_back(unit(texts[i]));
    }
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t j = 0; j < b; ++j) {
        logits[i][j] = dot(img[i], txt[j]) / tau;
      }
    }
    out.contrastive = contrastive_loss(logits);
    out.total = out.contrastive;
    return out;
  }

  const Var curv = clamped_curvature(s.log_curv);
  const Var scale_img = exp(s.log_scale_img);
  const Var scale_txt = exp(s.log_scale_txt);
  std::vector<TapedPoint> img;
  std::vector<TapedPoint> txt;
  for (std::size_t i = 0; i < b; ++i) {
    img.push_back(exp_map_origin(images[i], scale_img, curv));
    txt.push_back(exp_map_origin(texts[i], scale_txt, curv));
  }
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      const Var sim = mode == SimilarityMode::NegLorentzDistance
                          ? -lorentz_distance(img[i], txt[j], curv)
                          : lorentz_inner(img[i], txt[j]);
      logits[i][j] = sim / tau;
    }
  }
  out.contrastive = contrastive_loss(logits);
  if (lambda > 0.0) {
    std::vector<Var> pairs;
    pairs.reserve(b);
    for (std::size_t i = 0; i < b; ++i) {
      pairs.push_back(entailment_loss_pair(txt[i], img[i], curv, K));
    }
    out.entailment = sum(pairs) * (1.0 / static_cast<double>(b));
    out.total = out.contrastive + lambda * out.entailment;
  } else {
    out.total = out.contrastive;
  }
  return out;
}

std::vector<double> LossGradient::flatten() const {
  std::vector<double> out(d_images.data().begin(), d_images.data().end());
  out.insert(out.end(), d_texts.data().begin(), d_texts.data().end());
  out.insert(out.end(), {d_log_inv_temp, d_log_curv, d_log_scale_img, d_log_scale_txt});
  return out;
}

std::vector<double> flatten_inputs(const BatchEmbeddings& batch, const LossParams& params) {
  std::vector<double> out(batch.images.data().begin(), batch.images.data().end());
  out.insert(out.end(), batch.texts.data().begin(), batch.texts.data().end());
  out.insert(out.end(), {params.log_inv_temp, params.log_curv, params.log_scale_img,
                         params.log_scale_txt});
  return out;
}

void unflatten_inputs(std::span<const double> flat, BatchEmbeddings& batch, LossParams& params) {
  const std::size_t n = batch.images.data().size();
  if (flat.size() != 2 * n + 4) {
    throw ValidationError("unflatten_inputs: size mismatch");
  }
  std::copy(flat.begin(), flat.begin() + n, batch.images.data().begin());
  std::copy(flat.begin() + n, flat.begin() + 2 * n, batch.texts.data().begin());
  params.log_inv_temp = flat[2 * n];
  params.log_curv = flat[2 * n + 1];
  params.log_scale_img = flat[2 * n + 2];
  params.log_scale_txt = flat[2 * n + 3];
}

LossGradient loss_with_gradient(const BatchEmbeddings& batch, const LossParams& params,
                                SimilarityMode mode) {
  batch.validate();
  params.validate();
  Tape tape;
  auto leaves = [&](const Matrix& m) {
    VarRows rows(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (double v : m.row(r)) {
        rows[r].push_back(tape.leaf(v));
      }
    }
    return rows;
  };
  const VarRows images = leaves(batch.images);
  const VarRows texts = leaves(batch.texts);
  const TapedScalars s{tape.leaf(params.log_inv_temp), tape.leaf(params.log_curv),
                       tape.leaf(params.log_scale_img), tape.leaf(params.log_scale_txt)};
  const TapedLoss loss = total_loss(tape, images, texts, s, params.lambda, params.K, mode);
  const Gradients g = tape.backward(loss.total);

  LossGradient out;
  out.loss = {loss.contrastive.value(), loss.entailment.value(), loss.total.value()};
  out.d_images = Matrix(batch.images.rows(), batch.images.cols());
  out.d_texts = Matrix(batch.texts.rows(), batch.texts.cols());
  for (std::size_t r = 0; r < images.size(); ++r) {
    for (std::size_t c = 0; c < images[r].size(); ++c) {
      out.d_images(r, c) = g.wrt(images[r][c]);
      out.d_texts(r, c) = g.wrt(texts[r][c]);
    }
  }
  out.d_log_inv_temp = g.wrt(s.log_inv_temp);
  out.d_log_curv = g.wrt(s.log_curv);
  out.d_log_scale_img = g.wrt(s.log_scale_img);
  out.d_log_scale_txt = g.wrt(s.log_scale_txt);
  return out;
}

}  // namespace hypercone::grad
