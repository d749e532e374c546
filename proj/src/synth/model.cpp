#include "hypercone/synth/model.hpp"

#include <cmath>

#include "hypercone/errors.hpp"

namespace hypercone::synth {

namespace {
constexpr double kTanhSecondMoment = 0.39429449;  // E[tanh(g)^2], g ~ N(0, 1)
}  // namespace

std::size_t EncoderShape::param_count() const {
  if (hidden == 0) return out * in + out;
  return hidden * in + hidden + out * hidden + out;
}

std::vector<TensorInfo> model_layout(const EncoderShape& shape) {
  if (shape.in == 0 || shape.out == 0) throw ValidationError("encoder dimensions must be positive");
  std::vector<TensorInfo> layout;
  std::size_t offset = 0;
  auto add = [&](std::string name, std::vector<std::size_t> dims, bool decay) {
    std::size_t size = 1;
    for (auto d : dims) size *= d;
    layout.push_back(TensorInfo{std::move(name), std::move(dims), offset, size, decay});
    offset += size;
  };
  for (const char* enc : {"text", "image"}) {
    const std::string prefix = enc;
    if (shape.hidden > 0) {
      add(prefix + ".w1", {shape.hidden, shape.in}, true);
      add(prefix + ".b1", {shape.hidden}, false);
      add(prefix + ".w", {shape.out, shape.hidden}, true);
    } else {
      add(prefix + ".w", {shape.out, shape.in}, true);
    }
    add(prefix + ".b", {shape.out}, false);
  }
  for (const char* s : {"log_inv_temp", "log_curv", "log_scale_img", "log_scale_txt"}) add(s, {1}, false);
  return layout;
}

Model::Model(EncoderShape shape, std::vector<double> params)
    : shape_(shape), params_(std::move(params)), layout_(model_layout(shape)) {
  const auto& last = layout_.back();
  if (params_.size() != last.offset + last.size) {
    throw ValidationError("model parameter count mismatch: expected " +
                          std::to_string(last.offset + last.size) + ", got " +
                          std::to_string(params_.size()));
  }
}

Model Model::initialize(EncoderShape shape, double input_rms, Rng& rng) {
  if (!(input_rms > 0.0) || !std::isfinite(input_rms)) throw ValidationError("input_rms must be positive");
  const auto layout = model_layout(shape);
  std::vector<double> params(layout.back().offset + layout.back().size, 0.0);
  for (const auto& t : layout) {
    if (!t.decay) continue;
    const bool reads_latent = t.shape[1] == shape.in && (shape.hidden == 0 || t.name.ends_with(".w1"));
    const double sd = reads_latent ? 1.0 / input_rms
                                   : 1.0 / std::sqrt(kTanhSecondMoment * static_cast<double>(t.shape[1]));
    for (std::size_t i = 0; i < t.size; ++i) params[t.offset + i] = rng.normal(0.0, sd);
  }
  const LossParams init = LossParams::initial(shape.out);
  const std::size_t s = 2 * shape.param_count();
  params[s] = init.log_inv_temp;
  params[s + 1] = init.log_curv;
  params[s + 2] = init.log_scale_img;
  params[s + 3] = init.log_scale_txt;
  return Model(shape, std::move(params));
}

const TensorInfo& Model::tensor(const std::string& name) const {
  for (const auto& t : layout_) {
    if (t.name == name) return t;
  }
  throw ValidationError("unknown tensor " + name);
}

LossParams Model::loss_params(double lambda, double K) const {
  const std::size_t s = scalar_offset();
  LossParams p;
  p.log_inv_temp = params_[s];
  p.log_curv = params_[s + 1];
  p.log_scale_img = params_[s + 2];
  p.log_scale_txt = params_[s + 3];
  p.lambda = lambda;
  p.K = K;
  return p;
}

std::vector<double> Model::encode(std::size_t base, std::span<const double> latent) const {
  if (latent.size() != shape_.in) throw ValidationError("latent dimension mismatch");
  const double* p = params_.data() + base;
  std::vector<double> x(latent.begin(), latent.end());
  if (shape_.hidden > 0) {
    std::vector<double> h(shape_.hidden);
    const double* b1 = p + shape_.hidden * shape_.in;
    for (std::size_t r = 0; r < shape_.hidden; ++r) {
      h[r] = std::tanh(dot({p + r * shape_.in, shape_.in}, x) + b1[r]);
    }
    p = b1 + shape_.hidden;
    x = std::move(h);
  }
  const std::size_t in = x.size();
  const double* b = p + shape_.out * in;
  std::vector<double> out(shape_.out);
  for (std::size_t r = 0; r < shape_.out; ++r) out[r] = dot({p + r * in, in}, x) + b[r];
  return out;
}

std::vector<double> Model::encode_text(std::span<const double> latent) const { return encode(0, latent); }

std::vector<double> Model::encode_image(std::span<const double> latent) const {
  return encode(shape_.param_count(), latent);
}

Model Model::folded() const {
  Model out = *this;
  const std::size_t s = scalar_offset();
  for (const auto& [prefix, scale_index] : {std::pair{std::string("text"), s + 3}, std::pair{std::string("image"), s + 2}}) {
    const double alpha = std::exp(params_[scale_index]);
    for (const char* name : {".w", ".b"}) {
      const auto& t = tensor(prefix + name);
      for (std::size_t i = 0; i < t.size; ++i) out.params_[t.offset + i] *= alpha;
    }
    out.params_[scale_index] = 0.0;
  }
  return out;
}

std::vector<grad::Var> encode_taped(const EncoderShape& shape, std::span<const grad::Var> params,
                                    std::span<const double> latent) {
  if (latent.size() != shape.in) throw ValidationError("latent dimension mismatch");
  std::vector<double> x(latent.begin(), latent.end());
  std::size_t pos = 0;
  std::vector<grad::Var> hidden;
  if (shape.hidden > 0) {
    hidden.reserve(shape.hidden);
    const std::size_t b1 = shape.hidden * shape.in;
    for (std::size_t r = 0; r < shape.hidden; ++r) {
      const auto row = params.subspan(r * shape.in, shape.in);
      hidden.push_back(grad::tanh(grad::lincomb(row, x) + params[b1 + r]));
    }
    pos = b1 + shape.hidden;
  }
  std::vector<grad::Var> out;
  out.reserve(shape.out);
  if (shape.hidden == 0) {
    const std::size_t b = shape.out * shape.in;
    for (std::size_t r = 0; r < shape.out; ++r) {
      out.push_back(grad::lincomb(params.subspan(r * shape.in, shape.in), x) + params[b + r]);
    }
  } else {
    const std::size_t b = pos + shape.out * shape.hidden;
    for (std::size_t r = 0; r < shape.out; ++r) {
      const auto row = params.subspan(pos + r * shape.hidden, shape.hidden);
      out.push_back(grad::dot(row, hidden) + params[b + r]);
    }
  }
  return out;
}

}  // namespace hypercone::synth
