#pragma once

// Two small encoders plus the learnable loss scalars, stored as one flat
// parameter vector so the optimizer and checkpoint code see a single layout.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hypercone/grad/tape.hpp"
#include "hypercone/loss.hpp"
#include "hypercone/random.hpp"

namespace hypercone::synth {

struct EncoderShape {
  std::size_t in = 0;
  std::size_t hidden = 0;  // 0: single affine map
  std::size_t out = 0;

  std::size_t param_count() const;
};

struct TensorInfo {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
  bool decay = false;  // weight matrices only
};

/// Flat layout: text encoder, image encoder, then log_inv_temp, log_curv,
/// log_scale_img, log_scale_txt. Each encoder is [W1, b1,] W, b with W
/// stored row-major as out x in.
class Model {
 public:
  Model() = default;
  Model(EncoderShape shape, std::vector<double> params);

  /// Gaussian weights with unit-variance pre-activations for inputs of RMS
  /// norm `input_rms`, so outputs have expected norm sqrt(out) and unit norm
  /// after the initial 1/sqrt(out) scale. Biases zero, loss scalars at
  /// LossParams::initial(out).
  static Model initialize(EncoderShape shape, double input_rms, Rng& rng);

  const EncoderShape& shape() const noexcept { return shape_; }
  std::span<const double> params() const noexcept { return params_; }
  std::span<double> params() noexcept { return params_; }
  const std::vector<TensorInfo>& layout() const noexcept { return layout_; }
  const TensorInfo& tensor(const std::string& name) const;

  LossParams loss_params(double lambda, double K) const;
  std::size_t scalar_offset() const { return 2 * shape_.param_count(); }
  std::size_t log_curv_index() const { return scalar_offset() + 1; }

  /// Pre-lift embedding of one latent.
  std::vector<double> encode_text(std::span<const double> latent) const;
  std::vector<double> encode_image(std::span<const double> latent) const;

  /// Multiplies exp(log_scale) into the final affine map of each encoder and
  /// zeroes the log scales. Lifted embeddings are unchanged.
  Model folded() const;

 private:
  std::vector<double> encode(std::size_t base, std::span<const double> latent) const;

  EncoderShape shape_;
  std::vector<double> params_;
  std::vector<TensorInfo> layout_;
};

std::vector<TensorInfo> model_layout(const EncoderShape& shape);

/// Encoder forward on a tape; `params` are the encoder's slice of the model's
/// parameter leaves.
std::vector<grad::Var> encode_taped(const EncoderShape& shape, std::span<const grad::Var> params,
                                    std::span<const double> latent);

}  // namespace hypercone::synth
