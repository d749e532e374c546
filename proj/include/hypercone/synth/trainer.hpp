#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hypercone/analysis/index.hpp"
#include "hypercone/loss.hpp"
#include "hypercone/synth/model.hpp"
#include "hypercone/synth/optim.hpp"
#include "hypercone/synth/tree.hpp"

namespace hypercone::synth {

struct TrainConfig {
  TreeConfig tree;
  std::size_t embed_dim = 16;
  std::size_t hidden = 0;
  std::size_t batch = 64;
  Schedule schedule;
  AdamWConfig adamw;
  double lambda = kDefaultLambda;
  double K = kDefaultConeK;
  bool no_entailment = false;
  bool fixed_curvature = false;
  bool inner_product_logits = false;
  analysis::Space space = analysis::Space::Lorentz;
  std::uint64_t seed = 7;
  std::size_t heldout_per_leaf = 4;

  void validate() const;
  SimilarityMode mode() const;
  double effective_lambda() const { return no_entailment ? 0.0 : lambda; }
};

struct CurveRow {
  long step = 0;
  double contrastive = 0.0;
  double entailment = 0.0;
  double total = 0.0;
  double lr = 0.0;
  double tau = 0.0;
  double c = 0.0;

  friend bool operator==(const CurveRow&, const CurveRow&) = default;
};

/// Steps on which the temperature or curvature clamp was active.
struct ClampCounts {
  long temperature = 0;
  long curvature = 0;
};

struct Checkpoint {
  TrainConfig config;
  Model model;
  std::vector<CurveRow> curve;
  ClampCounts clamps;
};

/// Independent RNG stream for one purpose of a run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

enum SeedStream : std::uint64_t { kTreeStream = 1, kPairStream = 2, kInitStream = 3, kHeldoutStream = 4 };

/// RMS norm of the leaf latents; sets the encoder input gain.
double latent_rms(const ConceptTree& tree);

/// One forward/backward pass on a batch of pairs. Gradients follow the
/// model's flat layout; with `freeze_curvature` log_curv is a constant.
struct StepResult {
  LossBreakdown loss;
  std::vector<double> grads;
};
StepResult loss_and_gradient(const Model& model, const ConceptTree& tree, const std::vector<Pair>& pairs,
                             const TrainConfig& config);

/// Deterministic training run; `on_step` sees each curve row as it is
/// recorded. Throws NumericalError naming the step on a non-finite loss.
Checkpoint train(const TrainConfig& config, const std::function<void(const CurveRow&)>& on_step = {});

/// Lifted (lorentz) or normalized (sphere) embedding of one latent.
std::vector<double> embed_text(const Checkpoint& ck, std::span<const double> latent);
std::vector<double> embed_image(const Checkpoint& ck, std::span<const double> latent);

/// Root row, every non-root tree node as text, and heldout_per_leaf fresh
/// images per leaf, in that order.
analysis::EmbeddingIndex embed_reference(const Checkpoint& ck);

struct LatentSample {
  analysis::Label label;
  std::vector<double> latent;
};

/// Embeds caller-supplied latents; text rows go through the text encoder,
/// image rows through the image encoder. A root row is appended when absent.
analysis::EmbeddingIndex embed_samples(const Checkpoint& ck, const std::vector<LatentSample>& samples);

/// "class,label,v0,v1,..." per line.
std::vector<LatentSample> read_samples_csv(std::istream& in);

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& curve);

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace hypercone::synth
