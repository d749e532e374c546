#include "hypercone/synth/trainer.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "hypercone/errors.hpp"
#include "hypercone/grad/objective.hpp"

namespace hypercone::synth {

void TrainConfig::validate() const {
  tree.validate();
  schedule.validate();
  if (embed_dim == 0) throw ValidationError("embedding dimension must be positive");
  if (batch < 2) throw ValidationError("batch size must be >= 2");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be finite and >= 0");
  ConeParams{K}.validate();
  if (space == analysis::Space::Sphere && inner_product_logits) {
    throw ValidationError("inner-product logits need the lorentz space");
  }
  if (heldout_per_leaf == 0) throw ValidationError("heldout_per_leaf must be positive");
}

SimilarityMode TrainConfig::mode() const {
  if (space == analysis::Space::Sphere) return SimilarityMode::Cosine;
  return inner_product_logits ? SimilarityMode::LorentzInner : SimilarityMode::NegLorentzDistance;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over seed and stream
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double latent_rms(const ConceptTree& tree) {
  double ss = 0.0;
  for (std::size_t i = tree.leaf_begin(); i < tree.nodes.size(); ++i) ss += squared_norm(tree.nodes[i].latent);
  return std::sqrt(ss / static_cast<double>(tree.leaf_count()));
}

StepResult loss_and_gradient(const Model& model, const ConceptTree& tree, const std::vector<Pair>& pairs,
                             const TrainConfig& config) {
  grad::Tape tape;
  const auto params = model.params();
  const std::size_t curv_index = model.log_curv_index();
  std::vector<grad::Var> leaves;
  leaves.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    leaves.push_back(config.fixed_curvature && i == curv_index ? tape.constant(params[i]) : tape.leaf(params[i]));
  }
  const EncoderShape& shape = model.shape();
  const std::size_t enc = shape.param_count();
  const std::span<const grad::Var> text_params(leaves.data(), enc);
  const std::span<const grad::Var> image_params(leaves.data() + enc, enc);

  grad::VarRows images;
  grad::VarRows texts;
  images.reserve(pairs.size());
  texts.reserve(pairs.size());
  for (const auto& p : pairs) {
    texts.push_back(encode_taped(shape, text_params, tree.nodes.at(p.text_node).latent));
    images.push_back(encode_taped(shape, image_params, p.image));
  }
  const std::size_t s = model.scalar_offset();
  const grad::TapedScalars scalars{leaves[s], leaves[s + 1], leaves[s + 2], leaves[s + 3]};
  const auto loss = grad::total_loss(tape, images, texts, scalars, config.effective_lambda(), config.K, config.mode());

  StepResult out;
  out.loss = {loss.contrastive.value(), loss.entailment.value(), loss.total.value()};
  if (!std::isfinite(out.loss.total)) return out;
  const auto g = tape.backward(loss.total);
  out.grads.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) out.grads[i] = g.wrt(leaves[i]);
  return out;
}

Checkpoint train(const TrainConfig& config, const std::function<void(const CurveRow&)>& on_step) {
  config.validate();
  const ConceptTree tree = generate_tree(config.tree, derive_seed(config.seed, kTreeStream));
  PairSampler sampler(tree, derive_seed(config.seed, kPairStream));
  Rng init_rng(derive_seed(config.seed, kInitStream));

  Checkpoint ck;
  ck.config = config;
  ck.model = Model::initialize({config.tree.latent_dim, config.hidden, config.embed_dim}, latent_rms(tree), init_rng);

  const auto& layout = ck.model.layout();
  std::vector<bool> decay(ck.model.params().size(), false);
  for (const auto& t : layout) {
    for (std::size_t i = 0; i < t.size; ++i) decay[t.offset + i] = t.decay;
  }
  std::vector<bool> frozen;
  if (config.fixed_curvature) {
    frozen.assign(decay.size(), false);
    frozen[ck.model.log_curv_index()] = true;
  }
  AdamWState state(decay.size());

  std::vector<Pair> batch(config.batch);
  const long steps = config.schedule.total_steps;
  ck.curve.reserve(static_cast<std::size_t>(steps));
  for (long step = 0; step < steps; ++step) {
    for (auto& p : batch) p = sampler.next();
    const LossParams lp = ck.model.loss_params(config.effective_lambda(), config.K);
    const StepResult r = loss_and_gradient(ck.model, tree, batch, config);
    if (!std::isfinite(r.loss.total)) {
      throw NumericalError("training diverged at step " + std::to_string(step));
    }
    const double lr = lr_at(step, config.schedule);
    CurveRow row{step, r.loss.contrastive, r.loss.entailment, r.loss.total, lr, lp.temperature(),
                 lp.curvature().value()};
    if (lp.temperature_clamped()) ++ck.clamps.temperature;
    if (lp.curvature_clamped()) ++ck.clamps.curvature;
    ck.curve.push_back(row);
    if (on_step) on_step(row);
    adamw_step(ck.model.params(), r.grads, state, lr, config.adamw, decay, frozen);
  }
  return ck;
}

namespace {

std::vector<double> finish_embedding(const Checkpoint& ck, std::vector<double> pre, double alpha) {
  if (ck.config.space == analysis::Space::Sphere) return normalized(pre);
  const LossParams lp = ck.model.loss_params(ck.config.lambda, ck.config.K);
  const auto p = exp_map_origin(TangentVector(scaled(pre, alpha)), lp.curvature());
  return {p.space().begin(), p.space().end()};
}

analysis::EmbeddingIndex empty_index(const Checkpoint& ck, std::size_t rows) {
  analysis::EmbeddingIndex index;
  index.space = ck.config.space;
  index.curvature = ck.model.loss_params(ck.config.lambda, ck.config.K).curvature().value();
  index.rows = Matrix(rows, ck.config.embed_dim);
  return index;
}

void finish_root(analysis::EmbeddingIndex& index, std::size_t root_row) {
  const auto root = analysis::estimate_root(index);
  std::copy(root.begin(), root.end(), index.rows.row(root_row).begin());
}

}  // namespace

std::vector<double> embed_text(const Checkpoint& ck, std::span<const double> latent) {
  const LossParams lp = ck.model.loss_params(ck.config.lambda, ck.config.K);
  return finish_embedding(ck, ck.model.encode_text(latent), lp.scale_txt());
}

std::vector<double> embed_image(const Checkpoint& ck, std::span<const double> latent) {
  const LossParams lp = ck.model.loss_params(ck.config.lambda, ck.config.K);
  return finish_embedding(ck, ck.model.encode_image(latent), lp.scale_img());
}

analysis::EmbeddingIndex embed_reference(const Checkpoint& ck) {
  const ConceptTree tree = generate_tree(ck.config.tree, derive_seed(ck.config.seed, kTreeStream));
  PairSampler heldout(tree, derive_seed(ck.config.seed, kHeldoutStream));
  const std::size_t per_leaf = ck.config.heldout_per_leaf;
  auto index = empty_index(ck, tree.nodes.size() + tree.leaf_count() * per_leaf);
  std::size_t row = 0;
  auto put = [&](std::vector<double> v, analysis::LabelClass cls, std::string label) {
    std::copy(v.begin(), v.end(), index.rows.row(row).begin());
    index.labels.push_back({cls, std::move(label)});
    ++row;
  };
  put(std::vector<double>(ck.config.embed_dim, 0.0), analysis::LabelClass::Root, node_label(tree, 0));
  for (std::size_t n = 1; n < tree.nodes.size(); ++n) {
    put(embed_text(ck, tree.nodes[n].latent), analysis::LabelClass::Text, node_label(tree, n));
  }
  for (std::size_t leaf = tree.leaf_begin(); leaf < tree.nodes.size(); ++leaf) {
    for (std::size_t k = 0; k < per_leaf; ++k) {
      put(embed_image(ck, heldout.image_of(leaf)), analysis::LabelClass::Image, image_label(tree, leaf, k));
    }
  }
  if (index.space == analysis::Space::Sphere) finish_root(index, 0);
  return index;
}

analysis::EmbeddingIndex embed_samples(const Checkpoint& ck, const std::vector<LatentSample>& samples) {
  bool has_root = false;
  for (const auto& s : samples) has_root = has_root || s.label.cls == analysis::LabelClass::Root;
  auto index = empty_index(ck, samples.size() + (has_root ? 0 : 1));
  std::size_t root_row = samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    index.labels.push_back(s.label);
    if (s.label.cls == analysis::LabelClass::Root) {
      root_row = i;
      continue;
    }
    if (s.latent.size() != ck.config.tree.latent_dim) {
      throw ValidationError("sample " + std::to_string(i) + " has dimension " + std::to_string(s.latent.size()) +
                            ", expected " + std::to_string(ck.config.tree.latent_dim));
    }
    const auto v = s.label.cls == analysis::LabelClass::Text ? embed_text(ck, s.latent) : embed_image(ck, s.latent);
    std::copy(v.begin(), v.end(), index.rows.row(i).begin());
  }
  if (!has_root) index.labels.push_back({analysis::LabelClass::Root, "[ROOT]"});
  if (index.space == analysis::Space::Sphere) finish_root(index, root_row);
  return index;
}

std::vector<LatentSample> read_samples_csv(std::istream& in) {
  std::vector<LatentSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string cls;
    std::string label;
    std::string cell;
    if (!std::getline(fields, cls, ',') || !std::getline(fields, label, ',')) {
      throw ValidationError("samples line " + std::to_string(line_no) + ": expected class,label,values");
    }
    LatentSample s{{analysis::parse_label_class(cls), label}, {}};
    while (std::getline(fields, cell, ',')) {
      try {
        std::size_t used = 0;
        s.latent.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ValidationError("samples line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& curve) {
  out << "step,contrastive,entailment,total,lr,tau,c\n";
  out.precision(17);
  for (const auto& r : curve) {
    out << r.step << ',' << r.contrastive << ',' << r.entailment << ',' << r.total << ',' << r.lr << ',' << r.tau
        << ',' << r.c << '\n';
  }
}

}  // namespace hypercone::synth
