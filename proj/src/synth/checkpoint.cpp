#include <json.hpp>

#include "hypercone/errors.hpp"
#include "hypercone/io/binary.hpp"
#include "hypercone/synth/trainer.hpp"

namespace hypercone::synth {

namespace {

constexpr char kMagic[4] = {'H', 'Y', 'E', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kCurveColumns = 7;

nlohmann::json config_to_json(const TrainConfig& c, const ClampCounts& clamps) {
  return {
      {"tree",
       {{"depth", c.tree.depth},
        {"branching", c.tree.branching},
        {"latent_dim", c.tree.latent_dim},
        {"noise", c.tree.noise},
        {"spread", c.tree.spread},
        {"decay", c.tree.decay}}},
      {"embed_dim", c.embed_dim},
      {"hidden", c.hidden},
      {"batch", c.batch},
      {"steps", c.schedule.total_steps},
      {"warmup", c.schedule.warmup_steps},
      {"lr", c.schedule.peak_lr},
      {"beta1", c.adamw.beta1},
      {"beta2", c.adamw.beta2},
      {"weight_decay", c.adamw.weight_decay},
      {"eps", c.adamw.eps},
      {"lambda", c.lambda},
      {"K", c.K},
      {"no_entailment", c.no_entailment},
      {"fixed_curvature", c.fixed_curvature},
      {"inner_product_logits", c.inner_product_logits},
      {"space", std::string(analysis::to_string(c.space))},
      {"seed", c.seed},
      {"heldout_per_leaf", c.heldout_per_leaf},
      {"clamp_hits", {{"temperature", clamps.temperature}, {"curvature", clamps.curvature}}},
  };
}

void config_from_json(const nlohmann::json& j, TrainConfig& c, ClampCounts& clamps) {
  const auto& t = j.at("tree");
  t.at("depth").get_to(c.tree.depth);
  t.at("branching").get_to(c.tree.branching);
  t.at("latent_dim").get_to(c.tree.latent_dim);
  t.at("noise").get_to(c.tree.noise);
  t.at("spread").get_to(c.tree.spread);
  t.at("decay").get_to(c.tree.decay);
  j.at("embed_dim").get_to(c.embed_dim);
  j.at("hidden").get_to(c.hidden);
  j.at("batch").get_to(c.batch);
  j.at("steps").get_to(c.schedule.total_steps);
  j.at("warmup").get_to(c.schedule.warmup_steps);
  j.at("lr").get_to(c.schedule.peak_lr);
  j.at("beta1").get_to(c.adamw.beta1);
  j.at("beta2").get_to(c.adamw.beta2);
  j.at("weight_decay").get_to(c.adamw.weight_decay);
  j.at("eps").get_to(c.adamw.eps);
  j.at("lambda").get_to(c.lambda);
  j.at("K").get_to(c.K);
  j.at("no_entailment").get_to(c.no_entailment);
  j.at("fixed_curvature").get_to(c.fixed_curvature);
  j.at("inner_product_logits").get_to(c.inner_product_logits);
  c.space = analysis::parse_space(j.at("space").get<std::string>());
  j.at("seed").get_to(c.seed);
  j.at("heldout_per_leaf").get_to(c.heldout_per_leaf);
  j.at("clamp_hits").at("temperature").get_to(clamps.temperature);
  j.at("clamp_hits").at("curvature").get_to(clamps.curvature);
}

void put_tensor(io::ByteWriter& w, const std::string& name, const std::vector<std::uint64_t>& shape,
                std::span<const double> values) {
  w.str(name);
  w.u32(static_cast<std::uint32_t>(shape.size()));
  for (auto d : shape) w.u64(d);
  for (double v : values) w.f64(v);
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck) {
  io::ByteWriter w;
  w.bytes({kMagic, 4});
  w.u32(kVersion);
  w.str(config_to_json(ck.config, ck.clamps).dump());
  const auto& layout = ck.model.layout();
  w.u32(static_cast<std::uint32_t>(layout.size() + 1));
  const auto params = ck.model.params();
  for (const auto& t : layout) {
    put_tensor(w, t.name, {t.shape.begin(), t.shape.end()}, params.subspan(t.offset, t.size));
  }
  std::vector<double> curve;
  curve.reserve(ck.curve.size() * kCurveColumns);
  for (const auto& r : ck.curve) {
    curve.insert(curve.end(), {static_cast<double>(r.step), r.contrastive, r.entailment, r.total, r.lr, r.tau, r.c});
  }
  put_tensor(w, "curve", {ck.curve.size(), kCurveColumns}, curve);
  return w.buffer();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes);
  if (r.bytes(4, "header") != std::string_view(kMagic, 4)) throw FormatError("bad magic", 0);
  const std::size_t version_at = r.offset();
  if (r.u32("header") != kVersion) throw FormatError("unsupported version", version_at);
  const std::size_t config_at = r.offset();
  Checkpoint ck;
  try {
    config_from_json(nlohmann::json::parse(r.str("config")), ck.config, ck.clamps);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad config echo (") + e.what() + ")", config_at);
  }
  ck.config.validate();
  const EncoderShape shape{ck.config.tree.latent_dim, ck.config.hidden, ck.config.embed_dim};
  const auto layout = model_layout(shape);
  std::vector<double> params(layout.back().offset + layout.back().size);

  const std::size_t count_at = r.offset();
  const std::uint32_t count = r.u32("tensor count");
  if (count != layout.size() + 1) throw FormatError("unexpected tensor count", count_at);
  for (std::uint32_t k = 0; k < count; ++k) {
    const std::size_t at = r.offset();
    const std::string name = r.str("tensor name");
    const std::uint32_t ndim = r.u32("tensor rank");
    std::vector<std::size_t> dims;
    std::size_t size = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      dims.push_back(static_cast<std::size_t>(r.u64("tensor shape")));
      size *= dims.back();
    }
    if (k < layout.size()) {
      const auto& t = layout[k];
      if (name != t.name || dims != t.shape) throw FormatError("unexpected tensor '" + name + "'", at);
      for (std::size_t i = 0; i < size; ++i) params[t.offset + i] = r.f64("tensor data");
    } else {
      if (name != "curve" || dims.size() != 2 || dims[1] != kCurveColumns) throw FormatError("bad curve tensor", at);
      for (std::size_t i = 0; i < dims[0]; ++i) {
        CurveRow row;
        row.step = static_cast<long>(r.f64("curve"));
        row.contrastive = r.f64("curve");
        row.entailment = r.f64("curve");
        row.total = r.f64("curve");
        row.lr = r.f64("curve");
        row.tau = r.f64("curve");
        row.c = r.f64("curve");
        ck.curve.push_back(row);
      }
    }
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes", r.offset());
  ck.model = Model(shape, std::move(params));
  return ck;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  io::write_file_atomic(path, encode_checkpoint(ck));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(io::read_file(path)); }

}  // namespace hypercone::synth
