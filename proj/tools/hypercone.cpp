// hypercone: train, embed and analyse hyperbolic embeddings.
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "hypercone/analysis/classify.hpp"
#include "hypercone/analysis/retrieve.hpp"
#include "hypercone/analysis/stats.hpp"
#include "hypercone/analysis/traverse.hpp"
#include "hypercone/errors.hpp"
#include "hypercone/grad/gradcheck.hpp"
#include "hypercone/io/binary.hpp"
#include "hypercone/io/dump.hpp"
#include "hypercone/synth/trainer.hpp"

namespace {

using namespace hypercone;
using nlohmann::json;

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

/// Writes to --out atomically, or to stdout when no path is given.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    io::write_file_atomic(out_path, text);
  }
}

std::vector<double> parse_vector(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ValidationError("bad vector component '" + cell + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty query vector");
  return out;
}

struct QueryFlags {
  std::optional<std::size_t> row;
  std::string vector;

  void add(CLI::App* cmd) {
    auto* r = cmd->add_option("--row", row, "Query by dump row index");
    auto* v = cmd->add_option("--vector", vector, "Query by comma-separated space components");
    r->excludes(v);
  }

  std::vector<double> resolve(const analysis::EmbeddingIndex& index) const {
    if (row) {
      if (*row >= index.size()) throw ValidationError("row " + std::to_string(*row) + " is out of range");
      return index.rows.row_vector(*row);
    }
    if (vector.empty()) throw ValidationError("one of --row or --vector is required");
    auto v = parse_vector(vector);
    if (v.size() != index.dim()) throw ValidationError("query dimension does not match the dump");
    return v;
  }
};

json train_summary(const synth::Checkpoint& ck) {
  const auto& first = ck.curve.front();
  const auto& last = ck.curve.back();
  return {{"steps", ck.curve.size()},
          {"initial_total", first.total},
          {"final_total", last.total},
          {"final_contrastive", last.contrastive},
          {"final_entailment", last.entailment},
          {"final_tau", last.tau},
          {"final_c", last.c},
          {"clamp_hits", {{"temperature", ck.clamps.temperature}, {"curvature", ck.clamps.curvature}}}};
}

int run(int argc, char** argv) {
  CLI::App app{"Hyperbolic contrastive embeddings: training and analysis"};
  app.require_subcommand(1);
  app.get_formatter()->column_width(40);

  // train
  synth::TrainConfig cfg;
  std::string space_name = "lorentz";
  std::string ckpt_out;
  std::string curve_out;
  std::string dump_out;
  bool quiet = false;
  auto* train = app.add_subcommand("train", "Train encoders on the synthetic concept tree");
  train->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  train->add_option("--steps", cfg.schedule.total_steps, "Total optimizer steps")->capture_default_str();
  train->add_option("--warmup", cfg.schedule.warmup_steps, "Linear warmup steps")->capture_default_str();
  train->add_option("--lr", cfg.schedule.peak_lr, "Peak learning rate")->capture_default_str();
  train->add_option("--weight-decay", cfg.adamw.weight_decay, "AdamW decoupled weight decay")->capture_default_str();
  train->add_option("--batch", cfg.batch, "Batch size")->capture_default_str();
  train->add_option("--dim", cfg.embed_dim, "Embedding dimension")->capture_default_str();
  train->add_option("--hidden", cfg.hidden, "Hidden tanh width (0: affine encoders)")->capture_default_str();
  train->add_option("--depth", cfg.tree.depth, "Concept tree depth")->capture_default_str();
  train->add_option("--branching", cfg.tree.branching, "Concept tree branching")->capture_default_str();
  train->add_option("--latent-dim", cfg.tree.latent_dim, "Latent dimension")->capture_default_str();
  train->add_option("--noise", cfg.tree.noise, "Image noise scale")->capture_default_str();
  train->add_option("--lambda", cfg.lambda, "Entailment loss weight")->capture_default_str();
  train->add_option("--cone-k", cfg.K, "Cone aperture constant K")->capture_default_str();
  train->add_option("--heldout", cfg.heldout_per_leaf, "Held-out images per leaf in the dump")->capture_default_str();
  train->add_flag("--no-entailment", cfg.no_entailment, "Drop the entailment term");
  train->add_flag("--fixed-curvature", cfg.fixed_curvature, "Freeze curvature at c = 1");
  train->add_flag("--inner-product-logits", cfg.inner_product_logits, "Use the Lorentzian inner product as logits");
  train->add_option("--space", space_name, "Embedding space")
      ->check(CLI::IsMember({"lorentz", "sphere"}))
      ->capture_default_str();
  train->add_option("--out", ckpt_out, "Checkpoint path")->required();
  train->add_option("--curve", curve_out, "Loss curve CSV path");
  train->add_option("--dump", dump_out, "Embedding dump of the reference set");
  train->add_flag("--quiet", quiet, "No per-step progress on stderr");

  // embed
  std::string ckpt_in;
  std::string samples_in;
  std::string embed_out;
  auto* embed = app.add_subcommand("embed", "Embed the reference set or a samples CSV into a dump");
  embed->add_option("--checkpoint", ckpt_in, "Checkpoint path")->required()->check(CLI::ExistingFile);
  embed->add_option("--samples", samples_in, "CSV of class,label,latent... rows")->check(CLI::ExistingFile);
  embed->add_option("--out", embed_out, "Dump path")->required();

  // stats
  std::string dump_in;
  std::string out_path;
  bool histogram = false;
  std::size_t bins = 20;
  auto* stats = app.add_subcommand("stats", "Distance-to-ROOT distributions per label class (CSV)");
  stats->add_option("--dump", dump_in, "Dump path")->required()->check(CLI::ExistingFile);
  stats->add_flag("--histogram", histogram, "Emit the histogram instead of the summary");
  stats->add_option("--bins", bins, "Histogram bins")->capture_default_str();
  stats->add_option("--out", out_path, "Output path (default stdout)");

  // traverse
  QueryFlags tq;
  analysis::TraverseOptions topt;
  bool unique = false;
  auto* trav = app.add_subcommand("traverse", "Walk from an embedding to ROOT, retrieving texts (CSV)");
  trav->add_option("--dump", dump_in, "Dump path")->required()->check(CLI::ExistingFile);
  tq.add(trav);
  trav->add_option("--steps", topt.steps, "Interpolation steps")->capture_default_str();
  trav->add_option("--cone-slack", topt.cone_slack, "Entailment loss tolerated as entailing")->capture_default_str();
  trav->add_option("--cone-k", topt.cone.K, "Cone aperture constant K")->capture_default_str();
  trav->add_flag("--unique", unique, "Only list unique labels in first-hit order");
  trav->add_option("--out", out_path, "Output path (default stdout)");

  // retrieve
  QueryFlags rq;
  analysis::RetrieveOptions ropt;
  std::string only_class;
  bool exclude_self = false;
  auto* ret = app.add_subcommand("retrieve", "Top-k neighbours of a query (JSON)");
  ret->add_option("--dump", dump_in, "Dump path")->required()->check(CLI::ExistingFile);
  rq.add(ret);
  ret->add_option("-k", ropt.k, "Number of results")->capture_default_str();
  ret->add_flag("--calibrated", ropt.calibrated, "Report softmax(-d / tau) scores");
  ret->add_option("--tau", ropt.tau, "Temperature for calibrated scores")->capture_default_str();
  ret->add_option("--class", only_class, "Restrict candidates to text, image or root");
  ret->add_flag("--exclude-self", exclude_self, "Leave the --row query out of the candidates");
  ret->add_option("--out", out_path, "Output path (default stdout)");

  // classify
  std::string prompts_in;
  std::string images_in;
  auto* cls = app.add_subcommand("classify", "Zero-shot classification with prompt ensembles (JSON)");
  cls->add_option("--prompts", prompts_in, "Dump of prompt embeddings; rows sharing a label form one class")
      ->required()
      ->check(CLI::ExistingFile);
  cls->add_option("--images", images_in, "Dump of image embeddings")->required()->check(CLI::ExistingFile);
  cls->add_option("--out", out_path, "Output path (default stdout)");

  // gradcheck
  grad::GradcheckOptions gopt;
  auto* gc = app.add_subcommand("gradcheck", "Analytic vs finite-difference gradient suite");
  gc->add_option("--seeds", gopt.seeds, "Random batches per loss configuration")->capture_default_str();
  gc->add_option("--rtol", gopt.rtol, "Relative tolerance")->capture_default_str();
  gc->add_option("--atol", gopt.atol, "Absolute tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (train->parsed()) {
    cfg.space = analysis::parse_space(space_name);
    const auto ck = synth::train(cfg, [&](const synth::CurveRow& r) {
      if (!quiet && (r.step % 100 == 0 || r.step + 1 == cfg.schedule.total_steps)) {
        std::cerr << "step " << r.step << " total " << r.total << " contrastive " << r.contrastive << " entailment "
                  << r.entailment << " tau " << r.tau << " c " << r.c << "\n";
      }
    });
    synth::write_checkpoint(ckpt_out, ck);
    if (!curve_out.empty()) {
      std::ostringstream csv;
      synth::write_curve_csv(csv, ck.curve);
      io::write_file_atomic(curve_out, csv.str());
    }
    if (!dump_out.empty()) io::write_dump(dump_out, synth::embed_reference(ck));
    std::cout << train_summary(ck).dump(2) << "\n";
    return 0;
  }

  if (embed->parsed()) {
    const auto ck = synth::read_checkpoint(ckpt_in);
    if (samples_in.empty()) {
      io::write_dump(embed_out, synth::embed_reference(ck));
    } else {
      std::ifstream in(samples_in);
      io::write_dump(embed_out, synth::embed_samples(ck, synth::read_samples_csv(in)));
    }
    return 0;
  }

  if (stats->parsed()) {
    const auto index = io::read_dump(dump_in);
    const auto s = analysis::root_distance_stats(index, bins);
    std::ostringstream csv;
    if (histogram) {
      analysis::write_histogram_csv(csv, s);
    } else {
      analysis::write_summary_csv(csv, s);
    }
    emit(out_path, csv.str());
    return 0;
  }

  if (trav->parsed()) {
    const auto index = io::read_dump(dump_in);
    const auto result = analysis::traverse(index, tq.resolve(index), topt);
    std::ostringstream csv;
    if (unique) {
      csv << "order,label\n";
      const auto labels = result.unique_labels();
      for (std::size_t i = 0; i < labels.size(); ++i) csv << i << ',' << labels[i] << '\n';
    } else {
      csv << "step,row,label\n";
      for (const auto& s : result.steps) csv << s.step << ',' << s.row << ',' << s.label << '\n';
    }
    emit(out_path, csv.str());
    return 0;
  }

  if (ret->parsed()) {
    const auto index = io::read_dump(dump_in);
    if (!only_class.empty()) ropt.only = analysis::parse_label_class(only_class);
    if (exclude_self) {
      if (!rq.row) throw ValidationError("--exclude-self needs --row");
      ropt.exclude = rq.row;
    }
    const auto hits = analysis::retrieve(index, rq.resolve(index), ropt);
    json out = json::array();
    for (const auto& h : hits) out.push_back({{"row", h.row}, {"label", h.label}, {"score", h.score}});
    emit(out_path, out.dump(2) + "\n");
    return 0;
  }

  if (cls->parsed()) {
    const auto prompts = io::read_dump(prompts_in);
    const auto images = io::read_dump(images_in);
    if (prompts.space != images.space || prompts.dim() != images.dim()) {
      throw ValidationError("prompt and image dumps differ in space or dimension");
    }
    // Rows are stored on the manifold; recover pre-lift vectors with the
    // log map so the class mean is taken in the tangent space (scale 1).
    std::vector<analysis::ClassPrompts> classes;
    std::map<std::string, std::size_t> by_name;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      if (prompts.labels[i].cls == analysis::LabelClass::Root) continue;
      const auto& name = prompts.labels[i].text;
      auto [it, inserted] = by_name.emplace(name, classes.size());
      if (inserted) classes.push_back({name, {}});
      std::vector<double> v = prompts.rows.row_vector(i);
      if (prompts.space == analysis::Space::Lorentz) {
        const auto t = log_map_origin(prompts.point(i));
        v.assign(t.space().begin(), t.space().end());
      }
      classes[it->second].prompts.push_back(std::move(v));
    }
    const analysis::ClassifierSpace space{prompts.space, prompts.curvature, 1.0};
    if (images.space == analysis::Space::Lorentz && images.curvature != prompts.curvature) {
      throw ValidationError("prompt and image dumps have different curvature");
    }
    json out = json::array();
    for (std::size_t i = 0; i < images.size(); ++i) {
      if (images.labels[i].cls == analysis::LabelClass::Root) continue;
      const auto c = analysis::classify(images.rows.row(i), classes, space);
      json scores = json::object();
      for (const auto& s : c.scores) scores[s.name] = s.score;
      out.push_back({{"row", i}, {"label", images.labels[i].text}, {"predicted", c.scores[c.predicted].name},
                     {"scores", scores}});
    }
    emit(out_path, out.dump(2) + "\n");
    return 0;
  }

  if (gc->parsed()) {
    const auto summary = grad::run_gradcheck_suite(gopt);
    for (const auto& c : summary.cases) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " checked=" << c.checked << " skipped=" << c.skipped
                << " max_abs_err=" << c.max_abs_err << " max_rel_err=" << c.max_rel_err << "\n";
    }
    if (!summary.passed()) throw NumericalError("gradient check failed");
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const hypercone::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const hypercone::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
