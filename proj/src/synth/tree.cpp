#include "hypercone/synth/tree.hpp"

#include <cmath>

#include "hypercone/errors.hpp"

namespace hypercone::synth {

void TreeConfig::validate() const {
  if (depth < 2) throw ValidationError("tree depth must be >= 2");
  if (branching < 2) throw ValidationError("tree branching must be >= 2");
  if (latent_dim == 0) throw ValidationError("latent_dim must be positive");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ValidationError("noise must be finite and >= 0");
  if (!(spread > 0.0) || !std::isfinite(spread)) throw ValidationError("spread must be finite and > 0");
  if (!(decay > 0.0) || !std::isfinite(decay)) throw ValidationError("decay must be finite and > 0");
  if (tree_node_count(depth, branching) > (1u << 22)) throw ValidationError("tree too large");
}

std::size_t tree_node_count(int depth, int branching) {
  std::size_t total = 0;
  std::size_t level = 1;
  for (int d = 0; d <= depth; ++d) {
    total += level;
    level *= static_cast<std::size_t>(branching);
  }
  return total;
}

std::size_t ConceptTree::leaf_begin() const { return nodes.size() - leaf_count(); }

std::size_t ConceptTree::leaf_count() const {
  std::size_t n = 1;
  for (int d = 0; d < config.depth; ++d) n *= static_cast<std::size_t>(config.branching);
  return n;
}

std::vector<std::size_t> ConceptTree::chain(std::size_t node) const {
  std::vector<std::size_t> out(static_cast<std::size_t>(nodes.at(node).depth));
  for (int cur = static_cast<int>(node); cur > 0; cur = nodes[cur].parent) {
    out[static_cast<std::size_t>(nodes[cur].depth) - 1] = static_cast<std::size_t>(cur);
  }
  return out;
}

bool ConceptTree::is_ancestor(std::size_t ancestor, std::size_t node) const {
  for (int cur = static_cast<int>(node); cur >= 0; cur = nodes.at(cur).parent) {
    if (static_cast<std::size_t>(cur) == ancestor) return true;
  }
  return false;
}

ConceptTree generate_tree(const TreeConfig& config, std::uint64_t seed) {
  config.validate();
  ConceptTree tree{config, {}};
  tree.nodes.reserve(tree_node_count(config.depth, config.branching));
  tree.nodes.push_back(TreeNode{-1, 0, "", std::vector<double>(config.latent_dim, 0.0)});
  Rng rng(seed);
  const double per_coord = 1.0 / std::sqrt(static_cast<double>(config.latent_dim));
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].depth == config.depth) continue;
    const int child_depth = tree.nodes[i].depth + 1;
    const double scale = config.spread * std::pow(config.decay, child_depth - 1) * per_coord;
    for (int b = 0; b < config.branching; ++b) {
      TreeNode child;
      child.parent = static_cast<int>(i);
      child.depth = child_depth;
      child.path = tree.nodes[i].path.empty() ? std::to_string(b)
                                              : tree.nodes[i].path + "." + std::to_string(b);
      child.latent = tree.nodes[i].latent;
      for (double& v : child.latent) v += scale * rng.normal();
      tree.nodes.push_back(std::move(child));
    }
  }
  return tree;
}

PairSampler::PairSampler(const ConceptTree& tree, std::uint64_t seed) : tree_(&tree), rng_(seed) {}

std::vector<double> PairSampler::image_of(std::size_t leaf) {
  const auto& cfg = tree_->config;
  const double scale = cfg.noise / std::sqrt(static_cast<double>(cfg.latent_dim));
  std::vector<double> image = tree_->nodes.at(leaf).latent;
  if (cfg.noise > 0.0) {
    for (double& v : image) v += scale * rng_.normal();
  }
  return image;
}

Pair PairSampler::next() {
  Pair p;
  p.leaf = tree_->leaf_begin() + rng_.below(tree_->leaf_count());
  const auto chain = tree_->chain(p.leaf);
  p.text_node = chain[rng_.below(chain.size())];
  p.image = image_of(p.leaf);
  return p;
}

std::string node_label(const ConceptTree& tree, std::size_t node) {
  return node == 0 ? std::string("[ROOT]") : tree.nodes.at(node).path;
}

std::string image_label(const ConceptTree& tree, std::size_t leaf, std::size_t k) {
  return tree.nodes.at(leaf).path + ":" + std::to_string(k);
}

bool label_is_ancestor(const std::string& text, const std::string& image) {
  const auto colon = image.find(':');
  const std::string path = image.substr(0, colon);
  if (text == "[ROOT]") return true;
  if (text.size() > path.size() || path.compare(0, text.size(), text) != 0) return false;
  return text.size() == path.size() || path[text.size()] == '.';
}

}  // namespace hypercone::synth
