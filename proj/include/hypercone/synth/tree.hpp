#pragma once

// Synthetic concept hierarchy: a complete tree of latent vectors whose
// internal nodes play the role of captions and whose leaves emit images.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hypercone/random.hpp"

namespace hypercone::synth {

struct TreeConfig {
  int depth = 3;
  int branching = 4;
  std::size_t latent_dim = 32;
  /// Per-sample image noise; the expected noise norm is roughly this value.
  double noise = 0.1;
  /// Expected norm of a depth-1 offset; deeper offsets shrink by `decay` per level.
  double spread = 1.0;
  double decay = 0.6;

  void validate() const;
};

struct TreeNode {
  int parent = -1;  // -1 for the root
  int depth = 0;
  std::string path;  // "" for the root, then "2", "2.0", "2.0.3", ...
  std::vector<double> latent;
};

/// Nodes are stored in breadth-first order, so node 0 is the root and the
/// last branching^depth nodes are the leaves.
struct ConceptTree {
  TreeConfig config;
  std::vector<TreeNode> nodes;

  std::size_t leaf_begin() const;
  std::size_t leaf_count() const;
  bool is_leaf(std::size_t node) const { return nodes.at(node).depth == config.depth; }

  /// Node ids from depth 1 down to `node` itself.
  std::vector<std::size_t> chain(std::size_t node) const;

  /// True when `ancestor` lies on the path from the root to `node` (a node is
  /// its own ancestor).
  bool is_ancestor(std::size_t ancestor, std::size_t node) const;
};

std::size_t tree_node_count(int depth, int branching);

ConceptTree generate_tree(const TreeConfig& config, std::uint64_t seed);

struct Pair {
  std::size_t text_node = 0;
  std::size_t leaf = 0;
  std::vector<double> image;
};

/// Endless stream of caption/image pairs. A leaf is drawn uniformly, the
/// caption uniformly from its chain at depths 1..depth, and the image is the
/// leaf latent plus Gaussian noise.
class PairSampler {
 public:
  PairSampler(const ConceptTree& tree, std::uint64_t seed);

  Pair next();
  std::vector<double> image_of(std::size_t leaf);

 private:
  const ConceptTree* tree_;
  Rng rng_;
};

/// Label text for a node ("[ROOT]" for the tree root) and for the k-th image
/// of a leaf ("1.3.0:k").
std::string node_label(const ConceptTree& tree, std::size_t node);
std::string image_label(const ConceptTree& tree, std::size_t leaf, std::size_t k);

/// Ancestor test on labels: `image` is "<path>:k" and `text` is a prefix path.
bool label_is_ancestor(const std::string& text, const std::string& image);

}  // namespace hypercone::synth
