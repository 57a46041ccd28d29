#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "strongtree/dataset.hpp"

namespace strongtree {

struct TreeStats {
  std::string status;  // optimal | time_limit
  std::string engine;
  std::string formulation;
  double lambda = 0.0;
  double bound = 0.0;
  double gap = 0.0;
  long nodes = 0;
  long cuts = 0;
  double seconds = 0.0;
};

/// A depth-bounded classification tree over heap-indexed nodes 1..2^{d+1}-1.
/// Nodes below a leaf are unused.
struct TrainedTree {
  int depth = 1;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::vector<FeatureEncoding> encoding;
  std::vector<int> feature;  // [node] branching feature or -1
  std::vector<char> leaf;    // [node]
  std::vector<int> label;    // [node] predicted class or -1
  double objective = 0.0;    // model objective at the solution
  TreeStats stats;

  static TrainedTree empty(int depth, std::vector<std::string> feature_names,
                           std::vector<std::string> class_names);
  /// Throws SchemaError unless every reachable node is a leaf with a class or
  /// a branching node with a feature, and every leaf is reachable-terminating.
  void validate() const;
  int num_splits() const;
  std::vector<int> reachable_nodes() const;
};

/// Leaf reached by x: at node n go left when x[f(n)] = 0, right otherwise.
int route(const TrainedTree& tree, std::span<const std::uint8_t> x);
int predict(const TrainedTree& tree, std::span<const std::uint8_t> x);
std::vector<int> predict_all(const TrainedTree& tree, const BinaryDataset& data);
/// Number of rows of `data` the tree classifies correctly.
int count_correct(const TrainedTree& tree, const BinaryDataset& data);

inline constexpr const char* kTreeSchema = "strongtree.tree/1";

std::string to_json(const TrainedTree& tree);
TrainedTree tree_from_json(const std::string& text);
void write_tree(const TrainedTree& tree, const std::string& path);
TrainedTree read_tree(const std::string& path);

}  // namespace strongtree
