#include "tree_oracle.hpp"

#include <algorithm>
#include <string>

#include "strongtree/flow_graph.hpp"

namespace oracle {

using namespace strongtree;

BinaryDataset make_dataset(const std::vector<std::vector<std::uint8_t>>& x, const std::vector<int>& y,
                           int n_classes) {
  BinaryDataset d;
  d.x = x;
  d.y = y;
  const int F = x.empty() ? 0 : static_cast<int>(x[0].size());
  for (int f = 0; f < F; ++f) {
    d.feature_names.push_back("f" + std::to_string(f));
    FeatureEncoding e;
    e.source = d.feature_names.back();
    d.encoding.push_back(e);
  }
  for (int k = 0; k < n_classes; ++k) d.class_names.push_back(std::to_string(k));
  for (std::size_t i = 0; i < y.size(); ++i) d.source_rows.push_back(static_cast<int>(i) + 1);
  return d;
}

BinaryDataset random_dataset(std::mt19937_64& rng, int n_rows, int n_features, int n_classes) {
  std::vector<std::vector<std::uint8_t>> x(n_rows, std::vector<std::uint8_t>(n_features));
  std::vector<int> y(n_rows);
  for (int i = 0; i < n_rows; ++i) {
    for (int f = 0; f < n_features; ++f) x[i][f] = static_cast<std::uint8_t>(rng() & 1);
    y[i] = static_cast<int>(rng() % static_cast<std::uint64_t>(n_classes));
  }
  return make_dataset(x, y, n_classes);
}

namespace {

void expand(TrainedTree& tree, std::vector<int> pending, bool imbalanced, int F, int K,
            const std::function<void(const TrainedTree&)>& visit) {
  if (pending.empty()) {
    visit(tree);
    return;
  }
  const int n = pending.back();
  pending.pop_back();
  const bool branching = tree_index::is_branching(n, tree.depth);
  if (!branching || imbalanced) {
    for (int k = 0; k < K; ++k) {
      tree.leaf[n] = 1;
      tree.label[n] = k;
      expand(tree, pending, imbalanced, F, K, visit);
    }
    tree.leaf[n] = 0;
    tree.label[n] = -1;
  }
  if (branching) {
    std::vector<int> next = pending;
    next.push_back(tree_index::right(n));
    next.push_back(tree_index::left(n));
    for (int f = 0; f < F; ++f) {
      tree.feature[n] = f;
      expand(tree, next, imbalanced, F, K, visit);
    }
    tree.feature[n] = -1;
  }
}

}  // namespace

void for_each_tree(int depth, int n_features, int n_classes, bool imbalanced,
                   const std::function<void(const TrainedTree&)>& visit) {
  std::vector<std::string> fn, cn;
  for (int f = 0; f < n_features; ++f) fn.push_back("f" + std::to_string(f));
  for (int k = 0; k < n_classes; ++k) cn.push_back(std::to_string(k));
  TrainedTree tree = TrainedTree::empty(depth, fn, cn);
  expand(tree, {1}, imbalanced, n_features, n_classes, visit);
}

int best_balanced_correct(const BinaryDataset& data, int depth) {
  int best = -1;
  for_each_tree(depth, data.n_features(), data.n_classes(), false,
                [&](const TrainedTree& t) { best = std::max(best, count_correct(t, data)); });
  return best;
}

double best_regularized(const BinaryDataset& data, int depth, double lambda) {
  double best = -1e300;
  for_each_tree(depth, data.n_features(), data.n_classes(), true, [&](const TrainedTree& t) {
    best = std::max(best, (1.0 - lambda) * count_correct(t, data) - lambda * t.num_splits());
  });
  return best;
}

}  // namespace oracle
