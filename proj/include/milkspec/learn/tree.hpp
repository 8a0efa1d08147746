#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "milkspec/core/matrix.hpp"
#include "milkspec/kernels/exec.hpp"

namespace milkspec {

class SplitMix64;

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;  // rows with x[feature] ≤ threshold go left
  int left = -1;
  int right = -1;
  int label = 0;  // majority class, ties to the lowest id
  std::size_t samples = 0;
};

struct TreeParams {
  int max_depth = 0;  // 0 = unlimited
  int min_leaf = 1;
  /// Features examined per split; 0 examines all of them.
  int features_per_split = 0;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  int predict_one(std::span<const double> row) const;
  std::vector<int> predict(const Matrix& x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t leaf_count() const;
  int depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

/// CART with Gini impurity over the given rows (repeats allowed, as in a
/// bootstrap sample). The best split minimizes the weighted child impurity;
/// equal scores keep the lowest feature index, then the lowest threshold.
/// An impure node is split even when no split lowers the impurity. When
/// `rng` is given and params.features_per_split is below the feature count,
/// a fresh feature subset is drawn at every node and examined in ascending
/// index order.
DecisionTree build_tree(const Matrix& x, std::span<const int> y, int n_classes, std::span<const std::size_t> rows,
                        const TreeParams& params, SplitMix64* rng = nullptr);

struct ForestParams {
  int n_trees = 100;
  TreeParams tree{};  // features_per_split 0 means floor(sqrt(features))
  bool bootstrap = true;
  std::uint64_t seed = 42;
  Exec exec = Exec::parallel;
};

class RandomForest {
 public:
  RandomForest() = default;
  RandomForest(std::vector<DecisionTree> trees, int n_classes) : trees_(std::move(trees)), n_classes_(n_classes) {}

  /// Majority vote, ties to the lowest class id.
  std::vector<int> predict(const Matrix& x) const;
  const std::vector<DecisionTree>& trees() const { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
  int n_classes_ = 0;
};

/// Each tree t draws from its own stream derive_seed(seed, t), so the
/// parallel loop over trees reproduces the serial result exactly.
RandomForest fit_forest(const Matrix& x, std::span<const int> y, int n_classes, const ForestParams& params);

}  // namespace milkspec
