#include "milkspec/learn/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "milkspec/learn/rng.hpp"

namespace milkspec {

namespace {

int majority(std::span<const std::size_t> counts) {
  int best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c)
    if (counts[c] > counts[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  return best;
}

// n·Gini = n − Σ c²/n
double scaled_gini(std::span<const std::size_t> counts, std::size_t n) {
  if (n == 0) return 0.0;
  double s = 0.0;
  for (std::size_t c : counts) s += static_cast<double>(c) * static_cast<double>(c);
  return static_cast<double>(n) - s / static_cast<double>(n);
}

struct Builder {
  const Matrix& x;
  std::span<const int> y;
  std::size_t k;
  TreeParams params;
  SplitMix64* rng;
  std::vector<TreeNode> nodes;

  std::vector<std::size_t> candidate_features() {
    const std::size_t p = x.cols();
    std::vector<std::size_t> f(p);
    std::iota(f.begin(), f.end(), 0);
    const auto m = static_cast<std::size_t>(params.features_per_split);
    if (rng == nullptr || m == 0 || m >= p) return f;
    for (std::size_t i = 0; i < m; ++i) std::swap(f[i], f[i + rng->below(p - i)]);
    f.resize(m);
    std::sort(f.begin(), f.end());
    return f;
  }

  int grow(std::vector<std::size_t> rows, int depth) {
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t r : rows) ++counts[static_cast<std::size_t>(y[r])];
    const int node_id = static_cast<int>(nodes.size());
    nodes.push_back({});
    nodes.back().label = majority(counts);
    nodes.back().samples = rows.size();

    const std::size_t n = rows.size();
    const auto min_leaf = static_cast<std::size_t>(std::max(1, params.min_leaf));
    const bool pure = std::count(counts.begin(), counts.end(), 0) >= static_cast<std::ptrdiff_t>(k - 1);
    if (pure || (params.max_depth > 0 && depth >= params.max_depth) || n < 2 * min_leaf) return node_id;

    bool found = false;
    double best_score = 0.0, best_threshold = 0.0;
    std::size_t best_feature = 0;
    std::vector<std::size_t> order(rows);
    std::vector<std::size_t> left(k), right(k);
    for (std::size_t f : candidate_features()) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
      std::fill(left.begin(), left.end(), 0);
      right = counts;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto c = static_cast<std::size_t>(y[order[i]]);
        ++left[c];
        --right[c];
        const double lo = x(order[i], f), hi = x(order[i + 1], f);
        if (lo == hi) continue;
        const std::size_t nl = i + 1, nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double score = scaled_gini(left, nl) + scaled_gini(right, nr);
        if (!found || score < best_score) {
          found = true;
          best_score = score;
          best_feature = f;
          double t = lo + (hi - lo) / 2.0;
          if (!(t < hi)) t = lo;
          best_threshold = t;
        }
      }
    }
    if (!found) return node_id;

    std::vector<std::size_t> lrows, rrows;
    for (std::size_t r : rows) (x(r, best_feature) <= best_threshold ? lrows : rrows).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(std::move(lrows), depth + 1);
    const int r = grow(std::move(rrows), depth + 1);
    TreeNode& node = nodes[static_cast<std::size_t>(node_id)];
    node.feature = static_cast<int>(best_feature);
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return node_id;
  }
};

}  // namespace

int DecisionTree::predict_one(std::span<const double> row) const {
  if (nodes_.empty()) throw std::logic_error("DecisionTree: empty tree");
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const TreeNode& n = nodes_[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes_[i].label;
}

std::vector<int> DecisionTree::predict(const Matrix& x) const {
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = predict_one(x.row(r));
  return out;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  int best = 0;
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes_[i].feature >= 0) {
      stack.push_back({static_cast<std::size_t>(nodes_[i].left), d + 1});
      stack.push_back({static_cast<std::size_t>(nodes_[i].right), d + 1});
    }
  }
  return best;
}

DecisionTree build_tree(const Matrix& x, std::span<const int> y, int n_classes, std::span<const std::size_t> rows,
                        const TreeParams& params, SplitMix64* rng) {
  if (rows.empty()) throw std::invalid_argument("build_tree: no training rows");
  if (y.size() != x.rows()) throw std::invalid_argument("build_tree: label count differs from rows");
  if (n_classes < 1) throw std::invalid_argument("build_tree: need at least one class");
  for (std::size_t r : rows)
    if (y[r] < 0 || y[r] >= n_classes) throw std::invalid_argument("build_tree: label out of range");
  Builder b{x, y, static_cast<std::size_t>(n_classes), params, rng, {}};
  b.grow({rows.begin(), rows.end()}, 0);
  return DecisionTree(std::move(b.nodes));
}

std::vector<int> RandomForest::predict(const Matrix& x) const {
  std::vector<int> out(x.rows());
  std::vector<std::size_t> votes(static_cast<std::size_t>(n_classes_));
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& t : trees_) ++votes[static_cast<std::size_t>(t.predict_one(x.row(r)))];
    out[r] = majority(votes);
  }
  return out;
}

RandomForest fit_forest(const Matrix& x, std::span<const int> y, int n_classes, const ForestParams& params) {
  if (params.n_trees < 1) throw std::invalid_argument("fit_forest: need at least one tree");
  const std::size_t n = x.rows();
  if (n == 0) throw std::invalid_argument("fit_forest: no training rows");
  if (y.size() != n) throw std::invalid_argument("fit_forest: label count differs from rows");
  if (n_classes < 1) throw std::invalid_argument("fit_forest: need at least one class");
  for (int v : y)
    if (v < 0 || v >= n_classes) throw std::invalid_argument("fit_forest: label out of range");
  TreeParams tp = params.tree;
  if (tp.features_per_split <= 0)
    tp.features_per_split = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(x.cols())))));

  std::vector<DecisionTree> trees(static_cast<std::size_t>(params.n_trees));
  auto grow_one = [&](std::size_t t) {
    SplitMix64 rng(derive_seed(params.seed, t));
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      for (auto& r : rows) r = rng.below(n);
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    trees[t] = build_tree(x, y, n_classes, rows, tp, &rng);
  };
  const auto nt = static_cast<std::ptrdiff_t>(trees.size());
  if (params.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t t = 0; t < nt; ++t) grow_one(static_cast<std::size_t>(t));
  } else {
    for (std::ptrdiff_t t = 0; t < nt; ++t) grow_one(static_cast<std::size_t>(t));
  }
  return RandomForest(std::move(trees), n_classes);
}

}  // namespace milkspec
