#include "milkspec/learn/grid_search.hpp"

#include <stdexcept>

#include "milkspec/learn/split.hpp"

namespace milkspec {

GridSearchResult grid_search(const ModelSpec& base, const std::vector<GridAxis>& grid, const Matrix& x,
                             std::span<const int> y, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("grid_search: need at least 2 folds");
  if (y.size() != x.rows()) throw std::invalid_argument("grid_search: label count differs from rows");
  if (grid.empty()) throw std::invalid_argument("grid_search: empty grid");
  std::size_t total = 1;
  for (const auto& axis : grid) {
    if (axis.values.empty()) throw std::invalid_argument("grid_search: axis \"" + axis.name + "\" has no values");
    total *= axis.values.size();
  }
  int n_classes = 0;
  for (int v : y) n_classes = std::max(n_classes, v + 1);
  const auto fold = stratified_folds(y, folds, seed);

  GridSearchResult result;
  for (std::size_t g = 0; g < total; ++g) {
    GridPoint point;
    ModelSpec spec = base;
    std::size_t rem = g;
    std::vector<std::size_t> digits(grid.size());
    for (std::size_t a = grid.size(); a-- > 0;) {
      digits[a] = rem % grid[a].values.size();
      rem /= grid[a].values.size();
    }
    for (std::size_t a = 0; a < grid.size(); ++a) {
      const double v = grid[a].values[digits[a]];
      set_model_param(spec, grid[a].name, v);
      point.params.emplace_back(grid[a].name, v);
    }
    double sum = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<std::size_t> train, test;
      for (std::size_t i = 0; i < y.size(); ++i) (fold[i] == f ? test : train).push_back(i);
      std::vector<int> ytr, yte;
      for (std::size_t i : train) ytr.push_back(y[i]);
      for (std::size_t i : test) yte.push_back(y[i]);
      const TrainedModel m = fit(spec, x.select_rows(train), ytr, n_classes);
      const double acc = accuracy(yte, m.predict(x.select_rows(test)));
      point.fold_accuracy.push_back(acc);
      sum += acc;
    }
    point.mean_accuracy = sum / static_cast<double>(folds);
    if (g == 0 || point.mean_accuracy > result.points[result.best_index].mean_accuracy) {
      result.best_index = g;
      result.best = spec;
    }
    result.points.push_back(std::move(point));
  }
  return result;
}

}  // namespace milkspec
