#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "milkspec/core/matrix.hpp"
#include "milkspec/learn/models.hpp"

namespace milkspec {

/// One axis of the grid: a parameter key and the values to try.
struct GridAxis {
  std::string name;
  std::vector<double> values;
};

struct GridPoint {
  std::vector<std::pair<std::string, double>> params;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
};

struct GridSearchResult {
  ModelSpec best;
  std::size_t best_index = 0;
  std::vector<GridPoint> points;  // cartesian order, first axis slowest
};

/// Stratified k-fold cross-validation over the cartesian product of the
/// axes. The highest mean accuracy wins; ties keep the earliest point.
/// Throws std::invalid_argument for fewer than 2 folds or an empty grid and
/// DataError when a class has fewer members than folds.
GridSearchResult grid_search(const ModelSpec& base, const std::vector<GridAxis>& grid, const Matrix& x,
                             std::span<const int> y, std::size_t folds, std::uint64_t seed);

}  // namespace milkspec
