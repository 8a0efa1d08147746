#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "milkspec/core/dataset.hpp"

namespace milkspec {

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Fisher–Yates shuffle of 0..n−1; the first floor(n·fraction) go to
/// train. Throws std::invalid_argument when either side would be empty.
SplitIndices train_test_split(std::size_t n, const SplitSpec& spec);

struct DatasetSplit {
  Dataset train;
  Dataset test;
  SplitIndices indices;
};

DatasetSplit train_test_split(const Dataset& data, const SplitSpec& spec);

/// In-place Fisher–Yates with the given seed.
void seeded_shuffle(std::vector<std::size_t>& v, std::uint64_t seed);

/// Fold id per row: each class's indices are shuffled and dealt round-robin,
/// continuing the deal across classes. Throws DataError when a class has
/// fewer members than folds.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed);

}  // namespace milkspec
