#include "milkspec/learn/split.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "milkspec/error.hpp"
#include "milkspec/learn/rng.hpp"

namespace milkspec {

void seeded_shuffle(std::vector<std::size_t>& v, std::uint64_t seed) {
  SplitMix64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

SplitIndices train_test_split(std::size_t n, const SplitSpec& spec) {
  if (n < 2) throw std::invalid_argument("train_test_split: need at least 2 rows");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw std::invalid_argument("train_test_split: fraction must lie in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.train_fraction));
  if (n_train == 0 || n_train == n)
    throw std::invalid_argument(fmt::format("train_test_split: fraction {} leaves an empty side for n = {}",
                                            spec.train_fraction, n));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  seeded_shuffle(idx, spec.seed);
  SplitIndices s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  return s;
}

DatasetSplit train_test_split(const Dataset& data, const SplitSpec& spec) {
  DatasetSplit out;
  out.indices = train_test_split(data.size(), spec);
  out.train = data.subset(out.indices.train);
  out.test = data.subset(out.indices.test);
  return out;
}

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("stratified_folds: need at least 2 folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::vector<std::size_t> fold(labels.size());
  std::size_t deal = 0;
  for (auto& [label, idx] : by_class) {
    if (idx.size() < folds)
      throw DataError(fmt::format("stratified_folds: class {} has {} members, fewer than {} folds", label,
                                  idx.size(), folds));
    seeded_shuffle(idx, derive_seed(seed, static_cast<std::uint64_t>(label)));
    for (std::size_t i : idx) fold[i] = deal++ % folds;
  }
  return fold;
}

}  // namespace milkspec
