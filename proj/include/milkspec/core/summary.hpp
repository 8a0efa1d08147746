#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "milkspec/core/dataset.hpp"

namespace milkspec {

enum class GroupKey { cow_group, time };

/// Descriptive statistics of one parameter within one (group, time) cell.
struct SummaryCell {
  std::optional<CowGroup> group;
  std::optional<SamplingTime> time;
  std::string parameter;
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;  // divisor n−1; absent when n == 1
  std::optional<double> cv;  // sd / mean; absent when sd is absent or mean == 0

  /// "1.32 ± 0.44" (two decimals); "1.32 ± n/a" when sd is undefined.
  std::string render() const;
};

struct GroupSummary {
  std::vector<GroupKey> keys;
  std::vector<std::string> parameters;
  /// Column labels in output order, e.g. "SIG = 0" or "SIG T0".
  std::vector<std::string> column_labels;
  /// cells[parameter][column].
  std::vector<std::vector<SummaryCell>> cells;

  /// Fixed-width "Parameter | <columns>" table of "mean ± sd" entries.
  std::string render_table() const;
  /// Long-form CSV: parameter,group,time,n,mean,sd,cv.
  std::string render_csv() const;
};

/// Mean, sample sd and cv of every target column for each combination of
/// the requested keys present in the data. Missing values are skipped per
/// parameter. Throws DataError when a cell has no usable value or the
/// dataset is empty.
GroupSummary group_summary(const Dataset& dataset, std::span<const GroupKey> keys);

}  // namespace milkspec
