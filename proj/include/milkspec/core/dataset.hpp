#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "milkspec/core/chemistry.hpp"
#include "milkspec/core/matrix.hpp"

namespace milkspec {

/// Named feature rows keyed by sample id (ROI spectra, image descriptors).
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<std::string> sample_ids;
  Matrix values;  // sample_ids.size() × names.size()
};

std::string format_feature_csv(const FeatureTable& table);
/// First column is sample_id; the rest are numeric features.
FeatureTable parse_feature_csv(std::string_view csv);

struct RowMeta {
  std::string sample_id;
  CowGroup group = CowGroup::SIG;
  SamplingTime time = SamplingTime::T0;
};

/// A target column; NaN marks a missing value.
struct TargetColumn {
  std::string name;
  std::vector<double> values;
};

/// Feature matrix joined with chemistry targets and row metadata.
class Dataset {
 public:
  Dataset() = default;
  /// Throws DataError when row counts disagree or names repeat.
  Dataset(Matrix features, std::vector<std::string> feature_names, std::vector<RowMeta> rows,
          std::vector<TargetColumn> targets);

  std::size_t size() const { return rows_.size(); }
  const Matrix& features() const { return features_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<RowMeta>& rows() const { return rows_; }
  const std::vector<TargetColumn>& targets() const { return targets_; }

  /// Throws DataError for an unknown name.
  const TargetColumn& target(std::string_view name) const;
  std::optional<std::size_t> feature_index(std::string_view name) const;
  /// Feature columns by name, in the order given.
  Matrix feature_columns(std::span<const std::string> names) const;

  /// Rows in the given order (targets and metadata follow).
  Dataset subset(std::span<const std::size_t> idx) const;

 private:
  Matrix features_;
  std::vector<std::string> feature_names_;
  std::vector<RowMeta> rows_;
  std::vector<TargetColumn> targets_;
};

/// Inner join of feature rows with chemistry panels on sample_id. Every
/// feature row must match exactly one panel. `target_spec` names the
/// columns to materialize ("polyphenols", "frap", fatty acids, "cow_group",
/// "time"); missing cells become NaN.
Dataset build_dataset(const FeatureTable& features, std::span<const ChemistryPanel> panels,
                      std::span<const std::string> target_spec);

/// Chemistry-only dataset (no feature columns), one row per panel.
Dataset chemistry_dataset(std::span<const ChemistryPanel> panels,
                          std::span<const std::string> target_spec);

struct DiscretizeScheme {
  enum class Kind { median_split, quantile };
  Kind kind = Kind::median_split;
  int classes = 2;  // used by quantile

  static DiscretizeScheme median_split() { return {}; }
  static DiscretizeScheme quantile(int k) { return {Kind::quantile, k}; }
};

/// Bins a continuous target into class labels. Edges are the empirical
/// (linear-interpolation) quantiles at j/k; a value equal to an edge goes to
/// the lower class. Throws DegenerateError when all values are identical
/// and std::invalid_argument on NaN input or k < 2.
std::vector<int> discretize_target(std::span<const double> values, const DiscretizeScheme& scheme);

/// Linear-interpolation empirical quantile (q in [0, 1]) of unsorted data.
double empirical_quantile(std::span<const double> values, double q);

}  // namespace milkspec
