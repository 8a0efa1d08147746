#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "milkspec/core/dataset.hpp"
#include "milkspec/core/summary.hpp"
#include "milkspec/features/features.hpp"
#include "milkspec/kernels/exec.hpp"
#include "milkspec/learn/grid_search.hpp"
#include "milkspec/learn/models.hpp"
#include "milkspec/numerics/correlation.hpp"
#include "milkspec/numerics/decomposition.hpp"

namespace milkspec {

enum class Analysis { group_summary, effects, correlate, pca, mnf_cluster, cluster_validate, regress, classify };

std::string_view to_string(Analysis a);
Analysis parse_analysis(std::string_view s);

/// Where an analysis takes its feature columns from.
enum class FeatureSource { spectra, image, chemistry };

std::string_view to_string(FeatureSource s);
FeatureSource parse_feature_source(std::string_view s);

struct SummarySettings {
  std::vector<std::string> parameters{"polyphenols", "frap"};
  std::vector<GroupKey> keys{GroupKey::cow_group, GroupKey::time};
};

struct EffectsSettings {
  std::vector<std::string> parameters{"frap", "polyphenols"};
};

struct CorrelateSettings {
  FeatureSource source = FeatureSource::spectra;
  std::vector<std::string> targets{"polyphenols", "frap"};
  std::vector<CorrelationMethod> methods{CorrelationMethod::pearson, CorrelationMethod::kendall};
  double alpha = 0.05;
  PCorrection correction = PCorrection::none;
};

struct PcaSettings {
  FeatureSource source = FeatureSource::chemistry;
  std::vector<std::string> columns;  // empty: every feature column of the source
  std::size_t n_components = 2;
  std::string label = "cow_group";
  bool standardize = false;
};

struct MnfClusterSettings {
  std::size_t mnf_components = 10;
  std::size_t pca_components = 2;
  std::size_t k = 3;
  std::string auxiliary = "polyphenols";
  NoiseShift shift = NoiseShift::horizontal;
};

struct ClusterValidateSettings {
  std::vector<std::string> auxiliary{"polyphenols", "frap"};
};

enum class RegressionMethod { ols, pls, lasso };

struct RegressSettings {
  FeatureSource source = FeatureSource::image;
  std::string target = "polyphenols";
  std::vector<std::string> features;  // empty: every feature column
  RegressionMethod method = RegressionMethod::ols;
  double lambda = 0.1;
  std::size_t n_components = 2;
  double alpha = 0.05;
};

struct ClassifySettings {
  FeatureSource source = FeatureSource::image;
  std::string target = "time";
  std::vector<std::string> features;
  std::optional<DiscretizeScheme> discretize;  // required for continuous targets
  ModelSpec model = ForestSpec{};
  double train_fraction = 0.8;
  std::vector<GridAxis> grid;
  std::size_t folds = 5;
};

struct PipelineConfig {
  std::filesystem::path cube_dir;
  std::filesystem::path patch_dir;
  std::filesystem::path chemistry_csv;
  std::size_t roi_side = 64;
  GlcmConfig glcm;
  bool snv = false;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir = "milkspec_out";
  Exec exec = Exec::parallel;
  std::set<Analysis> analyses;

  SummarySettings summary;
  EffectsSettings effects;
  CorrelateSettings correlate;
  PcaSettings pca;
  MnfClusterSettings mnf_cluster;
  ClusterValidateSettings cluster_validate;
  RegressSettings regress;
  ClassifySettings classify;

  /// Canonical JSON of the effective configuration (hashed in the manifest).
  std::string canonical_json() const;
};

/// Parses the JSON configuration. Relative paths resolve against
/// `base_dir`. Unknown keys and malformed values raise ConfigError.
PipelineConfig parse_pipeline_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Checks cross-field requirements (inputs present for the selected
/// analyses, seed for stochastic ones, paths exist). Throws ConfigError.
void validate_pipeline_config(const PipelineConfig& config);

}  // namespace milkspec
