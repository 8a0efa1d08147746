#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "milkspec/cli/config.hpp"
#include "milkspec/learn/cluster.hpp"
#include "milkspec/numerics/anova.hpp"
#include "milkspec/numerics/decomposition.hpp"

namespace milkspec {

std::string_view tool_version();

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// 0 ok, 2 config, 3 data or format, 4 degenerate input.
int exit_code_for(const std::exception& e);

struct StageRecord {
  std::string name;
  std::string status;  // "ok", "failed" or "skipped"
  int exit_code = 0;
  std::vector<std::string> diagnostics;
  std::vector<std::string> artifacts;
};

struct ArtifactRecord {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

struct ReportBundle {
  std::filesystem::path output_dir;
  std::vector<StageRecord> stages;
  std::vector<ArtifactRecord> artifacts;  // sorted by path; excludes the manifest
  std::string manifest_json;
  /// First non-zero stage exit code, 0 when every stage succeeded.
  int exit_code = 0;
};

/// Which stages to execute. Ingest and features also run implicitly when a
/// selected analysis needs them.
struct StageSelection {
  bool ingest = false;
  bool features = false;
  std::set<Analysis> analyses;

  static StageSelection from_config(const PipelineConfig& config);
};

/// Runs the selected stages in dependency order and writes the artifacts
/// plus manifest.json into config.output_dir. A failing stage writes
/// nothing and is recorded with its diagnostic; later stages still run.
/// Throws ConfigError when the configuration itself is invalid.
ReportBundle run_pipeline(const PipelineConfig& config, const StageSelection& selection);
inline ReportBundle run_pipeline(const PipelineConfig& config) {
  return run_pipeline(config, StageSelection::from_config(config));
}

/// MNF projection of per-sample spectra, PCA, k-means, silhouette and a
/// one-way ANOVA of the auxiliary variable across clusters.
struct Method11Result {
  Matrix reduced;  // samples × mnf_components
  PcaResult pca;
  ClusterResult clusters;
  std::optional<AnovaOneWay> anova;
  std::size_t anova_rows = 0;  // rows with a finite auxiliary value
};

/// `auxiliary` may be empty (no ANOVA) or hold one value per row of
/// `spectra`; NaN entries are left out of the ANOVA.
Method11Result method11_analysis(const MnfResult& mnf, const Matrix& spectra, std::span<const double> auxiliary,
                                 const MnfClusterSettings& settings, std::uint64_t seed,
                                 Exec exec = Exec::parallel);

}  // namespace milkspec
