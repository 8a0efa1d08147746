#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "milkspec/cli/config.hpp"
#include "milkspec/cli/pipeline.hpp"
#include "milkspec/error.hpp"

using namespace milkspec;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool serial = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "pipeline configuration (JSON)")->required();
  cmd->add_option("--seed", flags.seed, "override the configured seed");
  cmd->add_option("--out", flags.out, "override the output directory");
  cmd->add_flag("--serial", flags.serial, "run kernels single-threaded");
}

int execute(const CommonFlags& flags, const std::function<StageSelection(const PipelineConfig&)>& select) {
  try {
    PipelineConfig cfg = load_pipeline_config(flags.config);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.out) cfg.output_dir = *flags.out;
    if (flags.serial) cfg.exec = Exec::serial;
    const ReportBundle bundle = run_pipeline(cfg, select(cfg));
    for (const auto& stage : bundle.stages) {
      std::cout << fmt::format("{:<18} {}\n", stage.name, stage.status);
      for (const auto& d : stage.diagnostics) std::cout << "    " << d << "\n";
    }
    std::cout << fmt::format("{} artifacts written to {}\n", bundle.artifacts.size(), bundle.output_dir.string());
    return bundle.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "milkspec: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"milkspec: spectral and image chemometrics for milk samples"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    std::function<StageSelection(const PipelineConfig&)> select;
  };
  auto only = [](std::initializer_list<Analysis> a) {
    return [set = std::set<Analysis>(a)](const PipelineConfig&) {
      StageSelection s;
      s.analyses = set;
      return s;
    };
  };
  const std::vector<Command> commands{
      {"ingest", "read cubes and chemistry, write ROI mean spectra",
       [](const PipelineConfig&) { StageSelection s; s.ingest = true; return s; }},
      {"features", "extract image descriptors from RGB patches",
       [](const PipelineConfig&) { StageSelection s; s.features = true; return s; }},
      {"correlate", "per-band correlation significance", only({Analysis::correlate})},
      {"pca", "principal component analysis and scatter plot", only({Analysis::pca})},
      {"mnf-cluster", "MNF, PCA, k-means, silhouette and ANOVA", only({Analysis::mnf_cluster})},
      {"regress", "OLS, PLS or LASSO regression", only({Analysis::regress})},
      {"classify", "train and evaluate a classifier", only({Analysis::classify})},
      {"cluster-validate", "ANOVA of auxiliary variables across clusters", only({Analysis::cluster_validate})},
      {"report", "group summaries and two-way effects", only({Analysis::group_summary, Analysis::effects})},
      {"run", "every analysis selected in the configuration", StageSelection::from_config},
  };

  std::vector<CommonFlags> flags(commands.size());
  for (std::size_t i = 0; i < commands.size(); ++i) add_common(app.add_subcommand(commands[i].name, commands[i].help), flags[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (std::size_t i = 0; i < commands.size(); ++i)
    if (app.got_subcommand(commands[i].name)) return execute(flags[i], commands[i].select);
  return 2;
}
