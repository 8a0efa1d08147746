#include "milkspec/cli/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <variant>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "milkspec/cli/svg.hpp"
#include "milkspec/core/chemistry.hpp"
#include "milkspec/core/dataset.hpp"
#include "milkspec/core/envi.hpp"
#include "milkspec/core/roi.hpp"
#include "milkspec/core/summary.hpp"
#include "milkspec/error.hpp"
#include "milkspec/features/features.hpp"
#include "milkspec/features/image.hpp"
#include "milkspec/learn/report.hpp"
#include "milkspec/learn/split.hpp"
#include "milkspec/numerics/correlation.hpp"
#include "milkspec/numerics/ols.hpp"
#include "milkspec/numerics/qq.hpp"
#include "milkspec/numerics/regression.hpp"
#include "milkspec/util/text.hpp"

#ifndef MILKSPEC_VERSION
#define MILKSPEC_VERSION "0.0.0"
#endif

namespace milkspec {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view tool_version() { return MILKSPEC_VERSION; }

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const FormatError*>(&e)) return 3;
  if (dynamic_cast<const DegenerateError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e)) return 4;
  return 1;
}

StageSelection StageSelection::from_config(const PipelineConfig& config) {
  StageSelection s;
  s.analyses = config.analyses;
  return s;
}

Method11Result method11_analysis(const MnfResult& mnf, const Matrix& spectra, std::span<const double> auxiliary,
                                 const MnfClusterSettings& settings, std::uint64_t seed, Exec exec) {
  if (settings.mnf_components == 0 || settings.mnf_components > spectra.cols())
    throw std::invalid_argument("method11: mnf_components must lie in [1, bands]");
  if (settings.pca_components == 0 || settings.pca_components > settings.mnf_components)
    throw std::invalid_argument("method11: pca_components must lie in [1, mnf_components]");
  if (!auxiliary.empty() && auxiliary.size() != spectra.rows())
    throw std::invalid_argument("method11: auxiliary length differs from the sample count");

  Method11Result r;
  r.reduced = mnf_transform(mnf, spectra).left_cols(settings.mnf_components);
  r.pca = pca(r.reduced, settings.pca_components, exec);
  r.clusters = kmeans(r.pca.scores, KMeansOptions{settings.k, seed, 300, exec});
  r.clusters.silhouette_mean = silhouette(r.pca.scores, r.clusters.assignments, exec);
  if (!auxiliary.empty()) {
    std::vector<int> labels;
    std::vector<double> values;
    for (std::size_t i = 0; i < auxiliary.size(); ++i) {
      if (std::isnan(auxiliary[i])) continue;
      labels.push_back(r.clusters.assignments[i]);
      values.push_back(auxiliary[i]);
    }
    r.anova_rows = values.size();
    r.anova = cluster_validate(labels, values);
    r.clusters.anova_p = r.anova->p_value;
  }
  return r;
}

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json anova_oneway_json(const AnovaOneWay& a) {
  return {{"f", num(a.f)},
          {"p_value", num(a.p_value)},
          {"df_between", a.df_between},
          {"df_within", a.df_within},
          {"ss_between", num(a.ss_between)},
          {"ss_within", num(a.ss_within)},
          {"degenerate", a.degenerate}};
}

json effect_json(const AnovaEffect& e) {
  return {{"name", e.name}, {"df", e.df}, {"ss", num(e.ss)}, {"ms", num(e.ms)}, {"f", num(e.f)},
          {"p_value", num(e.p_value)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

std::vector<fs::path> list_files(const fs::path& dir, std::string_view ext) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (text::to_lower(entry.path().extension().string()) == ext) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw DataError(fmt::format("no {} files in {}", ext, dir.string()));
  return out;
}

std::string with_sample(const std::string& id, const std::exception& e) {
  return fmt::format("sample {}: {}", id, e.what());
}

// Re-throws `e` as the same error class with the sample id prefixed.
[[noreturn]] void rethrow_with_sample(const std::string& id, const std::exception& e) {
  const std::string msg = with_sample(id, e);
  if (dynamic_cast<const FormatError*>(&e)) throw FormatError(msg);
  if (dynamic_cast<const DegenerateError*>(&e)) throw DegenerateError(msg);
  if (dynamic_cast<const std::invalid_argument*>(&e)) throw DegenerateError(msg);
  throw DataError(msg);
}

using Artifacts = std::map<std::string, std::string>;

// State shared between stages.
struct Context {
  const PipelineConfig& cfg;
  std::optional<std::vector<ChemistryPanel>> panels;
  std::optional<FeatureTable> spectra;
  std::vector<double> wavelengths;
  std::optional<MnfAccumulator> mnf_acc;
  std::optional<FeatureTable> image;
  std::optional<Method11Result> method11;
  std::vector<std::string> method11_ids;
};

struct StageOutput {
  Artifacts files;
  std::vector<std::string> diagnostics;
};

std::uint64_t require_seed(const Context& c) {
  if (!c.cfg.seed) throw ConfigError("a seed is required for this analysis");
  return *c.cfg.seed;
}

const std::vector<ChemistryPanel>& need_panels(const Context& c) {
  if (!c.panels) throw DataError("chemistry table unavailable (ingest failed)");
  return *c.panels;
}

std::vector<std::string> chemistry_columns(const std::vector<ChemistryPanel>& panels) {
  std::set<std::string> names;
  for (const auto& p : panels)
    for (const auto& [k, _] : p.fatty_acids) names.insert(k);
  return {names.begin(), names.end()};
}

// Feature rows of the requested source joined with chemistry targets. Rows
// with a missing value in any selected feature or target are dropped.
Dataset source_dataset(const Context& c, FeatureSource source, const std::vector<std::string>& columns,
                       const std::vector<std::string>& targets, std::vector<std::string>& diagnostics) {
  const auto& panels = need_panels(c);
  std::vector<std::string> spec = targets;
  for (const char* k : {"cow_group", "time"})
    if (std::find(spec.begin(), spec.end(), k) == spec.end()) spec.push_back(k);

  Dataset ds;
  if (source == FeatureSource::chemistry) {
    std::vector<std::string> cols = columns.empty() ? chemistry_columns(panels) : columns;
    if (cols.empty()) throw DataError("chemistry table has no fatty-acid columns");
    std::vector<std::string> all = cols;
    for (const auto& t : spec)
      if (std::find(all.begin(), all.end(), t) == all.end()) all.push_back(t);
    const Dataset chem = chemistry_dataset(panels, all);
    std::vector<std::vector<double>> values;
    for (const auto& name : cols) values.push_back(chem.target(name).values);
    std::vector<TargetColumn> tcols;
    for (const auto& t : spec) tcols.push_back(chem.target(t));
    ds = Dataset(Matrix::from_columns(values), cols, chem.rows(), tcols);
  } else {
    const std::optional<FeatureTable>& table = source == FeatureSource::spectra ? c.spectra : c.image;
    if (!table)
      throw DataError(fmt::format("{} features unavailable ({} failed)", to_string(source),
                                  source == FeatureSource::spectra ? "ingest" : "features"));
    ds = build_dataset(*table, panels, spec);
    if (!columns.empty()) {
      for (const auto& name : columns)
        if (!ds.feature_index(name)) throw ConfigError("unknown feature column \"" + name + "\"");
      ds = Dataset(ds.feature_columns(columns), columns, ds.rows(), ds.targets());
    }
  }

  std::vector<std::size_t> keep;
  const Matrix& x = ds.features();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < x.cols() && ok; ++j) ok = std::isfinite(x(i, j));
    for (const auto& t : targets) ok = ok && !std::isnan(ds.target(t).values[i]);
    if (ok) keep.push_back(i);
  }
  if (keep.size() != ds.size()) {
    diagnostics.push_back(fmt::format("dropped {} of {} rows with missing values", ds.size() - keep.size(), ds.size()));
    ds = ds.subset(keep);
  }
  if (ds.size() == 0) throw DataError("no complete rows");
  return ds;
}

// ---- stages ---------------------------------------------------------------

void ingest_chemistry(Context& c) {
  if (c.panels) return;
  c.panels = parse_chemistry_table(text::read_file(c.cfg.chemistry_csv.string()));
}

StageOutput stage_ingest(Context& c, bool want_mnf) {
  StageOutput out;
  ingest_chemistry(c);
  if (c.cfg.cube_dir.empty()) {
    out.diagnostics.push_back("no cube_dir configured; chemistry only");
    return out;
  }
  FeatureTable table;
  std::vector<std::vector<double>> rows;
  std::optional<MnfAccumulator> acc;
  std::optional<std::vector<double>> wavelengths;
  for (const auto& hdr : list_files(c.cfg.cube_dir, ".hdr")) {
    const std::string id = hdr.stem().string();
    try {
      const HyperCube cube = load_envi(hdr, c.cfg.exec);
      const Roi roi = extract_center_roi(cube.lines(), cube.samples(), c.cfg.roi_side);
      RoiSpectrum spec = roi_mean_spectrum(cube, roi, id);
      if (c.cfg.snv) spec.mean_reflectance = snv_normalize(spec.mean_reflectance);
      if (!rows.empty() && spec.mean_reflectance.size() != rows.front().size())
        throw DataError(fmt::format("band count {} differs from {}", spec.mean_reflectance.size(), rows.front().size()));
      std::vector<double> wl = cube.header().wavelengths ? cube.header().wavelengths->values() : std::vector<double>{};
      if (!wavelengths) wavelengths = wl;
      else if (*wavelengths != wl) throw DataError("wavelength grid differs from the first cube");
      if (want_mnf) {
        if (!acc) acc.emplace(cube.bands());
        acc->add(crop(cube, roi), c.cfg.mnf_cluster.shift, c.cfg.exec);
      }
      table.sample_ids.push_back(id);
      rows.push_back(std::move(spec.mean_reflectance));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      rethrow_with_sample(id, e);
    } catch (const std::invalid_argument& e) {
      rethrow_with_sample(id, e);
    }
  }
  const std::size_t bands = rows.front().size();
  for (std::size_t b = 0; b < bands; ++b)
    table.names.push_back(wavelengths->empty() ? fmt::format("band_{}", b) : text::format_double((*wavelengths)[b]));
  table.values = Matrix(rows.size(), bands);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t b = 0; b < bands; ++b) table.values(i, b) = rows[i][b];
  out.files["spectra.csv"] = format_feature_csv(table);
  c.spectra = std::move(table);
  c.wavelengths = *wavelengths;
  if (acc) c.mnf_acc = std::move(acc);
  return out;
}

StageOutput stage_features(Context& c) {
  StageOutput out;
  FeatureTable table;
  table.names = ImageFeatureVector::names();
  std::vector<std::vector<double>> rows;
  for (const auto& ppm : list_files(c.cfg.patch_dir, ".ppm")) {
    const std::string id = ppm.stem().string();
    try {
      rows.push_back(extract_feature_vector(load_ppm(ppm), c.cfg.glcm).to_vector());
      table.sample_ids.push_back(id);
    } catch (const Error& e) {
      rethrow_with_sample(id, e);
    } catch (const std::invalid_argument& e) {
      rethrow_with_sample(id, e);
    }
  }
  table.values = Matrix(rows.size(), table.names.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < table.names.size(); ++j) table.values(i, j) = rows[i][j];
  out.files["image_features.csv"] = format_feature_csv(table);
  c.image = std::move(table);
  return out;
}

StageOutput stage_group_summary(Context& c) {
  StageOutput out;
  const auto& s = c.cfg.summary;
  const Dataset ds = chemistry_dataset(need_panels(c), s.parameters);
  const GroupSummary g = group_summary(ds, s.keys);
  out.files["group_summary.txt"] = g.render_table();
  out.files["group_summary.csv"] = g.render_csv();
  return out;
}

StageOutput stage_effects(Context& c) {
  StageOutput out;
  std::vector<EffectPRow> rows;
  json list = json::array();
  const Dataset ds = chemistry_dataset(need_panels(c), c.cfg.effects.parameters);
  for (const auto& param : c.cfg.effects.parameters) {
    std::vector<double> values;
    std::vector<std::string> time, group;
    const auto& col = ds.target(param).values;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (std::isnan(col[i])) continue;
      values.push_back(col[i]);
      time.emplace_back(to_string(ds.rows()[i].time));
      group.emplace_back(to_string(ds.rows()[i].group));
    }
    if (values.size() != ds.size())
      out.diagnostics.push_back(fmt::format("{}: {} rows with missing values left out", param, ds.size() - values.size()));
    AnovaTwoWay a;
    try {
      a = anova_twoway(values, time, group, true);
    } catch (const Error& e) {
      throw DataError(fmt::format("parameter {}: {}", param, e.what()));
    }
    if (a.degenerate) out.diagnostics.push_back(param + ": zero residual variance");
    list.push_back({{"parameter", param},
                    {"n", values.size()},
                    {"time", effect_json(a.a)},
                    {"group", effect_json(a.b)},
                    {"interaction", effect_json(a.interaction)},
                    {"df_residual", a.df_residual},
                    {"ss_residual", num(a.ss_residual)},
                    {"ms_residual", num(a.ms_residual)},
                    {"balanced", a.balanced},
                    {"degenerate", a.degenerate}});
    rows.push_back({param, a});
  }
  out.files["effects_anova.txt"] = format_effect_p_table(rows);
  out.files["effects_anova.json"] = dump({{"model", "two-way fixed effects, type I sums of squares"}, {"effects", list}});
  return out;
}

StageOutput stage_correlate(Context& c) {
  StageOutput out;
  const auto& s = c.cfg.correlate;
  std::string csv = "target,method,band,feature,coefficient,p_value,p_adjusted,significant,diagnostic\n";
  json results = json::array();
  for (const auto& target : s.targets) {
    const Dataset ds = source_dataset(c, s.source, {}, {target}, out.diagnostics);
    const auto& y = ds.target(target).values;
    std::vector<double> wl;
    if (s.source == FeatureSource::spectra && c.wavelengths.size() == ds.features().cols()) wl = c.wavelengths;
    for (CorrelationMethod m : s.methods) {
      const auto bands =
          band_significance(ds.features(), y, BandSignificanceOptions{m, s.alpha, s.correction, c.cfg.exec}, wl);
      std::size_t flagged = 0;
      json significant = json::array();
      for (const auto& b : bands) {
        const std::string& feature = ds.feature_names()[b.band];
        csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", csv_field(target), to_string(m), b.band, csv_field(feature),
                           text::format_double(b.coefficient), text::format_double(b.p_value),
                           text::format_double(b.p_adjusted), b.significant ? 1 : 0, csv_field(b.diagnostic));
        if (b.significant) {
          ++flagged;
          significant.push_back({{"band", b.band}, {"feature", feature}, {"coefficient", num(b.coefficient)},
                                 {"p_adjusted", num(b.p_adjusted)}});
        }
      }
      results.push_back({{"target", target},
                         {"method", to_string(m)},
                         {"n", ds.size()},
                         {"bands", bands.size()},
                         {"significant_count", flagged},
                         {"significant", significant}});
    }
  }
  out.files["correlation.csv"] = csv;
  out.files["correlation.json"] = dump({{"source", std::string(to_string(s.source))},
                                        {"alpha", s.alpha},
                                        {"correction", to_string(s.correction)},
                                        {"results", results}});
  return out;
}

std::string row_label(const RowMeta& row, const std::string& label) {
  if (label == "cow_group" || label == "group") return std::string(to_string(row.group));
  if (label == "time") return std::string(to_string(row.time));
  throw ConfigError("pca label must be cow_group or time");
}

StageOutput stage_pca(Context& c) {
  StageOutput out;
  const auto& s = c.cfg.pca;
  const Dataset ds = source_dataset(c, s.source, s.columns, {}, out.diagnostics);
  Matrix x = ds.features();
  if (s.standardize) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const auto col = x.column(j);
      const double m = mean(col);
      const double sd = std::sqrt(sample_variance(col));
      for (std::size_t i = 0; i < x.rows(); ++i) x(i, j) = sd > 0.0 ? (x(i, j) - m) / sd : 0.0;
    }
  }
  const PcaResult p = pca(x, s.n_components, c.cfg.exec);
  std::vector<std::string> labels;
  for (const auto& r : ds.rows()) labels.push_back(row_label(r, s.label));

  json loadings = json::object();
  for (std::size_t j = 0; j < ds.feature_names().size(); ++j) {
    json row = json::array();
    for (std::size_t k = 0; k < p.loadings.cols(); ++k) row.push_back(num(p.loadings(j, k)));
    loadings[ds.feature_names()[j]] = row;
  }
  out.files["pca.json"] = dump({{"source", std::string(to_string(s.source))},
                                {"standardize", s.standardize},
                                {"n", ds.size()},
                                {"features", ds.feature_names()},
                                {"explained_variance", p.explained_variance},
                                {"explained_variance_ratio", p.explained_variance_ratio},
                                {"loadings", loadings}});
  std::string csv = "sample_id," + s.label;
  for (std::size_t k = 0; k < p.scores.cols(); ++k) csv += fmt::format(",pc{}", k + 1);
  csv += "\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    csv += csv_field(ds.rows()[i].sample_id) + "," + labels[i];
    for (std::size_t k = 0; k < p.scores.cols(); ++k) csv += "," + text::format_double(p.scores(i, k));
    csv += "\n";
  }
  out.files["pca_scores.csv"] = csv;
  if (p.scores.cols() >= 2) out.files["pca_scatter.svg"] = render_scatter_svg(p, labels);
  else out.diagnostics.push_back("scatter plot needs two components");
  return out;
}

void ensure_method11(Context& c, std::vector<std::string>& diagnostics) {
  if (c.method11) return;
  const std::uint64_t seed = require_seed(c);
  if (!c.spectra || !c.mnf_acc) throw DataError("spectral cubes unavailable (ingest failed)");
  const auto& s = c.cfg.mnf_cluster;
  const MnfResult mnf = c.mnf_acc->finish(MnfOptions{s.shift, 1e-10, c.cfg.exec});
  if (mnf.regularization_fallback) diagnostics.push_back("noise covariance had zero trace; identity ridge used");
  const Dataset ds = build_dataset(*c.spectra, need_panels(c), std::vector<std::string>{s.auxiliary});
  const auto& aux = ds.target(s.auxiliary).values;
  c.method11 = method11_analysis(mnf, ds.features(), aux, s, seed, c.cfg.exec);
  c.method11_ids.clear();
  for (const auto& r : ds.rows()) c.method11_ids.push_back(r.sample_id);
  if (c.method11->anova_rows != ds.size())
    diagnostics.push_back(fmt::format("{} rows without {} left out of the ANOVA", ds.size() - c.method11->anova_rows,
                                      s.auxiliary));
}

StageOutput stage_mnf_cluster(Context& c) {
  StageOutput out;
  ensure_method11(c, out.diagnostics);
  const auto& m = *c.method11;
  const auto& s = c.cfg.mnf_cluster;
  json centroids = json::array();
  for (std::size_t k = 0; k < m.clusters.centroids.rows(); ++k) {
    json row = json::array();
    for (std::size_t j = 0; j < m.clusters.centroids.cols(); ++j) row.push_back(num(m.clusters.centroids(k, j)));
    centroids.push_back(row);
  }
  std::vector<std::size_t> sizes(s.k, 0);
  for (int a : m.clusters.assignments) ++sizes[static_cast<std::size_t>(a)];
  out.files["mnf_cluster.json"] = dump({{"mnf_components", s.mnf_components},
                                        {"pca_components", s.pca_components},
                                        {"k", s.k},
                                        {"seed", *c.cfg.seed},
                                        {"pixels", c.mnf_acc->pixel_count()},
                                        {"noise_pairs", c.mnf_acc->pair_count()},
                                        {"pca_explained_variance_ratio", m.pca.explained_variance_ratio},
                                        {"cluster_sizes", sizes},
                                        {"centroids", centroids},
                                        {"inertia", num(m.clusters.inertia)},
                                        {"iterations", m.clusters.iterations},
                                        {"silhouette", num(*m.clusters.silhouette_mean)},
                                        {"auxiliary", s.auxiliary},
                                        {"anova", m.anova ? anova_oneway_json(*m.anova) : json(nullptr)}});
  std::string csv = "sample_id,cluster";
  for (std::size_t k = 0; k < m.pca.scores.cols(); ++k) csv += fmt::format(",pc{}", k + 1);
  csv += "\n";
  for (std::size_t i = 0; i < c.method11_ids.size(); ++i) {
    csv += csv_field(c.method11_ids[i]) + "," + std::to_string(m.clusters.assignments[i]);
    for (std::size_t k = 0; k < m.pca.scores.cols(); ++k) csv += "," + text::format_double(m.pca.scores(i, k));
    csv += "\n";
  }
  out.files["clusters.csv"] = csv;
  return out;
}

StageOutput stage_cluster_validate(Context& c) {
  StageOutput out;
  ensure_method11(c, out.diagnostics);
  const auto& m = *c.method11;
  const Dataset ds = build_dataset(*c.spectra, need_panels(c), c.cfg.cluster_validate.auxiliary);
  json tests = json::array();
  for (const auto& name : c.cfg.cluster_validate.auxiliary) {
    std::vector<int> labels;
    std::vector<double> values;
    const auto& col = ds.target(name).values;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (std::isnan(col[i])) continue;
      labels.push_back(m.clusters.assignments[i]);
      values.push_back(col[i]);
    }
    const AnovaOneWay a = cluster_validate(labels, values);
    json entry = anova_oneway_json(a);
    entry["variable"] = name;
    entry["n"] = values.size();
    tests.push_back(entry);
  }
  out.files["cluster_validation.json"] =
      dump({{"k", c.cfg.mnf_cluster.k}, {"silhouette", num(*m.clusters.silhouette_mean)}, {"anova", tests}});
  return out;
}

double r_squared(std::span<const double> y, std::span<const double> fit) {
  const double m = mean(y);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - fit[i]) * (y[i] - fit[i]);
    ss_tot += (y[i] - m) * (y[i] - m);
  }
  return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : std::numeric_limits<double>::quiet_NaN();
}

StageOutput stage_regress(Context& c) {
  StageOutput out;
  const auto& s = c.cfg.regress;
  const Dataset ds = source_dataset(c, s.source, s.features, {s.target}, out.diagnostics);
  const auto& y = ds.target(s.target).values;
  const Matrix& x = ds.features();
  if (s.method == RegressionMethod::ols) {
    std::vector<std::string> names{"const"};
    names.insert(names.end(), ds.feature_names().begin(), ds.feature_names().end());
    OlsOptions opt;
    opt.alpha = s.alpha;
    opt.dependent = s.target;
    const OlsSummary fit = ols_fit(add_intercept(x), y, names, opt);
    if (fit.degenerate) out.diagnostics.push_back("exact fit; residual diagnostics undefined");
    out.files["ols.txt"] = fit.render_text();
    out.files["ols.json"] = fit.render_json(2) + "\n";
    if (!fit.degenerate) out.files["qq.svg"] = render_qq_svg(qq_points(fit.residuals));
    return out;
  }
  json j = {{"target", s.target}, {"n", ds.size()}, {"features", ds.feature_names()}};
  std::vector<double> fitted;
  if (s.method == RegressionMethod::pls) {
    const PlsModel model = pls_fit(x, y, s.n_components);
    const Matrix pred = pls_predict(model, x);
    fitted = pred.column(0);
    j["method"] = "pls";
    j["n_components"] = model.n_components;
    j["coefficients"] = model.coefficients.column(0);
    j["y_mean"] = model.y_means.front();
  } else {
    const LassoResult model = lasso_fit(x, y, s.lambda);
    fitted = lasso_predict(model, x);
    j["method"] = "lasso";
    j["lambda"] = s.lambda;
    j["lambda_max"] = lasso_lambda_max(x, y);
    j["intercept"] = model.intercept;
    j["coefficients"] = model.coefficients;
    j["sweeps"] = model.sweeps;
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) sse += (y[i] - fitted[i]) * (y[i] - fitted[i]);
  j["r_squared"] = num(r_squared(y, fitted));
  j["rmse"] = num(std::sqrt(sse / static_cast<double>(y.size())));
  out.files["regress.json"] = dump(j);
  return out;
}

// Class labels for the classification target, names sorted alphabetically.
std::vector<int> class_labels(const Dataset& ds, const ClassifySettings& s, std::vector<std::string>& names) {
  std::vector<std::string> raw;
  if (s.target == "cow_group" || s.target == "group" || s.target == "time") {
    for (const auto& r : ds.rows()) raw.push_back(row_label(r, s.target == "time" ? "time" : "cow_group"));
    std::set<std::string> uniq(raw.begin(), raw.end());
    names.assign(uniq.begin(), uniq.end());
  } else {
    if (!s.discretize) throw ConfigError("classify: a continuous target needs a discretize scheme");
    const auto codes = discretize_target(ds.target(s.target).values, *s.discretize);
    names.clear();
    if (s.discretize->kind == DiscretizeScheme::Kind::median_split) names = {"high", "low"};
    else
      for (int k = 1; k <= s.discretize->classes; ++k) names.push_back(fmt::format("Q{}", k));
    for (int code : codes) {
      if (s.discretize->kind == DiscretizeScheme::Kind::median_split) raw.push_back(code == 0 ? "low" : "high");
      else raw.push_back(fmt::format("Q{}", code + 1));
    }
  }
  std::vector<int> y;
  for (const auto& r : raw)
    y.push_back(static_cast<int>(std::find(names.begin(), names.end(), r) - names.begin()));
  return y;
}

StageOutput stage_classify(Context& c) {
  StageOutput out;
  const auto& s = c.cfg.classify;
  const std::uint64_t seed = require_seed(c);
  const bool categorical = s.target == "cow_group" || s.target == "group" || s.target == "time";
  const std::vector<std::string> targets = categorical ? std::vector<std::string>{} : std::vector{s.target};
  const Dataset ds = source_dataset(c, s.source, s.features, targets, out.diagnostics);
  std::vector<std::string> names;
  const std::vector<int> y = class_labels(ds, s, names);

  const SplitIndices split = train_test_split(ds.size(), SplitSpec{s.train_fraction, seed});
  if (split.train.empty() || split.test.empty()) throw DataError("classify: split leaves an empty partition");
  const Matrix x_train = ds.features().select_rows(split.train);
  const Matrix x_test = ds.features().select_rows(split.test);
  std::vector<int> y_train, y_test;
  for (auto i : split.train) y_train.push_back(y[i]);
  for (auto i : split.test) y_test.push_back(y[i]);

  ModelSpec spec = s.model;
  std::visit([&](auto& m) {
    if constexpr (requires { m.seed; }) m.seed = seed;
  }, spec);
  std::visit([&](auto& m) {
    if constexpr (requires { m.exec; }) m.exec = c.cfg.exec;
  }, spec);

  if (!s.grid.empty()) {
    const GridSearchResult g = grid_search(spec, s.grid, x_train, y_train, s.folds, seed);
    spec = g.best;
    json points = json::array();
    for (const auto& p : g.points) {
      json params = json::object();
      for (const auto& [k, v] : p.params) params[k] = v;
      points.push_back({{"params", params}, {"fold_accuracy", p.fold_accuracy}, {"mean_accuracy", p.mean_accuracy}});
    }
    out.files["grid_search.json"] = dump({{"folds", s.folds},
                                          {"best_index", g.best_index},
                                          {"best", json::parse(model_spec_to_json(g.best))},
                                          {"points", points}});
  }
  const TrainedModel model = fit(spec, x_train, y_train, static_cast<int>(names.size()));
  const auto pred = predict(model, x_test);
  const ClassificationReport report = classification_report(y_test, pred, names);
  const auto train_pred = predict(model, x_train);

  out.files["classification_report.txt"] = report.render_text();
  json rj = json::parse(report.render_json(2));
  rj["model"] = json::parse(model_spec_to_json(spec));
  rj["train_rows"] = split.train.size();
  rj["test_rows"] = split.test.size();
  rj["train_accuracy"] = accuracy(y_train, train_pred);
  out.files["classification_report.json"] = dump(rj);
  out.files["confusion.svg"] = render_confusion_svg(report);
  return out;
}

}  // namespace

ReportBundle run_pipeline(const PipelineConfig& config, const StageSelection& selection) {
  PipelineConfig cfg = config;
  cfg.analyses = selection.analyses;
  validate_pipeline_config(cfg);

  ReportBundle bundle;
  bundle.output_dir = cfg.output_dir;
  const std::string started = utc_now();
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());

  auto uses = [&](Analysis a) { return cfg.analyses.count(a) > 0; };
  auto uses_source = [&](FeatureSource s) {
    return (uses(Analysis::correlate) && cfg.correlate.source == s) || (uses(Analysis::pca) && cfg.pca.source == s) ||
           (uses(Analysis::regress) && cfg.regress.source == s) || (uses(Analysis::classify) && cfg.classify.source == s);
  };
  const bool want_mnf = uses(Analysis::mnf_cluster) || uses(Analysis::cluster_validate);
  const bool run_ingest = true;  // chemistry is always read
  const bool run_features = selection.features || uses_source(FeatureSource::image);

  Context ctx{cfg, {}, {}, {}, {}, {}, {}, {}};

  auto run_stage = [&](const std::string& name, const std::function<StageOutput()>& body) {
    StageRecord rec;
    rec.name = name;
    try {
      StageOutput out = body();
      for (auto& [file, content] : out.files) {
        text::write_file((cfg.output_dir / file).string(), content);
        rec.artifacts.push_back(file);
        bundle.artifacts.push_back({file, sha256_hex(content), content.size()});
      }
      rec.status = "ok";
      rec.diagnostics = std::move(out.diagnostics);
    } catch (const std::exception& e) {
      rec.status = "failed";
      rec.exit_code = exit_code_for(e);
      rec.diagnostics.push_back(fmt::format("{}: {}", name, e.what()));
      if (bundle.exit_code == 0) bundle.exit_code = rec.exit_code;
    }
    bundle.stages.push_back(std::move(rec));
  };

  if (run_ingest) run_stage("ingest", [&] {
      if (!selection.ingest && !uses_source(FeatureSource::spectra) && !want_mnf) {
        ingest_chemistry(ctx);
        return StageOutput{{}, {"chemistry only"}};
      }
      return stage_ingest(ctx, want_mnf);
    });
  if (run_features) run_stage("features", [&] { return stage_features(ctx); });

  const std::map<Analysis, std::function<StageOutput()>> stages{
      {Analysis::group_summary, [&] { return stage_group_summary(ctx); }},
      {Analysis::effects, [&] { return stage_effects(ctx); }},
      {Analysis::correlate, [&] { return stage_correlate(ctx); }},
      {Analysis::pca, [&] { return stage_pca(ctx); }},
      {Analysis::mnf_cluster, [&] { return stage_mnf_cluster(ctx); }},
      {Analysis::cluster_validate, [&] { return stage_cluster_validate(ctx); }},
      {Analysis::regress, [&] { return stage_regress(ctx); }},
      {Analysis::classify, [&] { return stage_classify(ctx); }},
  };
  for (Analysis a : cfg.analyses) run_stage(std::string(to_string(a)), stages.at(a));

  std::sort(bundle.artifacts.begin(), bundle.artifacts.end(),
            [](const ArtifactRecord& l, const ArtifactRecord& r) { return l.path < r.path; });

  json stages_json = json::array();
  for (const auto& s : bundle.stages)
    stages_json.push_back({{"name", s.name},
                           {"status", s.status},
                           {"exit_code", s.exit_code},
                           {"diagnostics", s.diagnostics},
                           {"artifacts", s.artifacts}});
  json artifacts_json = json::array();
  for (const auto& a : bundle.artifacts)
    artifacts_json.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  const std::string canonical = cfg.canonical_json();
  const json manifest = {{"tool", "milkspec"},
                         {"tool_version", std::string(tool_version())},
                         {"config_sha256", sha256_hex(canonical)},
                         {"seed", cfg.seed ? json(*cfg.seed) : json(nullptr)},
                         {"started_at", started},
                         {"finished_at", utc_now()},
                         {"exit_code", bundle.exit_code},
                         {"stages", stages_json},
                         {"artifacts", artifacts_json}};
  bundle.manifest_json = dump(manifest);
  text::write_file((cfg.output_dir / "manifest.json").string(), bundle.manifest_json);
  return bundle;
}

}  // namespace milkspec
