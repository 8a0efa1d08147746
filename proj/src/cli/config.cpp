#include "milkspec/cli/config.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "milkspec/error.hpp"
#include "milkspec/util/text.hpp"

namespace milkspec {

using nlohmann::json;

std::string_view to_string(Analysis a) {
  switch (a) {
    case Analysis::group_summary: return "group_summary";
    case Analysis::effects: return "effects";
    case Analysis::correlate: return "correlate";
    case Analysis::pca: return "pca";
    case Analysis::mnf_cluster: return "mnf_cluster";
    case Analysis::cluster_validate: return "cluster_validate";
    case Analysis::regress: return "regress";
    case Analysis::classify: return "classify";
  }
  return "?";
}

Analysis parse_analysis(std::string_view s) {
  std::string v = text::to_lower(text::trim(s));
  for (char& c : v)
    if (c == '-') c = '_';
  for (Analysis a : {Analysis::group_summary, Analysis::effects, Analysis::correlate, Analysis::pca,
                     Analysis::mnf_cluster, Analysis::cluster_validate, Analysis::regress, Analysis::classify})
    if (v == to_string(a)) return a;
  throw ConfigError("unknown analysis: " + std::string(s));
}

std::string_view to_string(FeatureSource s) {
  switch (s) {
    case FeatureSource::spectra: return "spectra";
    case FeatureSource::image: return "image";
    case FeatureSource::chemistry: return "chemistry";
  }
  return "?";
}

FeatureSource parse_feature_source(std::string_view s) {
  const std::string v = text::to_lower(text::trim(s));
  if (v == "spectra" || v == "hyperspectral") return FeatureSource::spectra;
  if (v == "image" || v == "rgb") return FeatureSource::image;
  if (v == "chemistry") return FeatureSource::chemistry;
  throw ConfigError("unknown feature source: " + std::string(s));
}

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!obj.is_object()) throw ConfigError(fmt::format("config: \"{}\" must be an object", where));
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(fmt::format("config: unknown key \"{}\" in \"{}\"", key, where));
  }
}

template <class T>
T get(const json& obj, std::string_view key, const T& fallback, std::string_view where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("config: bad value for \"{}\" in \"{}\"", key, where));
  }
}

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

GroupKey parse_group_key(const std::string& s) {
  if (s == "cow_group" || s == "group") return GroupKey::cow_group;
  if (s == "time") return GroupKey::time;
  throw ConfigError("config: unknown group key \"" + s + "\"");
}

GlcmPlane parse_plane(const std::string& s) {
  if (s == "luminance") return GlcmPlane::luminance;
  if (s == "average") return GlcmPlane::average;
  if (s == "channel0") return GlcmPlane::channel0;
  if (s == "channel1") return GlcmPlane::channel1;
  if (s == "channel2") return GlcmPlane::channel2;
  throw ConfigError("config: unknown glcm plane \"" + s + "\"");
}

std::string plane_name(GlcmPlane p) {
  switch (p) {
    case GlcmPlane::luminance: return "luminance";
    case GlcmPlane::average: return "average";
    case GlcmPlane::channel0: return "channel0";
    case GlcmPlane::channel1: return "channel1";
    case GlcmPlane::channel2: return "channel2";
  }
  return "?";
}

std::string regression_name(RegressionMethod m) {
  switch (m) {
    case RegressionMethod::ols: return "ols";
    case RegressionMethod::pls: return "pls";
    case RegressionMethod::lasso: return "lasso";
  }
  return "?";
}

template <class F>
auto wrap(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace

PipelineConfig parse_pipeline_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j,
             {"inputs", "roi_side", "glcm", "snv", "seed", "output_dir", "parallel", "analyses", "group_summary",
              "effects", "correlate", "pca", "mnf_cluster", "cluster_validate", "regress", "classify"},
             "root");
  PipelineConfig c;

  if (j.contains("inputs")) {
    const json& in = j["inputs"];
    check_keys(in, {"cube_dir", "patch_dir", "chemistry_csv"}, "inputs");
    c.cube_dir = resolve(get<std::string>(in, "cube_dir", "", "inputs"), base_dir);
    c.patch_dir = resolve(get<std::string>(in, "patch_dir", "", "inputs"), base_dir);
    c.chemistry_csv = resolve(get<std::string>(in, "chemistry_csv", "", "inputs"), base_dir);
  }
  const long long roi = get<long long>(j, "roi_side", 64, "root");
  if (roi < 1) throw ConfigError("config: roi_side must be positive");
  c.roi_side = static_cast<std::size_t>(roi);
  c.snv = get<bool>(j, "snv", false, "root");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", 0, "root");
  c.output_dir = resolve(get<std::string>(j, "output_dir", "milkspec_out", "root"), base_dir);
  c.exec = get<bool>(j, "parallel", true, "root") ? Exec::parallel : Exec::serial;

  if (j.contains("glcm")) {
    const json& g = j["glcm"];
    check_keys(g, {"levels", "offset", "plane"}, "glcm");
    c.glcm.levels = get<int>(g, "levels", 8, "glcm");
    if (c.glcm.levels < 2 || c.glcm.levels > 256) throw ConfigError("config: glcm levels must lie in [2, 256]");
    const auto off = get<std::vector<int>>(g, "offset", {0, 1}, "glcm");
    if (off.size() != 2 || (off[0] == 0 && off[1] == 0))
      throw ConfigError("config: glcm offset must be a non-zero [drow, dcol] pair");
    c.glcm.offset = {off[0], off[1]};
    c.glcm.plane = parse_plane(get<std::string>(g, "plane", "luminance", "glcm"));
  }

  for (const auto& a : get<std::vector<std::string>>(j, "analyses", {}, "root")) c.analyses.insert(parse_analysis(a));

  if (j.contains("group_summary")) {
    const json& s = j["group_summary"];
    check_keys(s, {"parameters", "keys"}, "group_summary");
    c.summary.parameters = get(s, "parameters", c.summary.parameters, "group_summary");
    if (s.contains("keys")) {
      c.summary.keys.clear();
      for (const auto& k : get<std::vector<std::string>>(s, "keys", {}, "group_summary"))
        c.summary.keys.push_back(parse_group_key(k));
    }
  }
  if (j.contains("effects")) {
    const json& s = j["effects"];
    check_keys(s, {"parameters"}, "effects");
    c.effects.parameters = get(s, "parameters", c.effects.parameters, "effects");
  }
  if (j.contains("correlate")) {
    const json& s = j["correlate"];
    check_keys(s, {"source", "targets", "methods", "alpha", "correction"}, "correlate");
    c.correlate.source = parse_feature_source(get<std::string>(s, "source", "spectra", "correlate"));
    c.correlate.targets = get(s, "targets", c.correlate.targets, "correlate");
    if (s.contains("methods")) {
      c.correlate.methods.clear();
      for (const auto& m : get<std::vector<std::string>>(s, "methods", {}, "correlate"))
        c.correlate.methods.push_back(parse_correlation_method(m));
    }
    c.correlate.alpha = get<double>(s, "alpha", 0.05, "correlate");
    if (!(c.correlate.alpha > 0.0 && c.correlate.alpha < 1.0)) throw ConfigError("config: alpha must lie in (0, 1)");
    c.correlate.correction = parse_p_correction(get<std::string>(s, "correction", "none", "correlate"));
  }
  if (j.contains("pca")) {
    const json& s = j["pca"];
    check_keys(s, {"source", "columns", "n_components", "label", "standardize"}, "pca");
    c.pca.source = parse_feature_source(get<std::string>(s, "source", "chemistry", "pca"));
    c.pca.columns = get(s, "columns", c.pca.columns, "pca");
    c.pca.n_components = get<std::size_t>(s, "n_components", 2, "pca");
    c.pca.label = get<std::string>(s, "label", "cow_group", "pca");
    c.pca.standardize = get<bool>(s, "standardize", false, "pca");
  }
  if (j.contains("mnf_cluster")) {
    const json& s = j["mnf_cluster"];
    check_keys(s, {"mnf_components", "pca_components", "k", "auxiliary", "noise_shift"}, "mnf_cluster");
    c.mnf_cluster.mnf_components = get<std::size_t>(s, "mnf_components", 10, "mnf_cluster");
    c.mnf_cluster.pca_components = get<std::size_t>(s, "pca_components", 2, "mnf_cluster");
    c.mnf_cluster.k = get<std::size_t>(s, "k", 3, "mnf_cluster");
    c.mnf_cluster.auxiliary = get<std::string>(s, "auxiliary", "polyphenols", "mnf_cluster");
    const auto shift = get<std::string>(s, "noise_shift", "horizontal", "mnf_cluster");
    if (shift == "horizontal") c.mnf_cluster.shift = NoiseShift::horizontal;
    else if (shift == "vertical") c.mnf_cluster.shift = NoiseShift::vertical;
    else throw ConfigError("config: noise_shift must be horizontal or vertical");
  }
  if (j.contains("cluster_validate")) {
    const json& s = j["cluster_validate"];
    check_keys(s, {"auxiliary"}, "cluster_validate");
    c.cluster_validate.auxiliary = get(s, "auxiliary", c.cluster_validate.auxiliary, "cluster_validate");
  }
  if (j.contains("regress")) {
    const json& s = j["regress"];
    check_keys(s, {"source", "target", "features", "method", "lambda", "n_components", "alpha"}, "regress");
    c.regress.source = parse_feature_source(get<std::string>(s, "source", "image", "regress"));
    c.regress.target = get<std::string>(s, "target", "polyphenols", "regress");
    c.regress.features = get(s, "features", c.regress.features, "regress");
    const auto m = get<std::string>(s, "method", "ols", "regress");
    if (m == "ols") c.regress.method = RegressionMethod::ols;
    else if (m == "pls") c.regress.method = RegressionMethod::pls;
    else if (m == "lasso") c.regress.method = RegressionMethod::lasso;
    else throw ConfigError("config: regress method must be ols, pls or lasso");
    c.regress.lambda = get<double>(s, "lambda", 0.1, "regress");
    c.regress.n_components = get<std::size_t>(s, "n_components", 2, "regress");
    c.regress.alpha = get<double>(s, "alpha", 0.05, "regress");
    if (!(c.regress.alpha > 0.0 && c.regress.alpha < 1.0)) throw ConfigError("config: alpha must lie in (0, 1)");
    if (c.regress.lambda < 0.0) throw ConfigError("config: lambda must be non-negative");
  }
  if (j.contains("classify")) {
    const json& s = j["classify"];
    check_keys(s, {"source", "target", "features", "discretize", "model", "train_fraction", "grid", "folds"},
               "classify");
    c.classify.source = parse_feature_source(get<std::string>(s, "source", "image", "classify"));
    c.classify.target = get<std::string>(s, "target", "time", "classify");
    c.classify.features = get(s, "features", c.classify.features, "classify");
    if (s.contains("discretize")) {
      const json& d = s["discretize"];
      check_keys(d, {"scheme", "classes"}, "classify.discretize");
      const auto scheme = get<std::string>(d, "scheme", "median_split", "classify.discretize");
      if (scheme == "median_split") c.classify.discretize = DiscretizeScheme::median_split();
      else if (scheme == "quantile")
        c.classify.discretize = DiscretizeScheme::quantile(get<int>(d, "classes", 3, "classify.discretize"));
      else throw ConfigError("config: discretize scheme must be median_split or quantile");
    }
    if (s.contains("model")) c.classify.model = parse_model_spec(s["model"].dump());
    c.classify.train_fraction = get<double>(s, "train_fraction", 0.8, "classify");
    if (!(c.classify.train_fraction > 0.0 && c.classify.train_fraction < 1.0))
      throw ConfigError("config: train_fraction must lie in (0, 1)");
    c.classify.folds = get<std::size_t>(s, "folds", 5, "classify");
    if (s.contains("grid")) {
      const json& g = s["grid"];
      if (!g.is_object()) throw ConfigError("config: classify.grid must map parameter names to value lists");
      for (const auto& [name, values] : g.items()) {
        GridAxis axis{name, {}};
        try {
          axis.values = values.get<std::vector<double>>();
        } catch (const json::exception&) {
          throw ConfigError("config: grid values for \"" + name + "\" must be numbers");
        }
        if (axis.values.empty()) throw ConfigError("config: grid axis \"" + name + "\" is empty");
        ModelSpec probe = c.classify.model;
        set_model_param(probe, name, axis.values.front());
        c.classify.grid.push_back(std::move(axis));
      }
    }
  }
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = text::read_file(path.string());
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_pipeline_config(text, path.parent_path());
}

void validate_pipeline_config(const PipelineConfig& c) {
  auto need_dir = [](const std::filesystem::path& p, const char* what) {
    if (p.empty()) throw ConfigError(fmt::format("config: inputs.{} is required by the selected analyses", what));
    if (!std::filesystem::is_directory(p)) throw ConfigError(fmt::format("config: {} not found: {}", what, p.string()));
  };
  auto uses = [&](Analysis a) { return c.analyses.count(a) > 0; };
  auto uses_source = [&](FeatureSource s) {
    return (uses(Analysis::correlate) && c.correlate.source == s) || (uses(Analysis::pca) && c.pca.source == s) ||
           (uses(Analysis::regress) && c.regress.source == s) || (uses(Analysis::classify) && c.classify.source == s);
  };
  if (c.chemistry_csv.empty()) throw ConfigError("config: inputs.chemistry_csv is required");
  if (!std::filesystem::is_regular_file(c.chemistry_csv))
    throw ConfigError("config: chemistry_csv not found: " + c.chemistry_csv.string());
  if (uses_source(FeatureSource::spectra) || uses(Analysis::mnf_cluster) || uses(Analysis::cluster_validate))
    need_dir(c.cube_dir, "cube_dir");
  if (uses_source(FeatureSource::image)) need_dir(c.patch_dir, "patch_dir");
  if (!c.cube_dir.empty() && !std::filesystem::is_directory(c.cube_dir))
    throw ConfigError("config: cube_dir not found: " + c.cube_dir.string());
  if (!c.patch_dir.empty() && !std::filesystem::is_directory(c.patch_dir))
    throw ConfigError("config: patch_dir not found: " + c.patch_dir.string());
  if ((uses(Analysis::classify) || uses(Analysis::mnf_cluster) || uses(Analysis::cluster_validate)) && !c.seed)
    throw ConfigError("config: a seed is required for classification and clustering");
  if (uses(Analysis::classify) && !c.classify.grid.empty() && c.classify.folds < 2)
    throw ConfigError("config: grid search needs at least 2 folds");
  if (uses(Analysis::mnf_cluster) || uses(Analysis::cluster_validate)) {
    if (c.mnf_cluster.k < 2) throw ConfigError("config: mnf_cluster.k must be at least 2");
    if (c.mnf_cluster.mnf_components < 1 || c.mnf_cluster.pca_components < 1)
      throw ConfigError("config: mnf_cluster component counts must be positive");
  }
}

std::string PipelineConfig::canonical_json() const {
  json j;
  j["inputs"] = {{"cube_dir", cube_dir.generic_string()},
                 {"patch_dir", patch_dir.generic_string()},
                 {"chemistry_csv", chemistry_csv.generic_string()}};
  j["roi_side"] = roi_side;
  j["glcm"] = {{"levels", glcm.levels}, {"offset", {glcm.offset.drow, glcm.offset.dcol}}, {"plane", plane_name(glcm.plane)}};
  j["snv"] = snv;
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["parallel"] = exec == Exec::parallel;
  json an = json::array();
  for (Analysis a : analyses) an.push_back(std::string(to_string(a)));
  j["analyses"] = an;
  json keys = json::array();
  for (GroupKey k : summary.keys) keys.push_back(k == GroupKey::cow_group ? "cow_group" : "time");
  j["group_summary"] = {{"parameters", summary.parameters}, {"keys", keys}};
  j["effects"] = {{"parameters", effects.parameters}};
  json methods = json::array();
  for (auto m : correlate.methods) methods.push_back(to_string(m));
  j["correlate"] = {{"source", std::string(to_string(correlate.source))},
                    {"targets", correlate.targets},
                    {"methods", methods},
                    {"alpha", correlate.alpha},
                    {"correction", to_string(correlate.correction)}};
  j["pca"] = {{"source", std::string(to_string(pca.source))},
              {"columns", pca.columns},
              {"n_components", pca.n_components},
              {"label", pca.label},
              {"standardize", pca.standardize}};
  j["mnf_cluster"] = {{"mnf_components", mnf_cluster.mnf_components},
                      {"pca_components", mnf_cluster.pca_components},
                      {"k", mnf_cluster.k},
                      {"auxiliary", mnf_cluster.auxiliary},
                      {"noise_shift", mnf_cluster.shift == NoiseShift::horizontal ? "horizontal" : "vertical"}};
  j["cluster_validate"] = {{"auxiliary", cluster_validate.auxiliary}};
  j["regress"] = {{"source", std::string(to_string(regress.source))},
                  {"target", regress.target},
                  {"features", regress.features},
                  {"method", regression_name(regress.method)},
                  {"lambda", regress.lambda},
                  {"n_components", regress.n_components},
                  {"alpha", regress.alpha}};
  json grid = json::object();
  for (const auto& a : classify.grid) grid[a.name] = a.values;
  json disc = nullptr;
  if (classify.discretize) {
    disc = {{"scheme", classify.discretize->kind == DiscretizeScheme::Kind::median_split ? "median_split" : "quantile"},
            {"classes", classify.discretize->classes}};
  }
  j["classify"] = {{"source", std::string(to_string(classify.source))},
                   {"target", classify.target},
                   {"features", classify.features},
                   {"discretize", disc},
                   {"model", json::parse(model_spec_to_json(classify.model))},
                   {"train_fraction", classify.train_fraction},
                   {"grid", grid},
                   {"folds", classify.folds}};
  return j.dump(2);
}

}  // namespace milkspec
