#include "milkspec/core/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "milkspec/error.hpp"
#include "milkspec/util/text.hpp"

namespace milkspec {

namespace {
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
}

std::string format_feature_csv(const FeatureTable& table) {
  std::ostringstream out;
  out << "sample_id";
  for (const auto& n : table.names) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < table.sample_ids.size(); ++r) {
    out << table.sample_ids[r];
    for (double v : table.values.row(r)) out << ',' << text::format_double(v);
    out << '\n';
  }
  return out.str();
}

FeatureTable parse_feature_csv(std::string_view csv) {
  std::vector<std::string_view> lines;
  for (auto line : text::split(csv, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!text::trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw FormatError("feature table is empty");
  FeatureTable t;
  const auto header = text::split(lines.front(), ',');
  for (std::size_t i = 1; i < header.size(); ++i) t.names.emplace_back(text::trim(header[i]));
  t.values = Matrix(lines.size() - 1, t.names.size());
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto cells = text::split(lines[li], ',');
    if (cells.size() != header.size())
      throw FormatError("feature row " + std::to_string(li + 1) + " has the wrong cell count");
    t.sample_ids.emplace_back(text::trim(cells[0]));
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto v = text::parse_double(cells[c]);
      if (!v) throw FormatError("non-numeric feature in row " + std::to_string(li + 1));
      t.values(li - 1, c - 1) = *v;
    }
  }
  return t;
}

Dataset::Dataset(Matrix features, std::vector<std::string> feature_names, std::vector<RowMeta> rows,
                 std::vector<TargetColumn> targets)
    : features_(std::move(features)),
      feature_names_(std::move(feature_names)),
      rows_(std::move(rows)),
      targets_(std::move(targets)) {
  if (!feature_names_.empty() && features_.rows() != rows_.size())
    throw DataError("feature matrix row count differs from metadata row count");
  if (features_.cols() != feature_names_.size())
    throw DataError("feature matrix column count differs from feature name count");
  std::set<std::string> names(feature_names_.begin(), feature_names_.end());
  if (names.size() != feature_names_.size()) throw DataError("duplicate feature name");
  std::set<std::string> tnames;
  for (const auto& t : targets_) {
    if (t.values.size() != rows_.size()) throw DataError("target '" + t.name + "' has the wrong length");
    if (!tnames.insert(t.name).second) throw DataError("duplicate target '" + t.name + "'");
  }
  if (feature_names_.empty()) features_ = Matrix(rows_.size(), 0);
}

const TargetColumn& Dataset::target(std::string_view name) const {
  for (const auto& t : targets_)
    if (t.name == name) return t;
  throw DataError("dataset has no target '" + std::string(name) + "'");
}

std::optional<std::size_t> Dataset::feature_index(std::string_view name) const {
  for (std::size_t i = 0; i < feature_names_.size(); ++i)
    if (feature_names_[i] == name) return i;
  return std::nullopt;
}

Matrix Dataset::feature_columns(std::span<const std::string> names) const {
  std::vector<std::size_t> idx;
  for (const auto& n : names) {
    const auto i = feature_index(n);
    if (!i) throw DataError("dataset has no feature '" + n + "'");
    idx.push_back(*i);
  }
  return features_.select_cols(idx);
}

Dataset Dataset::subset(std::span<const std::size_t> idx) const {
  std::vector<RowMeta> rows;
  for (auto i : idx) rows.push_back(rows_.at(i));
  std::vector<TargetColumn> targets;
  for (const auto& t : targets_) {
    TargetColumn c{t.name, {}};
    for (auto i : idx) c.values.push_back(t.values[i]);
    targets.push_back(std::move(c));
  }
  return Dataset(features_.select_rows(idx), feature_names_, std::move(rows), std::move(targets));
}

namespace {

std::vector<TargetColumn> materialize(std::span<const ChemistryPanel* const> panels,
                                      std::span<const std::string> target_spec) {
  std::vector<TargetColumn> out;
  for (const auto& name : target_spec) {
    const bool known = name == "polyphenols" || name == "frap" || name == "cow_group" ||
                       name == "time" || is_known_fatty_acid(name);
    if (!known) throw DataError("unknown target column '" + name + "'");
    TargetColumn col{name, {}};
    col.values.reserve(panels.size());
    for (const auto* p : panels) col.values.push_back(p->value(name).value_or(kMissing));
    out.push_back(std::move(col));
  }
  return out;
}

}  // namespace

Dataset build_dataset(const FeatureTable& features, std::span<const ChemistryPanel> panels,
                      std::span<const std::string> target_spec) {
  if (features.values.rows() != features.sample_ids.size() ||
      features.values.cols() != features.names.size())
    throw DataError("feature table shape is inconsistent");

  std::unordered_map<std::string, const ChemistryPanel*> by_id;
  for (const auto& p : panels)
    if (!by_id.emplace(p.sample_id, &p).second)
      throw DataError("duplicate join key '" + p.sample_id + "' in chemistry panels");

  std::set<std::string> seen;
  std::vector<const ChemistryPanel*> matched;
  std::vector<RowMeta> rows;
  for (const auto& id : features.sample_ids) {
    if (!seen.insert(id).second) throw DataError("duplicate join key '" + id + "' in feature rows");
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("feature row '" + id + "' has no chemistry panel");
    matched.push_back(it->second);
    rows.push_back(RowMeta{id, it->second->group, it->second->time});
  }
  return Dataset(features.values, features.names, std::move(rows), materialize(matched, target_spec));
}

Dataset chemistry_dataset(std::span<const ChemistryPanel> panels,
                          std::span<const std::string> target_spec) {
  std::vector<const ChemistryPanel*> ptrs;
  std::vector<RowMeta> rows;
  for (const auto& p : panels) {
    ptrs.push_back(&p);
    rows.push_back(RowMeta{p.sample_id, p.group, p.time});
  }
  return Dataset(Matrix(panels.size(), 0), {}, std::move(rows), materialize(ptrs, target_spec));
}

double empirical_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile: empty input");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

std::vector<int> discretize_target(std::span<const double> values, const DiscretizeScheme& scheme) {
  for (double v : values)
    if (std::isnan(v)) throw std::invalid_argument("discretize_target: missing value in input");
  const int k = scheme.kind == DiscretizeScheme::Kind::median_split ? 2 : scheme.classes;
  if (k < 2) throw std::invalid_argument("discretize_target: need at least 2 classes");
  if (values.empty() || std::all_of(values.begin(), values.end(), [&](double v) { return v == values[0]; }))
    throw DegenerateError("cannot discretize a target whose values are all identical");

  std::vector<double> edges;
  for (int j = 1; j < k; ++j) edges.push_back(empirical_quantile(values, static_cast<double>(j) / k));
  std::vector<int> labels;
  labels.reserve(values.size());
  for (double v : values) {
    int label = 0;
    for (double e : edges)
      if (v > e) ++label;
    labels.push_back(label);
  }
  return labels;
}

}  // namespace milkspec
