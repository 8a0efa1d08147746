#include "milkspec/core/summary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "milkspec/error.hpp"
#include "milkspec/util/text.hpp"

namespace milkspec {

std::string SummaryCell::render() const {
  if (!sd) return fmt::format("{:.2f} ± n/a", mean);
  return fmt::format("{:.2f} ± {:.2f}", mean, *sd);
}

namespace {

struct CellKey {
  int group = -1;
  int time = -1;
  auto operator<=>(const CellKey&) const = default;
};

std::string label(const CellKey& k) {
  std::string out;
  if (k.group >= 0)
    out = fmt::format("{} = {}", to_string(static_cast<CowGroup>(k.group)), k.group);
  if (k.time >= 0) {
    const auto t = to_string(static_cast<SamplingTime>(k.time));
    out = out.empty() ? std::string(t) : fmt::format("{} {}", to_string(static_cast<CowGroup>(k.group)), t);
  }
  return out.empty() ? "all" : out;
}

}  // namespace

GroupSummary group_summary(const Dataset& dataset, std::span<const GroupKey> keys) {
  if (dataset.size() == 0) throw DataError("group_summary: dataset is empty");
  const bool by_group = std::find(keys.begin(), keys.end(), GroupKey::cow_group) != keys.end();
  const bool by_time = std::find(keys.begin(), keys.end(), GroupKey::time) != keys.end();

  std::map<CellKey, std::vector<std::size_t>> members;
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    const auto& m = dataset.rows()[r];
    members[CellKey{by_group ? static_cast<int>(m.group) : -1, by_time ? static_cast<int>(m.time) : -1}]
        .push_back(r);
  }

  GroupSummary out;
  out.keys.assign(keys.begin(), keys.end());
  for (const auto& [key, rows] : members) out.column_labels.push_back(label(key));

  for (const auto& target : dataset.targets()) {
    out.parameters.push_back(target.name);
    std::vector<SummaryCell> row;
    for (const auto& [key, rows] : members) {
      std::vector<double> vals;
      for (auto r : rows)
        if (!std::isnan(target.values[r])) vals.push_back(target.values[r]);
      if (vals.empty())
        throw DataError("group_summary: no values for '" + target.name + "' in group " + label(key));
      SummaryCell cell;
      if (key.group >= 0) cell.group = static_cast<CowGroup>(key.group);
      if (key.time >= 0) cell.time = static_cast<SamplingTime>(key.time);
      cell.parameter = target.name;
      cell.n = vals.size();
      cell.mean = mean(vals);
      if (vals.size() > 1) {
        cell.sd = std::sqrt(sample_variance(vals));
        if (cell.mean != 0.0) cell.cv = *cell.sd / cell.mean;
      }
      row.push_back(std::move(cell));
    }
    out.cells.push_back(std::move(row));
  }
  return out;
}

std::string GroupSummary::render_table() const {
  std::size_t name_w = std::string("Parameter").size();
  for (const auto& p : parameters) name_w = std::max(name_w, p.size());
  std::size_t col_w = 14;
  for (const auto& l : column_labels) col_w = std::max(col_w, l.size() + 2);

  std::ostringstream out;
  out << fmt::format("{:<{}}", "Parameter", name_w);
  for (const auto& l : column_labels) out << fmt::format("{:>{}}", l, col_w);
  out << '\n';
  for (std::size_t p = 0; p < parameters.size(); ++p) {
    out << fmt::format("{:<{}}", parameters[p], name_w);
    for (const auto& c : cells[p]) {
      // "±" is two bytes in UTF-8 but one column wide.
      const std::string s = c.render();
      out << std::string(col_w > s.size() - 1 ? col_w - (s.size() - 1) : 0, ' ') << s;
    }
    out << '\n';
  }
  return out.str();
}

std::string GroupSummary::render_csv() const {
  std::ostringstream out;
  out << "parameter,group,time,n,mean,sd,cv\n";
  for (std::size_t p = 0; p < parameters.size(); ++p)
    for (const auto& c : cells[p]) {
      out << c.parameter << ',' << (c.group ? std::string(to_string(*c.group)) : "") << ','
          << (c.time ? std::string(to_string(*c.time)) : "") << ',' << c.n << ','
          << text::format_double(c.mean) << ',' << (c.sd ? text::format_double(*c.sd) : "") << ','
          << (c.cv ? text::format_double(*c.cv) : "") << '\n';
    }
  return out.str();
}

}  // namespace milkspec
