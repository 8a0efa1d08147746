#include "milkspec/core/chemistry.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "milkspec/error.hpp"
#include "milkspec/util/text.hpp"

namespace milkspec {

std::string_view to_string(CowGroup g) {
  switch (g) {
    case CowGroup::SIG: return "SIG";
    case CowGroup::CTR: return "CTR";
    case CowGroup::ASIG: break;
  }
  return "ASIG";
}

std::string_view to_string(SamplingTime t) { return t == SamplingTime::T0 ? "T0" : "T12"; }

CowGroup parse_cow_group(std::string_view token) {
  const std::string t = text::to_lower(text::trim(token));
  if (t == "0" || t == "sig") return CowGroup::SIG;
  if (t == "1" || t == "ctr") return CowGroup::CTR;
  if (t == "2" || t == "asig") return CowGroup::ASIG;
  throw DataError("unknown cow group '" + std::string(token) + "'");
}

SamplingTime parse_sampling_time(std::string_view token) {
  const std::string t = text::to_lower(text::trim(token));
  if (t == "t0") return SamplingTime::T0;
  if (t == "t12") return SamplingTime::T12;
  throw DataError("unknown sampling time '" + std::string(token) + "'");
}

const std::vector<std::string>& fatty_acid_vocabulary() {
  static const std::vector<std::string> vocab = {
      "C4:0",      "C6:0",       "C8:0",        "C10:0",      "C10:1c9",     "C11:0",
      "C12:0",     "C13:0iso",   "C13:0ante",   "C12:1c11",   "C13:0",       "C14:0iso",
      "C14:0",     "C15:0iso",   "C15:0ante",   "C14:1c9",    "C15:0",       "C16:0iso",
      "C16:0",     "C17:0iso",   "C16:1c7",     "C16:1c9",    "C17:0ante",   "C17:0",
      "C17:1c9",   "C18:0",      "C18:1t6-8",   "C18:1t9",    "C18:1t10",    "C18:1t11",
      "C18:1t12",  "C18:1c9",    "C18:1c11",    "C18:1c12",   "C18:1c13",    "C18:1t16",
      "C18:2t9t12", "C18:2t9c13", "C18:2t8c12", "C18:2t11c15", "C18:2n-6",   "C20:0",
      "C18:3n3",   "C18:2c9t11", "C21:0",       "C20:2n6",    "C22:0",       "C20:3n6",
      "C20:3n3",   "C20:4n6",    "C20:5n3",     "C24:0",      "C22:5n3",     "FA_SAT",
      "FA_MONO",   "FA_POLY",    "OMEGA6",      "OMEGA3",     "OMEGA6_3"};
  return vocab;
}

bool is_known_fatty_acid(std::string_view name) {
  const auto& v = fatty_acid_vocabulary();
  return std::find(v.begin(), v.end(), name) != v.end();
}

std::optional<double> ChemistryPanel::value(std::string_view name) const {
  if (name == "polyphenols") return polyphenols;
  if (name == "frap") return frap;
  if (name == "cow_group") return static_cast<double>(group);
  if (name == "time") return static_cast<double>(time);
  const auto it = fatty_acids.find(std::string(name));
  if (it == fatty_acids.end()) return std::nullopt;
  return it->second;
}

namespace {

enum class Column { id, group, time, polyphenols, frap, fatty_acid };

Column classify_column(std::string_view name) {
  const std::string n = text::to_lower(name);
  if (n == "sample_id" || n == "id" || n == "sample") return Column::id;
  if (n == "group" || n == "cow_group") return Column::group;
  if (n == "time") return Column::time;
  if (n == "polyphenols") return Column::polyphenols;
  if (n == "frap") return Column::frap;
  if (is_known_fatty_acid(name)) return Column::fatty_acid;
  throw FormatError("unknown chemistry column '" + std::string(name) + "'");
}

std::optional<double> concentration(std::string_view cell, std::string_view column,
                                    std::string_view sample_id) {
  if (text::trim(cell).empty()) return std::nullopt;
  const auto v = text::parse_double(cell);
  if (!v) throw FormatError("non-numeric " + std::string(column) + " for sample " + std::string(sample_id));
  if (*v < 0.0)
    throw DataError("negative " + std::string(column) + " for sample " + std::string(sample_id));
  return v;
}

}  // namespace

std::vector<ChemistryPanel> parse_chemistry_table(std::string_view csv) {
  std::vector<std::string_view> lines;
  for (auto line : text::split(csv, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!text::trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) throw FormatError("chemistry table is empty");
  std::string_view header_line = lines.front();
  if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);

  std::vector<std::string> names;
  std::vector<Column> kinds;
  for (auto cell : text::split(header_line, ',')) {
    names.emplace_back(text::trim(cell));
    kinds.push_back(classify_column(names.back()));
  }
  for (Column required : {Column::id, Column::group, Column::time, Column::polyphenols, Column::frap})
    if (std::count(kinds.begin(), kinds.end(), required) != 1)
      throw FormatError("chemistry header must name sample_id, group, time, polyphenols and frap exactly once");

  std::vector<ChemistryPanel> panels;
  std::set<std::string> seen;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto cells = text::split(lines[li], ',');
    if (cells.size() != names.size())
      throw FormatError("row " + std::to_string(li + 1) + " has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(names.size()));
    ChemistryPanel p;
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (kinds[c] == Column::id) p.sample_id = std::string(text::trim(cells[c]));
    if (p.sample_id.empty()) throw FormatError("row " + std::to_string(li + 1) + " has an empty sample_id");
    if (!seen.insert(p.sample_id).second) throw DataError("duplicate sample_id '" + p.sample_id + "'");

    for (std::size_t c = 0; c < cells.size(); ++c) {
      switch (kinds[c]) {
        case Column::id: break;
        case Column::group: p.group = parse_cow_group(cells[c]); break;
        case Column::time: p.time = parse_sampling_time(cells[c]); break;
        case Column::polyphenols: p.polyphenols = concentration(cells[c], names[c], p.sample_id); break;
        case Column::frap: p.frap = concentration(cells[c], names[c], p.sample_id); break;
        case Column::fatty_acid:
          p.fatty_acids[names[c]] = concentration(cells[c], names[c], p.sample_id);
          break;
      }
    }
    panels.push_back(std::move(p));
  }
  return panels;
}

std::string format_chemistry_table(std::span<const ChemistryPanel> panels) {
  std::vector<std::string> fa_names;
  for (const auto& name : fatty_acid_vocabulary())
    for (const auto& p : panels)
      if (p.fatty_acids.contains(name)) {
        fa_names.push_back(name);
        break;
      }
  auto cell = [](const std::optional<double>& v) { return v ? text::format_double(*v) : std::string(); };

  std::ostringstream out;
  out << "sample_id,group,time,polyphenols,frap";
  for (const auto& n : fa_names) out << ',' << n;
  out << '\n';
  for (const auto& p : panels) {
    out << p.sample_id << ',' << static_cast<int>(p.group) << ',' << to_string(p.time) << ','
        << cell(p.polyphenols) << ',' << cell(p.frap);
    for (const auto& n : fa_names) {
      const auto it = p.fatty_acids.find(n);
      out << ',' << (it == p.fatty_acids.end() ? std::string() : cell(it->second));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace milkspec
