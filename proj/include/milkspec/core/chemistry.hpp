#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace milkspec {

/// Study groups: teat sealant only, sealant + antibiotic, sealant + Aloe.
enum class CowGroup { SIG = 0, CTR = 1, ASIG = 2 };
/// Sampling times: before dry-off and after calving.
enum class SamplingTime { T0 = 0, T12 = 1 };

std::string_view to_string(CowGroup g);
std::string_view to_string(SamplingTime t);
/// Accepts "0"/"1"/"2" or "SIG"/"CTR"/"ASIG" (case-insensitive).
CowGroup parse_cow_group(std::string_view token);
/// Accepts "T0"/"T12" (case-insensitive).
SamplingTime parse_sampling_time(std::string_view token);

/// Fatty-acid nomenclature accepted as chemistry columns (Cx:y with
/// position/branch suffixes, plus the class aggregates).
const std::vector<std::string>& fatty_acid_vocabulary();
bool is_known_fatty_acid(std::string_view name);

/// Wet-lab targets for one milk sample. Empty CSV cells are held as
/// std::nullopt (the missing-value mask).
struct ChemistryPanel {
  std::string sample_id;
  CowGroup group = CowGroup::SIG;
  SamplingTime time = SamplingTime::T0;
  std::optional<double> polyphenols;  // mg GAE/mL
  std::optional<double> frap;         // mg Fe2+/mL
  std::map<std::string, std::optional<double>> fatty_acids;  // % of total FA

  /// Looks up "polyphenols", "frap", a fatty-acid name, or the categorical
  /// codes "cow_group" / "time". Unknown names return std::nullopt.
  std::optional<double> value(std::string_view name) const;
};

/// Parses the chemistry CSV. The header must name sample_id, group, time,
/// polyphenols and frap; every other column must be a known fatty acid.
/// Throws FormatError for malformed structure and DataError for unknown
/// group/time tokens, negative concentrations, or duplicate sample ids.
std::vector<ChemistryPanel> parse_chemistry_table(std::string_view csv);

/// Renders panels back to CSV with the same column conventions.
std::string format_chemistry_table(std::span<const ChemistryPanel> panels);

}  // namespace milkspec
