#pragma once

#include <span>
#include <string>
#include <vector>

namespace milkspec {

struct AnovaOneWay {
  double f = 0.0;
  double p_value = 1.0;
  int df_between = 0;
  int df_within = 0;
  double ss_between = 0.0;
  double ss_within = 0.0;
  /// Set when the within-group mean square is zero.
  bool degenerate = false;
};

/// Throws std::invalid_argument for fewer than 2 groups or a group with
/// fewer than 2 values.
AnovaOneWay anova_oneway(const std::vector<std::vector<double>>& groups);

struct AnovaEffect {
  std::string name;
  int df = 0;
  double ss = 0.0;
  double ms = 0.0;
  double f = 0.0;
  double p_value = 1.0;
};

struct AnovaTwoWay {
  AnovaEffect a;
  AnovaEffect b;
  AnovaEffect interaction;  // df = 0 when not requested
  int df_residual = 0;
  double ss_residual = 0.0;
  double ms_residual = 0.0;
  bool balanced = false;
  bool degenerate = false;
};

/// Sequential (Type I) sums of squares in the order A, B, A×B. Throws
/// DataError when a cell is empty and the interaction is requested, and
/// DegenerateError when no residual degrees of freedom remain.
AnovaTwoWay anova_twoway(std::span<const double> values, std::span<const std::string> factor_a,
                         std::span<const std::string> factor_b, bool interaction = true);

/// One parameter row of the factor p-value table.
struct EffectPRow {
  std::string parameter;
  AnovaTwoWay result;  // factor A is time, factor B is group
};

/// "Parameter TIME_p GROUP_p INT_p" table; time p-values in scientific
/// notation, the others fixed with six decimals.
std::string format_effect_p_table(const std::vector<EffectPRow>& rows);

}  // namespace milkspec
