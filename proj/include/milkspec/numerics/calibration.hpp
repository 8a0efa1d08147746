#pragma once

#include <span>

namespace milkspec {

/// Declared FRAP standard range (ferrous sulfate, µM).
inline constexpr double kFrapStandardMin = 31.25;
inline constexpr double kFrapStandardMax = 2000.0;

struct CalibrationModel {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double domain_min = 0.0;  // lowest standard concentration
  double domain_max = 0.0;  // highest standard concentration
};

/// Least-squares line absorbance = slope·concentration + intercept. Throws
/// DegenerateError for fewer than 2 distinct standards or a zero slope.
CalibrationModel calibration_fit(std::span<const double> concentrations, std::span<const double> absorbances);

struct InversePrediction {
  double concentration = 0.0;
  bool extrapolated = false;  // outside [domain_min, domain_max]
  bool negative = false;
};

InversePrediction inverse_predict(const CalibrationModel& model, double absorbance);

}  // namespace milkspec
