#pragma once

#include <span>
#include <vector>

namespace milkspec {

struct QqPoint {
  double theoretical = 0.0;
  double sample = 0.0;
};

/// Standardizes (sample sd) and sorts the residuals and pairs the i-th
/// value with Φ⁻¹((i − 0.5)/n). Throws std::invalid_argument for n < 2 and
/// DegenerateError for zero variance.
std::vector<QqPoint> qq_points(std::span<const double> residuals);

}  // namespace milkspec
