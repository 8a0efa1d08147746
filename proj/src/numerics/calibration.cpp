#include "milkspec/numerics/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "milkspec/core/matrix.hpp"
#include "milkspec/error.hpp"

namespace milkspec {

CalibrationModel calibration_fit(std::span<const double> conc, std::span<const double> absorb) {
  if (conc.size() != absorb.size()) throw std::invalid_argument("calibration_fit: length mismatch");
  for (std::size_t i = 0; i < conc.size(); ++i)
    if (!std::isfinite(conc[i]) || !std::isfinite(absorb[i]))
      throw std::invalid_argument("calibration_fit: non-finite value");
  if (std::set<double>(conc.begin(), conc.end()).size() < 2)
    throw DegenerateError("calibration_fit: need at least 2 distinct standards");

  const double mx = mean(conc), my = mean(absorb);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < conc.size(); ++i) {
    sxx += (conc[i] - mx) * (conc[i] - mx);
    sxy += (conc[i] - mx) * (absorb[i] - my);
    syy += (absorb[i] - my) * (absorb[i] - my);
  }
  CalibrationModel m;
  m.slope = sxy / sxx;
  if (m.slope == 0.0) throw DegenerateError("calibration_fit: zero slope");
  m.intercept = my - m.slope * mx;
  m.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  const auto [lo, hi] = std::minmax_element(conc.begin(), conc.end());
  m.domain_min = *lo;
  m.domain_max = *hi;
  return m;
}

InversePrediction inverse_predict(const CalibrationModel& model, double absorbance) {
  if (model.slope == 0.0) throw DegenerateError("inverse_predict: zero slope");
  InversePrediction p;
  p.concentration = (absorbance - model.intercept) / model.slope;
  p.extrapolated = p.concentration < model.domain_min || p.concentration > model.domain_max;
  p.negative = p.concentration < 0.0;
  return p;
}

}  // namespace milkspec
