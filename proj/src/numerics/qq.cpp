#include "milkspec/numerics/qq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "milkspec/core/matrix.hpp"
#include "milkspec/error.hpp"
#include "milkspec/numerics/distributions.hpp"

namespace milkspec {

std::vector<QqPoint> qq_points(std::span<const double> residuals) {
  const std::size_t n = residuals.size();
  if (n < 2) throw std::invalid_argument("qq_points: need at least 2 residuals");
  const double m = mean(residuals);
  const double sd = std::sqrt(sample_variance(residuals));
  if (!(sd > 0.0)) throw DegenerateError("qq_points: residuals have zero variance");
  std::vector<double> z(residuals.begin(), residuals.end());
  for (double& v : z) v = (v - m) / sd;
  std::sort(z.begin(), z.end());
  std::vector<QqPoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out[i] = {dist::normal_quantile(p), z[i]};
  }
  return out;
}

}  // namespace milkspec
