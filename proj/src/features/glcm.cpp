#include "milkspec/features/glcm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "milkspec/error.hpp"
#include "milkspec/kernels/glcm_counts.hpp"

namespace milkspec {

LevelPlane quantize(std::span<const double> intensities, std::size_t width, std::size_t height,
                    int levels) {
  if (levels < 2) throw std::invalid_argument("GLCM needs at least 2 levels");
  if (intensities.size() != width * height) throw std::invalid_argument("quantize: plane size mismatch");
  LevelPlane out{width, height, levels, std::vector<std::uint16_t>(intensities.size())};
  for (std::size_t i = 0; i < intensities.size(); ++i) {
    const double v = std::clamp(intensities[i], 0.0, 255.0);
    const auto bin = static_cast<int>(std::floor(v * levels / 256.0));
    out.data[i] = static_cast<std::uint16_t>(std::min(bin, levels - 1));
  }
  return out;
}

Glcm::Glcm(int levels, std::vector<double> p) : levels_(levels), p_(std::move(p)) {
  if (levels_ < 2 || p_.size() != static_cast<std::size_t>(levels_ * levels_))
    throw std::invalid_argument("Glcm: matrix must be levels × levels with levels ≥ 2");
}

Glcm compute_glcm(const LevelPlane& plane, GlcmOffset offset, Exec exec) {
  if (offset.drow == 0 && offset.dcol == 0) throw std::invalid_argument("GLCM offset must be nonzero");
  if (plane.levels < 2) throw std::invalid_argument("GLCM needs at least 2 levels");
  if (static_cast<std::size_t>(std::abs(offset.drow)) >= plane.height ||
      static_cast<std::size_t>(std::abs(offset.dcol)) >= plane.width)
    throw DataError("plane is smaller than the GLCM offset");

  const auto counts = kernels::glcm_counts(plane, offset, exec);
  const auto total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return Glcm(plane.levels, std::move(p));
}

Glcm compute_glcm(std::span<const double> intensities, std::size_t width, std::size_t height,
                  int levels, GlcmOffset offset, Exec exec) {
  return compute_glcm(quantize(intensities, width, height, levels), offset, exec);
}

GlcmProps glcm_props(const Glcm& g) {
  const int L = g.levels();
  double mu_i = 0.0, mu_j = 0.0;
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      mu_i += i * g(i, j);
      mu_j += j * g(i, j);
    }
  GlcmProps out;
  double asm_ = 0.0, var_i = 0.0, var_j = 0.0, cov = 0.0;
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) {
      const double p = g(i, j);
      if (p == 0.0) continue;
      const double d = i - j;
      out.contrast += p * d * d;
      asm_ += p * p;
      out.homogeneity += p / (1.0 + std::abs(d));
      var_i += p * (i - mu_i) * (i - mu_i);
      var_j += p * (j - mu_j) * (j - mu_j);
      cov += p * (i - mu_i) * (j - mu_j);
    }
  out.energy = std::sqrt(asm_);
  const double denom = std::sqrt(var_i) * std::sqrt(var_j);
  out.correlation = denom == 0.0 ? 1.0 : std::clamp(cov / denom, -1.0, 1.0);
  return out;
}

}  // namespace milkspec
