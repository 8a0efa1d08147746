#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "milkspec/kernels/exec.hpp"

namespace milkspec {

/// Intensity plane already quantized to `levels` gray levels.
struct LevelPlane {
  std::size_t width = 0;
  std::size_t height = 0;
  int levels = 0;
  std::vector<std::uint16_t> data;  // row-major, values < levels
};

/// Maps intensities in [0, 255] to `levels` equal-width bins.
LevelPlane quantize(std::span<const double> intensities, std::size_t width, std::size_t height,
                    int levels);

struct GlcmOffset {
  int drow = 0;
  int dcol = 1;
};

/// Normalized symmetric gray-level co-occurrence matrix.
class Glcm {
 public:
  Glcm() = default;
  Glcm(int levels, std::vector<double> p);

  int levels() const { return levels_; }
  double operator()(int i, int j) const { return p_[static_cast<std::size_t>(i * levels_ + j)]; }
  const std::vector<double>& values() const { return p_; }

 private:
  int levels_ = 0;
  std::vector<double> p_;
};

/// Accumulates pairs at `offset` and at its reverse, then normalizes.
/// Throws std::invalid_argument for a (0,0) offset or fewer than 2 levels,
/// DataError when the plane is too small to hold a single pair.
Glcm compute_glcm(const LevelPlane& plane, GlcmOffset offset, Exec exec = Exec::parallel);
Glcm compute_glcm(std::span<const double> intensities, std::size_t width, std::size_t height,
                  int levels, GlcmOffset offset, Exec exec = Exec::parallel);

struct GlcmProps {
  double contrast = 0.0;
  double energy = 0.0;       // sqrt of the angular second moment
  double correlation = 0.0;  // 1 when either marginal has zero variance
  double homogeneity = 0.0;  // Σ p / (1 + |i − j|)
};

GlcmProps glcm_props(const Glcm& g);

}  // namespace milkspec
