#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "milkspec/core/envi.hpp"

namespace milkspec {

/// Axis-aligned pixel rectangle inside a cube.
struct Roi {
  std::size_t row0 = 0;
  std::size_t col0 = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t pixel_count() const { return rows * cols; }
  friend bool operator==(const Roi&, const Roi&) = default;
};

struct RoiSpectrum {
  std::string sample_id;
  std::vector<double> mean_reflectance;
  std::size_t pixel_count = 0;
};

/// Square of `side` pixels centred in a lines × samples frame, with the
/// origin at floor((lines−side)/2), floor((samples−side)/2).
/// Throws DataError when `side` is zero or exceeds either dimension.
Roi extract_center_roi(std::size_t lines, std::size_t samples, std::size_t side);

/// Per-band mean over the ROI pixels.
RoiSpectrum roi_mean_spectrum(const HyperCube& cube, const Roi& roi, std::string sample_id);

/// Copies the ROI into a standalone cube; wavelengths and scale carry over.
HyperCube crop(const HyperCube& cube, const Roi& roi);

}  // namespace milkspec
