#include "milkspec/core/roi.hpp"

#include "milkspec/error.hpp"

namespace milkspec {

namespace {

void check_inside(const HyperCube& cube, const Roi& roi) {
  if (roi.rows == 0 || roi.cols == 0) throw DataError("empty ROI");
  if (roi.row0 + roi.rows > cube.lines() || roi.col0 + roi.cols > cube.samples())
    throw DataError("ROI extends outside the cube");
}

}  // namespace

Roi extract_center_roi(std::size_t lines, std::size_t samples, std::size_t side) {
  if (side == 0) throw DataError("ROI side must be positive");
  if (side > lines || side > samples)
    throw DataError("ROI side " + std::to_string(side) + " exceeds frame " + std::to_string(lines) +
                    "x" + std::to_string(samples));
  return Roi{(lines - side) / 2, (samples - side) / 2, side, side};
}

RoiSpectrum roi_mean_spectrum(const HyperCube& cube, const Roi& roi, std::string sample_id) {
  check_inside(cube, roi);
  std::vector<double> acc(cube.bands(), 0.0);
  for (std::size_t r = roi.row0; r < roi.row0 + roi.rows; ++r)
    for (std::size_t c = roi.col0; c < roi.col0 + roi.cols; ++c) {
      auto px = cube.pixel(r, c);
      for (std::size_t b = 0; b < acc.size(); ++b) acc[b] += px[b];
    }
  const double n = static_cast<double>(roi.pixel_count());
  for (double& v : acc) v /= n;
  return RoiSpectrum{std::move(sample_id), std::move(acc), roi.pixel_count()};
}

HyperCube crop(const HyperCube& cube, const Roi& roi) {
  check_inside(cube, roi);
  EnviHeader h = cube.header();
  h.lines = roi.rows;
  h.samples = roi.cols;
  h.header_offset = 0;
  std::vector<double> values;
  values.reserve(roi.pixel_count() * cube.bands());
  for (std::size_t r = roi.row0; r < roi.row0 + roi.rows; ++r)
    for (std::size_t c = roi.col0; c < roi.col0 + roi.cols; ++c) {
      auto px = cube.pixel(r, c);
      values.insert(values.end(), px.begin(), px.end());
    }
  return HyperCube(std::move(h), std::move(values));
}

}  // namespace milkspec
