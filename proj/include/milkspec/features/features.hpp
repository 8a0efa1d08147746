#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "milkspec/features/glcm.hpp"
#include "milkspec/features/image.hpp"

namespace milkspec {

struct ChannelStats {
  double mean = 0.0;  // arithmetic mean / 255
  double std = 0.0;   // population standard deviation / 255
};

std::array<ChannelStats, 3> channel_stats(const RgbPatch& patch);

/// 768 bins: channel c, intensity v lands in bin 256·c + v. Each channel's
/// block sums to one.
std::vector<double> concat_histogram(const RgbPatch& patch);

/// Which plane the co-occurrence matrix is computed on.
enum class GlcmPlane { luminance, average, channel0, channel1, channel2 };

struct GlcmConfig {
  int levels = 8;
  GlcmOffset offset{0, 1};
  GlcmPlane plane = GlcmPlane::luminance;
};

/// Intensity plane in [0, 255]; luminance is 0.299R + 0.587G + 0.114B.
std::vector<double> intensity_plane(const RgbPatch& patch, GlcmPlane plane);

/// Concatenated-histogram bins reported in the descriptor.
inline constexpr std::array<std::size_t, 4> kSelectedHistogramBins{293, 301, 365, 366};

/// Per-patch visible-image descriptor, in CSV column order.
struct ImageFeatureVector {
  std::array<double, 3> mean{};
  std::array<double, 3> std{};
  double glcm_contrast = 0.0;
  double glcm_energy = 0.0;
  double glcm_correlation = 0.0;
  double glcm_homogeneity = 0.0;
  std::array<double, 4> hist_bins{};

  static const std::vector<std::string>& names();
  std::vector<double> to_vector() const;
};

ImageFeatureVector extract_feature_vector(const RgbPatch& patch, const GlcmConfig& config = {});

/// Standard normal variate: subtract the mean, divide by the sample sd.
/// Throws std::invalid_argument for fewer than 2 values and DegenerateError
/// for a constant spectrum.
std::vector<double> snv_normalize(std::span<const double> spectrum);

}  // namespace milkspec
