#include "milkspec/features/features.hpp"

#include <cmath>
#include <stdexcept>

#include "milkspec/core/matrix.hpp"
#include "milkspec/error.hpp"

namespace milkspec {

std::array<ChannelStats, 3> channel_stats(const RgbPatch& patch) {
  std::array<ChannelStats, 3> out{};
  const auto n = static_cast<double>(patch.pixel_count());
  for (std::size_t ch = 0; ch < 3; ++ch) {
    // Integer accumulation keeps the statistics exact and order-free.
    std::uint64_t sum = 0, sum_sq = 0;
    for (auto v : patch.plane(ch)) {
      sum += v;
      sum_sq += static_cast<std::uint64_t>(v) * v;
    }
    const double m = static_cast<double>(sum) / n;
    const double var = std::max(0.0, static_cast<double>(sum_sq) / n - m * m);
    out[ch] = {m / 255.0, std::sqrt(var) / 255.0};
  }
  return out;
}

std::vector<double> concat_histogram(const RgbPatch& patch) {
  std::vector<double> h(768, 0.0);
  std::array<std::uint64_t, 768> counts{};
  for (std::size_t ch = 0; ch < 3; ++ch)
    for (auto v : patch.plane(ch)) ++counts[256 * ch + v];
  const auto n = static_cast<double>(patch.pixel_count());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = static_cast<double>(counts[i]) / n;
  return h;
}

std::vector<double> intensity_plane(const RgbPatch& patch, GlcmPlane plane) {
  std::vector<double> out(patch.pixel_count());
  const auto r = patch.plane(0), g = patch.plane(1), b = patch.plane(2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (plane) {
      case GlcmPlane::luminance: out[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]; break;
      case GlcmPlane::average: out[i] = (static_cast<double>(r[i]) + g[i] + b[i]) / 3.0; break;
      case GlcmPlane::channel0: out[i] = r[i]; break;
      case GlcmPlane::channel1: out[i] = g[i]; break;
      case GlcmPlane::channel2: out[i] = b[i]; break;
    }
  }
  return out;
}

const std::vector<std::string>& ImageFeatureVector::names() {
  static const std::vector<std::string> n = {
      "Mean color channel 0", "Mean color channel 1", "Mean color channel 2",
      "Std color channel 0",  "Std color channel 1",  "Std color channel 2",
      "Texture contrast",     "Texture energy",       "Texture correlation",
      "Texture homogeneity",  "Histogram bin 293",    "Histogram bin 301",
      "Histogram bin 365",    "Histogram bin 366"};
  return n;
}

std::vector<double> ImageFeatureVector::to_vector() const {
  return {mean[0],          mean[1],       mean[2],         std[0],
          std[1],           std[2],        glcm_contrast,   glcm_energy,
          glcm_correlation, glcm_homogeneity, hist_bins[0], hist_bins[1],
          hist_bins[2],     hist_bins[3]};
}

ImageFeatureVector extract_feature_vector(const RgbPatch& patch, const GlcmConfig& config) {
  ImageFeatureVector f;
  const auto stats = channel_stats(patch);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    f.mean[ch] = stats[ch].mean;
    f.std[ch] = stats[ch].std;
  }
  const Glcm g = compute_glcm(intensity_plane(patch, config.plane), patch.width(), patch.height(),
                              config.levels, config.offset);
  const GlcmProps props = glcm_props(g);
  f.glcm_contrast = props.contrast;
  f.glcm_energy = props.energy;
  f.glcm_correlation = props.correlation;
  f.glcm_homogeneity = props.homogeneity;
  const auto hist = concat_histogram(patch);
  for (std::size_t i = 0; i < kSelectedHistogramBins.size(); ++i) f.hist_bins[i] = hist[kSelectedHistogramBins[i]];
  return f;
}

std::vector<double> snv_normalize(std::span<const double> spectrum) {
  if (spectrum.size() < 2) throw std::invalid_argument("snv_normalize: need at least 2 values");
  const double m = mean(spectrum);
  const double sd = std::sqrt(sample_variance(spectrum));
  if (!(sd > 0.0)) throw DegenerateError("snv_normalize: spectrum has zero variance");
  std::vector<double> out(spectrum.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (spectrum[i] - m) / sd;
  return out;
}

}  // namespace milkspec
