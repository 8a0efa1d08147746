#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "milkspec/error.hpp"
#include "milkspec/features/features.hpp"
#include "milkspec/features/glcm.hpp"
#include "milkspec/features/image.hpp"
#include "milkspec/kernels/glcm_counts.hpp"
#include "milkspec/learn/rng.hpp"

using namespace milkspec;

namespace {

RgbPatch filled(std::size_t w, std::size_t h, std::uint8_t v) {
  RgbPatch p(w, h);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t x = 0; x < w; ++x) p.set(c, r, x, v);
  return p;
}

RgbPatch random_patch(std::size_t w, std::size_t h, std::uint64_t seed) {
  SplitMix64 rng(seed);
  RgbPatch p(w, h);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t r = 0; r < h; ++r)
      for (std::size_t x = 0; x < w; ++x) p.set(c, r, x, static_cast<std::uint8_t>(rng.below(256)));
  return p;
}

// Column stripes 0, 255, 0, 255, ... on every row.
std::vector<double> stripe_plane(std::size_t w, std::size_t h) {
  std::vector<double> v(w * h);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t x = 0; x < w; ++x) v[r * w + x] = x % 2 ? 255.0 : 0.0;
  return v;
}

}  // namespace

TEST(ChannelStats, Examples) {
  const auto gray = channel_stats(filled(4, 4, 128));
  for (const auto& s : gray) {
    EXPECT_DOUBLE_EQ(s.mean, 128.0 / 255.0);
    EXPECT_EQ(s.std, 0.0);
  }
  RgbPatch half(4, 2);
  for (std::size_t x = 0; x < 4; ++x) half.set(0, 1, x, 255);
  const auto h = channel_stats(half);
  EXPECT_DOUBLE_EQ(h[0].mean, 0.5);
  EXPECT_DOUBLE_EQ(h[0].std, 0.5);
  EXPECT_EQ(h[1].mean, 0.0);
  for (const auto& s : channel_stats(filled(3, 3, 0))) {
    EXPECT_EQ(s.mean, 0.0);
    EXPECT_EQ(s.std, 0.0);
  }
}

TEST(Glcm, ConstantPlane) {
  const std::vector<double> plane(36, 77.0);
  const Glcm g = compute_glcm(plane, 6, 6, 8, GlcmOffset{0, 1});
  const int level = 77 * 8 / 256;
  EXPECT_EQ(g(level, level), 1.0);
  const GlcmProps p = glcm_props(g);
  EXPECT_EQ(p.contrast, 0.0);
  EXPECT_EQ(p.energy, 1.0);
  EXPECT_EQ(p.homogeneity, 1.0);
  EXPECT_EQ(p.correlation, 1.0);
}

TEST(Glcm, StripePlane) {
  const Glcm g = compute_glcm(stripe_plane(8, 4), 8, 4, 2, GlcmOffset{0, 1});
  EXPECT_DOUBLE_EQ(g(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(g(1, 0), 0.5);
  EXPECT_EQ(g(0, 0), 0.0);
  const GlcmProps p = glcm_props(g);
  EXPECT_NEAR(p.contrast, 1.0, 1e-12);
  EXPECT_NEAR(p.energy, std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(p.homogeneity, 0.5, 1e-12);
  EXPECT_NEAR(p.correlation, -1.0, 1e-12);
}

TEST(Glcm, LevelPlaneStripe) {
  LevelPlane plane{6, 3, 2, {}};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t x = 0; x < 6; ++x) plane.data.push_back(static_cast<std::uint16_t>(x % 2));
  const Glcm g = compute_glcm(plane, GlcmOffset{0, 1});
  EXPECT_DOUBLE_EQ(g(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(g(1, 0), 0.5);
}

TEST(Glcm, IdentityDiagonal) {
  const int levels = 4;
  std::vector<double> p(levels * levels, 0.0);
  for (int i = 0; i < levels; ++i) p[static_cast<std::size_t>(i * levels + i)] = 1.0 / levels;
  const GlcmProps props = glcm_props(Glcm(levels, p));
  EXPECT_EQ(props.contrast, 0.0);
  EXPECT_NEAR(props.correlation, 1.0, 1e-12);
}

TEST(Glcm, Errors) {
  const std::vector<double> plane(16, 10.0);
  EXPECT_THROW(compute_glcm(plane, 4, 4, 8, GlcmOffset{0, 0}), std::invalid_argument);
  EXPECT_THROW(compute_glcm(plane, 4, 4, 1, GlcmOffset{0, 1}), std::invalid_argument);
  EXPECT_THROW(compute_glcm(plane, 4, 4, 8, GlcmOffset{0, 4}), DataError);
  EXPECT_THROW(compute_glcm(plane, 4, 4, 8, GlcmOffset{5, 0}), DataError);
}

TEST(Glcm, PropertiesOnRandomPlanes) {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t w = 3 + rng.below(20), h = 3 + rng.below(20);
    const int levels = 2 + static_cast<int>(rng.below(15));
    const GlcmOffset off{static_cast<int>(rng.below(3)) - 1, static_cast<int>(rng.below(2)) + 1};
    std::vector<double> plane(w * h);
    for (auto& v : plane) v = static_cast<double>(rng.below(256));
    const Glcm g = compute_glcm(plane, w, h, levels, off);
    double sum = 0.0;
    for (int i = 0; i < levels; ++i)
      for (int j = 0; j < levels; ++j) {
        EXPECT_GE(g(i, j), 0.0);
        EXPECT_EQ(g(i, j), g(j, i));
        sum += g(i, j);
      }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    const GlcmProps p = glcm_props(g);
    EXPECT_GE(p.contrast, 0.0);
    EXPECT_GT(p.energy, 0.0);
    EXPECT_LE(p.energy, 1.0 + 1e-15);
    EXPECT_GT(p.homogeneity, 0.0);
    EXPECT_LE(p.homogeneity, 1.0 + 1e-15);
    EXPECT_GE(p.correlation, -1.0 - 1e-12);
    EXPECT_LE(p.correlation, 1.0 + 1e-12);
  }
}

TEST(GlcmCountsKernel, SerialAndParallelIdentical) {
  SplitMix64 rng(8);
  LevelPlane plane{257, 131, 16, {}};
  for (std::size_t i = 0; i < plane.width * plane.height; ++i) plane.data.push_back(static_cast<std::uint16_t>(rng.below(16)));
  for (GlcmOffset off : {GlcmOffset{0, 1}, GlcmOffset{1, 0}, GlcmOffset{1, 1}, GlcmOffset{-1, 2}}) {
    const auto s = kernels::glcm_counts(plane, off, Exec::serial);
    const auto p = kernels::glcm_counts(plane, off, Exec::parallel);
    EXPECT_EQ(s, p);
  }
}

TEST(ConcatHistogram, IndexMapping) {
  RgbPatch p = filled(4, 4, 0);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t x = 0; x < 4; ++x) p.set(1, r, x, 37);
  const auto h = concat_histogram(p);
  ASSERT_EQ(h.size(), 768u);
  EXPECT_EQ(h[293], 1.0);
  for (std::size_t b = 256; b < 512; ++b)
    if (b != 293) {
      EXPECT_EQ(h[b], 0.0);
    }

  const auto z = concat_histogram(filled(3, 3, 0));
  EXPECT_EQ(z[0], 1.0);
  EXPECT_EQ(z[256], 1.0);
  EXPECT_EQ(z[512], 1.0);

  RgbPatch mixed = filled(4, 2, 0);
  for (std::size_t x = 0; x < 4; ++x) {
    mixed.set(1, 0, x, 45);
    mixed.set(1, 1, x, 110);
  }
  const auto m = concat_histogram(mixed);
  EXPECT_EQ(m[301], 0.5);
  EXPECT_EQ(m[366], 0.5);
}

TEST(ConcatHistogram, BlocksSumToOne) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto h = concat_histogram(random_patch(13, 7, seed));
    for (std::size_t c = 0; c < 3; ++c)
      EXPECT_NEAR(std::accumulate(h.begin() + 256 * c, h.begin() + 256 * (c + 1), 0.0), 1.0, 1e-12);
  }
}

TEST(FeatureVector, ConstantPatch) {
  const ImageFeatureVector f = extract_feature_vector(filled(8, 8, 128));
  for (double s : f.std) EXPECT_EQ(s, 0.0);
  EXPECT_EQ(f.glcm_contrast, 0.0);
  EXPECT_EQ(f.glcm_energy, 1.0);
}

TEST(FeatureVector, ChannelPermutation) {
  // luminance-symmetric input: channels 0 and 2 carry the same weight only
  // under the average plane, so permute two equal-weight channels there.
  const RgbPatch p = random_patch(16, 16, 4);
  const RgbPatch q = p.permuted({2, 1, 0});
  GlcmConfig cfg;
  cfg.plane = GlcmPlane::average;
  const ImageFeatureVector a = extract_feature_vector(p, cfg);
  const ImageFeatureVector b = extract_feature_vector(q, cfg);
  EXPECT_EQ(a.glcm_contrast, b.glcm_contrast);
  EXPECT_EQ(a.glcm_energy, b.glcm_energy);
  EXPECT_EQ(a.glcm_correlation, b.glcm_correlation);
  EXPECT_EQ(a.glcm_homogeneity, b.glcm_homogeneity);
  EXPECT_EQ(a.mean[0], b.mean[2]);
  EXPECT_EQ(a.mean[2], b.mean[0]);

  // gray patch permuted: luminance plane identical, so props match too
  RgbPatch sym = random_patch(16, 16, 5);
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t x = 0; x < 16; ++x) {
      sym.set(1, r, x, sym.at(0, r, x));
      sym.set(2, r, x, sym.at(0, r, x));
    }
  const ImageFeatureVector c = extract_feature_vector(sym);
  const ImageFeatureVector d = extract_feature_vector(sym.permuted({1, 2, 0}));
  EXPECT_EQ(c.glcm_contrast, d.glcm_contrast);
  EXPECT_EQ(c.glcm_correlation, d.glcm_correlation);
}

TEST(FeatureVector, NamesAndDeterminism) {
  const auto& names = ImageFeatureVector::names();
  EXPECT_EQ(names.size(), 14u);
  EXPECT_NE(std::find(names.begin(), names.end(), "Texture contrast"), names.end());
  EXPECT_NE(std::find(names.begin(), names.end(), "Mean color channel 2"), names.end());
  const RgbPatch p = random_patch(20, 20, 9);
  EXPECT_EQ(extract_feature_vector(p).to_vector(), extract_feature_vector(p).to_vector());
  const auto v = extract_feature_vector(p).to_vector();
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_GE(v[i], 0.0);
    EXPECT_LE(v[i], 1.0);
  }
}

TEST(Luminance, Weights) {
  RgbPatch p(1, 1);
  p.set(0, 0, 0, 100);
  p.set(1, 0, 0, 200);
  p.set(2, 0, 0, 50);
  EXPECT_NEAR(intensity_plane(p, GlcmPlane::luminance)[0], 0.299 * 100 + 0.587 * 200 + 0.114 * 50, 1e-12);
  EXPECT_EQ(intensity_plane(p, GlcmPlane::channel1)[0], 200.0);
}

TEST(Ppm, RoundTripAndAscii) {
  const RgbPatch p = random_patch(5, 3, 2);
  EXPECT_EQ(parse_ppm(format_ppm(p)), p);
  const RgbPatch a = parse_ppm("P3\n# comment\n2 1\n255\n1 2 3  4 5 6\n");
  EXPECT_EQ(a.at(0, 0, 1), 4);
  EXPECT_EQ(a.at(2, 0, 0), 3);
  EXPECT_THROW(parse_ppm("P6\n2 2\n65535\n"), FormatError);
  EXPECT_THROW(parse_ppm("P5\n1 1\n255\n\x01"), FormatError);
}

TEST(CenterCrop, Origin) {
  RgbPatch p = random_patch(7, 6, 1);
  const RgbPatch c = p.center_crop(4);
  EXPECT_EQ(c.width(), 4u);
  EXPECT_EQ(c.at(0, 0, 0), p.at(0, 1, 1));
}

TEST(Snv, Examples) {
  const std::vector<double> v{1, 2, 3};
  const auto s = snv_normalize(v);
  EXPECT_NEAR(s[0] + s[1] + s[2], 0.0, 1e-15);
  EXPECT_NEAR((s[0] * s[0] + s[1] * s[1] + s[2] * s[2]) / 2.0, 1.0, 1e-15);
  const auto again = snv_normalize(s);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(again[i], s[i], 1e-12);
  const std::vector<double> c{4, 4, 4};
  EXPECT_THROW(snv_normalize(c), DegenerateError);
  const std::vector<double> one{1};
  EXPECT_THROW(snv_normalize(one), std::invalid_argument);
}
