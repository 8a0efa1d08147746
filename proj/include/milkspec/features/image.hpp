#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace milkspec {

/// 8-bit RGB raster held as three planes.
class RgbPatch {
 public:
  RgbPatch() = default;
  RgbPatch(std::size_t width, std::size_t height);
  /// Throws std::invalid_argument when a plane size differs from width·height.
  RgbPatch(std::size_t width, std::size_t height, std::array<std::vector<std::uint8_t>, 3> planes);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixel_count() const { return width_ * height_; }

  std::span<const std::uint8_t> plane(std::size_t channel) const { return planes_.at(channel); }
  std::uint8_t at(std::size_t channel, std::size_t row, std::size_t col) const {
    return planes_[channel][row * width_ + col];
  }
  void set(std::size_t channel, std::size_t row, std::size_t col, std::uint8_t v) {
    planes_[channel][row * width_ + col] = v;
  }

  /// Central `side` × `side` square, origin at floor((dim−side)/2).
  RgbPatch center_crop(std::size_t side) const;
  /// Copy with channels reordered: output channel i = input channel order[i].
  RgbPatch permuted(const std::array<std::size_t, 3>& order) const;

  friend bool operator==(const RgbPatch&, const RgbPatch&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::array<std::vector<std::uint8_t>, 3> planes_;
};

/// Parses binary (P6) or ASCII (P3) portable pixmaps with maxval 255.
RgbPatch parse_ppm(std::string_view bytes);
/// Binary P6 encoding.
std::string format_ppm(const RgbPatch& patch);
RgbPatch load_ppm(const std::filesystem::path& path);

}  // namespace milkspec
