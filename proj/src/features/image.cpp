#include "milkspec/features/image.hpp"

#include <cctype>
#include <stdexcept>

#include "milkspec/error.hpp"
#include "milkspec/util/text.hpp"

namespace milkspec {

RgbPatch::RgbPatch(std::size_t width, std::size_t height) : width_(width), height_(height) {
  for (auto& p : planes_) p.assign(width * height, 0);
}

RgbPatch::RgbPatch(std::size_t width, std::size_t height,
                   std::array<std::vector<std::uint8_t>, 3> planes)
    : width_(width), height_(height), planes_(std::move(planes)) {
  for (const auto& p : planes_)
    if (p.size() != width * height) throw std::invalid_argument("RgbPatch: plane size mismatch");
}

RgbPatch RgbPatch::center_crop(std::size_t side) const {
  if (side == 0 || side > width_ || side > height_)
    throw DataError("patch " + std::to_string(width_) + "x" + std::to_string(height_) +
                    " is smaller than the requested square " + std::to_string(side));
  const std::size_t r0 = (height_ - side) / 2;
  const std::size_t c0 = (width_ - side) / 2;
  RgbPatch out(side, side);
  for (std::size_t ch = 0; ch < 3; ++ch)
    for (std::size_t r = 0; r < side; ++r)
      for (std::size_t c = 0; c < side; ++c) out.set(ch, r, c, at(ch, r0 + r, c0 + c));
  return out;
}

RgbPatch RgbPatch::permuted(const std::array<std::size_t, 3>& order) const {
  return RgbPatch(width_, height_, {planes_.at(order[0]), planes_.at(order[1]), planes_.at(order[2])});
}

namespace {

class PpmCursor {
 public:
  explicit PpmCursor(std::string_view s) : s_(s) {}

  std::string_view token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw FormatError("truncated PPM header");
    return s_.substr(start, pos_ - start);
  }

  std::size_t number() {
    const auto v = text::parse_int(token());
    if (!v || *v < 0) throw FormatError("invalid number in PPM");
    return static_cast<std::size_t>(*v);
  }

  /// Consumes the single whitespace byte that precedes binary raster data.
  std::string_view raster() {
    if (pos_ >= s_.size()) throw FormatError("PPM has no raster data");
    return s_.substr(pos_ + 1);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

RgbPatch parse_ppm(std::string_view bytes) {
  PpmCursor cur(bytes);
  const auto magic = cur.token();
  if (magic != "P6" && magic != "P3") throw FormatError("not a P6/P3 portable pixmap");
  const std::size_t w = cur.number();
  const std::size_t h = cur.number();
  const std::size_t maxval = cur.number();
  if (w == 0 || h == 0) throw FormatError("PPM has zero size");
  if (maxval != 255) throw FormatError("only 8-bit PPM (maxval 255) is supported");

  RgbPatch patch(w, h);
  if (magic == "P6") {
    const auto data = cur.raster();
    if (data.size() < w * h * 3) throw FormatError("PPM raster is truncated");
    for (std::size_t i = 0; i < w * h; ++i)
      for (std::size_t ch = 0; ch < 3; ++ch)
        patch.set(ch, i / w, i % w, static_cast<std::uint8_t>(data[i * 3 + ch]));
  } else {
    for (std::size_t i = 0; i < w * h; ++i)
      for (std::size_t ch = 0; ch < 3; ++ch) {
        const std::size_t v = cur.number();
        if (v > 255) throw FormatError("PPM sample exceeds maxval");
        patch.set(ch, i / w, i % w, static_cast<std::uint8_t>(v));
      }
  }
  return patch;
}

std::string format_ppm(const RgbPatch& patch) {
  std::string out = "P6\n" + std::to_string(patch.width()) + " " + std::to_string(patch.height()) + "\n255\n";
  out.reserve(out.size() + patch.pixel_count() * 3);
  for (std::size_t r = 0; r < patch.height(); ++r)
    for (std::size_t c = 0; c < patch.width(); ++c)
      for (std::size_t ch = 0; ch < 3; ++ch) out.push_back(static_cast<char>(patch.at(ch, r, c)));
  return out;
}

RgbPatch load_ppm(const std::filesystem::path& path) { return parse_ppm(text::read_file(path.string())); }

}  // namespace milkspec
