#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "milkspec/kernels/exec.hpp"

namespace milkspec {

enum class DataType { float32 = 4, uint16 = 12 };
enum class Interleave { bsq, bil, bip };
enum class ByteOrder { little = 0, big = 1 };

std::size_t element_size(DataType t);
std::string_view to_string(Interleave i);
Interleave parse_interleave(std::string_view s);

/// Band-centre wavelengths in nanometres; strictly increasing and positive.
class WavelengthGrid {
 public:
  WavelengthGrid() = default;
  explicit WavelengthGrid(std::vector<double> nm);

  std::size_t size() const { return nm_.size(); }
  double operator[](std::size_t i) const { return nm_[i]; }
  const std::vector<double>& values() const { return nm_; }

  friend bool operator==(const WavelengthGrid&, const WavelengthGrid&) = default;

 private:
  std::vector<double> nm_;
};

struct EnviHeader {
  std::size_t samples = 0;
  std::size_t lines = 0;
  std::size_t bands = 0;
  std::size_t header_offset = 0;
  DataType data_type = DataType::float32;
  Interleave interleave = Interleave::bsq;
  ByteOrder byte_order = ByteOrder::little;
  std::optional<WavelengthGrid> wavelengths;
  /// "reflectance scale factor": stored values are divided by it on read.
  std::optional<double> reflectance_scale;
  /// Keys the parser does not interpret, in file order, values verbatim.
  std::vector<std::pair<std::string, std::string>> extra;

  std::size_t element_count() const { return samples * lines * bands; }
  std::size_t payload_bytes() const { return element_count() * element_size(data_type); }
};

/// Parses the text of an ENVI .hdr file.
///
/// Keys are matched case-insensitively; brace-delimited values may span
/// several lines. Throws FormatError on a missing "ENVI" magic line, missing
/// samples/lines/bands, an unsupported data type or interleave, or a
/// wavelength list whose length differs from the band count.
EnviHeader parse_envi_header(std::string_view text);

/// Renders a header that parse_envi_header reads back to an equal value.
std::string format_envi_header(const EnviHeader& header);

/// Reflectance cube held in canonical (line, sample, band) order.
class HyperCube {
 public:
  HyperCube() = default;
  /// Throws FormatError when the value count does not match the header or a
  /// value is not finite.
  HyperCube(EnviHeader header, std::vector<double> values);

  const EnviHeader& header() const { return header_; }
  std::size_t lines() const { return header_.lines; }
  std::size_t samples() const { return header_.samples; }
  std::size_t bands() const { return header_.bands; }
  const std::vector<double>& values() const { return values_; }

  double at(std::size_t line, std::size_t sample, std::size_t band) const {
    return values_[(line * header_.samples + sample) * header_.bands + band];
  }
  std::span<const double> pixel(std::size_t line, std::size_t sample) const {
    return {values_.data() + (line * header_.samples + sample) * header_.bands, header_.bands};
  }

 private:
  EnviHeader header_;
  std::vector<double> values_;
};

/// Decodes a binary payload (including `header_offset` leading bytes) into a
/// canonical cube. Throws FormatError on a length mismatch or a non-finite
/// float value.
HyperCube read_cube(const EnviHeader& header, std::span<const std::byte> raw,
                    Exec exec = Exec::parallel);

struct EnviWriteOptions {
  Interleave interleave = Interleave::bsq;
  std::optional<DataType> data_type;   // defaults to the cube header's
  std::optional<ByteOrder> byte_order; // defaults to the cube header's
};

struct EnviBlob {
  std::string header;
  std::vector<std::byte> payload;
};

/// Serializes a cube. Writing uint16 requires integral stored values in
/// [0, 65535]; anything else throws FormatError.
EnviBlob write_cube(const HyperCube& cube, const EnviWriteOptions& options);
inline EnviBlob write_cube(const HyperCube& cube, Interleave interleave) {
  return write_cube(cube, EnviWriteOptions{interleave, {}, {}});
}

/// Reads `<stem>.hdr` and the payload next to it (`<stem>`, `.img`, `.raw`,
/// `.dat` or `.bin`).
HyperCube load_envi(const std::filesystem::path& header_path, Exec exec = Exec::parallel);
/// Writes `<stem>.hdr` and `<stem>.img`.
void save_envi(const std::filesystem::path& stem, const HyperCube& cube,
               const EnviWriteOptions& options);

}  // namespace milkspec
