#include "milkspec/core/envi.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "milkspec/error.hpp"
#include "milkspec/kernels/cube_layout.hpp"
#include "milkspec/util/text.hpp"

namespace milkspec {

std::size_t element_size(DataType t) { return t == DataType::uint16 ? 2 : 4; }

std::string_view to_string(Interleave i) {
  switch (i) {
    case Interleave::bsq: return "bsq";
    case Interleave::bil: return "bil";
    case Interleave::bip: break;
  }
  return "bip";
}

Interleave parse_interleave(std::string_view s) {
  const std::string v = text::to_lower(text::trim(s));
  if (v == "bsq") return Interleave::bsq;
  if (v == "bil") return Interleave::bil;
  if (v == "bip") return Interleave::bip;
  throw FormatError("unsupported interleave '" + std::string(s) + "'");
}

WavelengthGrid::WavelengthGrid(std::vector<double> nm) : nm_(std::move(nm)) {
  for (std::size_t i = 0; i < nm_.size(); ++i) {
    if (!(nm_[i] > 0.0) || !std::isfinite(nm_[i]))
      throw FormatError("wavelengths must be finite and positive");
    if (i > 0 && !(nm_[i] > nm_[i - 1]))
      throw FormatError("wavelengths must be strictly increasing");
  }
}

namespace {

std::size_t positive_count(std::string_view key, std::string_view value) {
  const auto v = text::parse_int(value);
  if (!v || *v < 1) throw FormatError("header key '" + std::string(key) + "' must be a positive integer");
  return static_cast<std::size_t>(*v);
}

std::vector<double> parse_brace_list(std::string_view key, std::string_view value) {
  value = text::trim(value);
  if (value.size() < 2 || value.front() != '{' || value.back() != '}')
    throw FormatError("header key '" + std::string(key) + "' must be a brace-delimited list");
  value = value.substr(1, value.size() - 2);
  std::vector<double> out;
  if (text::trim(value).empty()) return out;
  for (auto item : text::split(value, ',')) {
    const auto v = text::parse_double(item);
    if (!v) throw FormatError("non-numeric entry in '" + std::string(key) + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace

EnviHeader parse_envi_header(std::string_view text) {
  if (text::trim(text).empty()) throw FormatError("empty ENVI header");

  auto lines = text::split(text, '\n');
  std::size_t li = 0;
  while (li < lines.size() && text::trim(lines[li]).empty()) ++li;
  if (li == lines.size() || text::trim(lines[li]) != "ENVI")
    throw FormatError("missing ENVI magic on the first line");
  ++li;

  EnviHeader h;
  bool have_samples = false, have_lines = false, have_bands = false;
  std::optional<std::vector<double>> wavelengths;

  for (; li < lines.size(); ++li) {
    std::string_view line = text::trim(lines[li]);
    if (line.empty() || line.front() == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    const std::string_view raw_key = text::trim(line.substr(0, eq));
    std::string value(text::trim(line.substr(eq + 1)));
    if (!value.empty() && value.front() == '{') {
      while (value.find('}') == std::string::npos && li + 1 < lines.size()) {
        value += ' ';
        value += text::trim(lines[++li]);
      }
      if (value.find('}') == std::string::npos)
        throw FormatError("unterminated brace list for '" + std::string(raw_key) + "'");
    }
    const std::string key = text::to_lower(raw_key);

    if (key == "samples") {
      h.samples = positive_count(key, value);
      have_samples = true;
    } else if (key == "lines") {
      h.lines = positive_count(key, value);
      have_lines = true;
    } else if (key == "bands") {
      h.bands = positive_count(key, value);
      have_bands = true;
    } else if (key == "header offset") {
      const auto v = text::parse_int(value);
      if (!v || *v < 0) throw FormatError("header offset must be a non-negative integer");
      h.header_offset = static_cast<std::size_t>(*v);
    } else if (key == "data type") {
      const auto v = text::parse_int(value);
      if (v == 4) h.data_type = DataType::float32;
      else if (v == 12) h.data_type = DataType::uint16;
      else throw FormatError("unsupported data type '" + value + "' (expected 4 or 12)");
    } else if (key == "interleave") {
      h.interleave = parse_interleave(value);
    } else if (key == "byte order") {
      const auto v = text::parse_int(value);
      if (v == 0) h.byte_order = ByteOrder::little;
      else if (v == 1) h.byte_order = ByteOrder::big;
      else throw FormatError("byte order must be 0 or 1");
    } else if (key == "wavelength") {
      wavelengths = parse_brace_list(key, value);
    } else if (key == "reflectance scale factor") {
      const auto v = text::parse_double(value);
      if (!v || !(*v > 0.0)) throw FormatError("reflectance scale factor must be positive");
      h.reflectance_scale = *v;
    } else {
      h.extra.emplace_back(std::string(raw_key), value);
    }
  }

  if (!have_samples) throw FormatError("header lacks 'samples'");
  if (!have_lines) throw FormatError("header lacks 'lines'");
  if (!have_bands) throw FormatError("header lacks 'bands'");
  if (wavelengths) {
    if (wavelengths->size() != h.bands)
      throw FormatError("wavelength count " + std::to_string(wavelengths->size()) +
                        " does not match bands " + std::to_string(h.bands));
    h.wavelengths = WavelengthGrid(std::move(*wavelengths));
  }
  return h;
}

std::string format_envi_header(const EnviHeader& h) {
  std::ostringstream out;
  out << "ENVI\n"
      << "samples = " << h.samples << '\n'
      << "lines = " << h.lines << '\n'
      << "bands = " << h.bands << '\n'
      << "header offset = " << h.header_offset << '\n'
      << "data type = " << static_cast<int>(h.data_type) << '\n'
      << "interleave = " << to_string(h.interleave) << '\n'
      << "byte order = " << static_cast<int>(h.byte_order) << '\n';
  if (h.reflectance_scale) out << "reflectance scale factor = " << text::format_double(*h.reflectance_scale) << '\n';
  if (h.wavelengths) {
    out << "wavelength = {";
    for (std::size_t i = 0; i < h.wavelengths->size(); ++i) {
      if (i) out << ", ";
      out << text::format_double((*h.wavelengths)[i]);
    }
    out << "}\n";
  }
  for (const auto& [k, v] : h.extra) out << k << " = " << v << '\n';
  return out.str();
}

HyperCube::HyperCube(EnviHeader header, std::vector<double> values)
    : header_(std::move(header)), values_(std::move(values)) {
  if (header_.samples < 1 || header_.lines < 1 || header_.bands < 1)
    throw FormatError("cube dimensions must be at least 1");
  if (values_.size() != header_.element_count())
    throw FormatError("cube holds " + std::to_string(values_.size()) + " values, header implies " +
                      std::to_string(header_.element_count()));
  if (header_.wavelengths && header_.wavelengths->size() != header_.bands)
    throw FormatError("wavelength count does not match bands");
  for (double v : values_)
    if (!std::isfinite(v)) throw FormatError("cube contains a non-finite value");
}

HyperCube read_cube(const EnviHeader& header, std::span<const std::byte> raw, Exec exec) {
  const std::size_t expected = header.header_offset + header.payload_bytes();
  if (raw.size() != expected)
    throw FormatError("payload is " + std::to_string(raw.size()) + " bytes, expected " +
                      std::to_string(expected));
  const kernels::CubeLayout layout{header.lines, header.samples, header.bands, header.interleave};
  auto values = kernels::decode_canonical(raw.subspan(header.header_offset), layout,
                                          header.data_type, header.byte_order, exec);
  if (header.reflectance_scale) {
    const double s = *header.reflectance_scale;
    for (double& v : values) v /= s;
  }
  return HyperCube(header, std::move(values));
}

EnviBlob write_cube(const HyperCube& cube, const EnviWriteOptions& options) {
  EnviHeader h = cube.header();
  h.interleave = options.interleave;
  h.header_offset = 0;
  if (options.data_type) h.data_type = *options.data_type;
  if (options.byte_order) h.byte_order = *options.byte_order;

  std::vector<double> stored = cube.values();
  if (h.reflectance_scale)
    for (double& v : stored) v *= *h.reflectance_scale;
  if (h.data_type == DataType::uint16) {
    for (double v : stored)
      if (v != std::floor(v) || v < 0.0 || v > 65535.0)
        throw FormatError("uint16 output requires integral values in [0, 65535]");
  }

  const kernels::CubeLayout layout{h.lines, h.samples, h.bands, h.interleave};
  EnviBlob blob;
  blob.payload = kernels::encode_canonical(stored, layout, h.data_type, h.byte_order, Exec::parallel);
  blob.header = format_envi_header(h);
  return blob;
}

namespace {

std::vector<std::byte> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::byte> buf(size);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
  return buf;
}

}  // namespace

HyperCube load_envi(const std::filesystem::path& header_path, Exec exec) {
  const EnviHeader h = parse_envi_header(text::read_file(header_path.string()));
  auto stem = header_path;
  stem.replace_extension();
  for (const char* ext : {"", ".img", ".raw", ".dat", ".bin"}) {
    auto candidate = stem;
    candidate += ext;
    if (std::filesystem::is_regular_file(candidate)) return read_cube(h, read_bytes(candidate), exec);
  }
  throw DataError("no payload file found for " + header_path.string());
}

void save_envi(const std::filesystem::path& stem, const HyperCube& cube,
               const EnviWriteOptions& options) {
  const EnviBlob blob = write_cube(cube, options);
  auto hdr = stem;
  hdr += ".hdr";
  auto img = stem;
  img += ".img";
  text::write_file(hdr.string(), blob.header);
  std::ofstream out(img, std::ios::binary);
  if (!out) throw DataError("cannot write " + img.string());
  out.write(reinterpret_cast<const char*>(blob.payload.data()),
            static_cast<std::streamsize>(blob.payload.size()));
}

}  // namespace milkspec
