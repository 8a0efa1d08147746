#include "milkspec/kernels/cube_layout.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

namespace milkspec::kernels {
namespace {

constexpr bool host_little = std::endian::native == std::endian::little;

template <typename U>
U byteswap(U v) {
  U out = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out = static_cast<U>((out << 8) | (v & 0xFF));
    v = static_cast<U>(v >> 8);
  }
  return out;
}

template <typename U>
U load(const std::byte* p, bool swap) {
  U v;
  std::memcpy(&v, p, sizeof(U));
  return swap ? byteswap(v) : v;
}

template <typename U>
void store(std::byte* p, U v, bool swap) {
  if (swap) v = byteswap(v);
  std::memcpy(p, &v, sizeof(U));
}

double decode_one(const std::byte* p, DataType type, bool swap) {
  if (type == DataType::uint16) return static_cast<double>(load<std::uint16_t>(p, swap));
  return static_cast<double>(std::bit_cast<float>(load<std::uint32_t>(p, swap)));
}

void encode_one(std::byte* p, double v, DataType type, bool swap) {
  if (type == DataType::uint16) {
    store<std::uint16_t>(p, static_cast<std::uint16_t>(v), swap);
  } else {
    store<std::uint32_t>(p, std::bit_cast<std::uint32_t>(static_cast<float>(v)), swap);
  }
}

bool needs_swap(ByteOrder order) { return (order == ByteOrder::little) != host_little; }

}  // namespace

std::size_t interleaved_index(const CubeLayout& l, std::size_t line, std::size_t sample,
                              std::size_t band) {
  switch (l.interleave) {
    case Interleave::bsq: return (band * l.lines + line) * l.samples + sample;
    case Interleave::bil: return (line * l.bands + band) * l.samples + sample;
    case Interleave::bip: break;
  }
  return (line * l.samples + sample) * l.bands + band;
}

std::vector<double> decode_canonical(std::span<const std::byte> payload, const CubeLayout& layout,
                                     DataType type, ByteOrder order, Exec exec) {
  const std::size_t esize = element_size(type);
  const bool swap = needs_swap(order);
  std::vector<double> out(layout.lines * layout.samples * layout.bands);
  const auto bands = static_cast<std::ptrdiff_t>(layout.bands);

  auto one_band = [&](std::size_t b) {
    for (std::size_t l = 0; l < layout.lines; ++l)
      for (std::size_t s = 0; s < layout.samples; ++s) {
        const std::size_t src = interleaved_index(layout, l, s, b);
        out[(l * layout.samples + s) * layout.bands + b] =
            decode_one(payload.data() + src * esize, type, swap);
      }
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < bands; ++b) one_band(static_cast<std::size_t>(b));
  } else {
    for (std::ptrdiff_t b = 0; b < bands; ++b) one_band(static_cast<std::size_t>(b));
  }
  return out;
}

std::vector<std::byte> encode_canonical(std::span<const double> values, const CubeLayout& layout,
                                        DataType type, ByteOrder order, Exec exec) {
  const std::size_t esize = element_size(type);
  const bool swap = needs_swap(order);
  std::vector<std::byte> out(values.size() * esize);
  const auto bands = static_cast<std::ptrdiff_t>(layout.bands);

  auto one_band = [&](std::size_t b) {
    for (std::size_t l = 0; l < layout.lines; ++l)
      for (std::size_t s = 0; s < layout.samples; ++s) {
        const std::size_t dst = interleaved_index(layout, l, s, b);
        encode_one(out.data() + dst * esize, values[(l * layout.samples + s) * layout.bands + b],
                   type, swap);
      }
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < bands; ++b) one_band(static_cast<std::size_t>(b));
  } else {
    for (std::ptrdiff_t b = 0; b < bands; ++b) one_band(static_cast<std::size_t>(b));
  }
  return out;
}

}  // namespace milkspec::kernels
