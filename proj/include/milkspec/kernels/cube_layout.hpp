#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "milkspec/core/envi.hpp"
#include "milkspec/kernels/exec.hpp"

namespace milkspec::kernels {

struct CubeLayout {
  std::size_t lines = 0;
  std::size_t samples = 0;
  std::size_t bands = 0;
  Interleave interleave = Interleave::bsq;
};

/// Element offset of (line, sample, band) in the interleaved file order.
std::size_t interleaved_index(const CubeLayout& layout, std::size_t line, std::size_t sample,
                              std::size_t band);

/// Decodes an interleaved payload into canonical (line, sample, band) order.
/// The parallel path splits the work over bands.
std::vector<double> decode_canonical(std::span<const std::byte> payload, const CubeLayout& layout,
                                     DataType type, ByteOrder order, Exec exec);

/// Inverse of decode_canonical. Values are narrowed to the target type
/// without checks; callers validate ranges first.
std::vector<std::byte> encode_canonical(std::span<const double> values, const CubeLayout& layout,
                                        DataType type, ByteOrder order, Exec exec);

}  // namespace milkspec::kernels
