#pragma once

#include <cstdint>
#include <vector>

#include "milkspec/features/glcm.hpp"

namespace milkspec::kernels {

/// Symmetric co-occurrence counts (levels × levels, row-major). Counts are
/// integers, so the parallel reduction is exact.
std::vector<std::uint64_t> glcm_counts(const LevelPlane& plane, GlcmOffset offset, Exec exec);

}  // namespace milkspec::kernels
