#include "milkspec/kernels/glcm_counts.hpp"

#include <cstddef>

namespace milkspec::kernels {

std::vector<std::uint64_t> glcm_counts(const LevelPlane& plane, GlcmOffset offset, Exec exec) {
  const auto L = static_cast<std::size_t>(plane.levels);
  const auto h = static_cast<std::ptrdiff_t>(plane.height);
  const auto w = static_cast<std::ptrdiff_t>(plane.width);
  const std::ptrdiff_t r_lo = std::max<std::ptrdiff_t>(0, -offset.drow);
  const std::ptrdiff_t r_hi = std::min<std::ptrdiff_t>(h, h - offset.drow);
  const std::ptrdiff_t c_lo = std::max<std::ptrdiff_t>(0, -offset.dcol);
  const std::ptrdiff_t c_hi = std::min<std::ptrdiff_t>(w, w - offset.dcol);
  std::vector<std::uint64_t> counts(L * L, 0);

  auto accumulate_rows = [&](std::ptrdiff_t from, std::ptrdiff_t to, std::vector<std::uint64_t>& acc) {
    for (std::ptrdiff_t r = from; r < to; ++r)
      for (std::ptrdiff_t c = c_lo; c < c_hi; ++c) {
        const std::size_t a = plane.data[static_cast<std::size_t>(r * w + c)];
        const std::size_t b = plane.data[static_cast<std::size_t>((r + offset.drow) * w + c + offset.dcol)];
        ++acc[a * L + b];
        ++acc[b * L + a];
      }
  };

  if (r_lo >= r_hi || c_lo >= c_hi) return counts;
  if (exec == Exec::serial) {
    accumulate_rows(r_lo, r_hi, counts);
    return counts;
  }

#pragma omp parallel
  {
    std::vector<std::uint64_t> local(L * L, 0);
#pragma omp for schedule(static)
    for (std::ptrdiff_t r = r_lo; r < r_hi; ++r) accumulate_rows(r, r + 1, local);
#pragma omp critical
    for (std::size_t i = 0; i < local.size(); ++i) counts[i] += local[i];
  }
  return counts;
}

}  // namespace milkspec::kernels
