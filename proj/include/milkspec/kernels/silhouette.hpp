#pragma once

#include <span>
#include <vector>

#include "milkspec/core/matrix.hpp"
#include "milkspec/kernels/exec.hpp"

namespace milkspec::kernels {

/// Per-point silhouette values for labels 0..k−1 (every label present).
/// Points in singleton clusters score 0. O(n²) distances, parallel over
/// points; each point's sums run in row order so both paths agree exactly.
std::vector<double> silhouette_values(const Matrix& data, std::span<const int> labels, int k, Exec exec);

/// Squared distance from every row to its nearest centroid; ties keep the
/// lowest centroid index. Writes assignments, returns per-row distances.
std::vector<double> assign_nearest(const Matrix& data, const Matrix& centroids, std::vector<int>& assignments,
                                   Exec exec);

}  // namespace milkspec::kernels
