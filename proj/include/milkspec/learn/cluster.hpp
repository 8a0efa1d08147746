#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "milkspec/core/matrix.hpp"
#include "milkspec/kernels/exec.hpp"
#include "milkspec/numerics/anova.hpp"

namespace milkspec {

struct KMeansOptions {
  std::size_t k = 3;
  std::uint64_t seed = 42;
  int max_iterations = 300;
  Exec exec = Exec::parallel;
};

struct ClusterResult {
  std::vector<int> assignments;
  Matrix centroids;  // k × features
  double inertia = 0.0;
  /// Inertia after each assignment step.
  std::vector<double> inertia_history;
  int iterations = 0;
  std::optional<double> silhouette_mean;
  std::optional<double> anova_p;
};

/// k-means++ seeding (D² sampling) followed by Lloyd iterations until the
/// assignments stop changing. An emptied cluster is re-seeded at the point
/// farthest from its centroid. Throws DegenerateError when k exceeds the
/// number of distinct rows and std::invalid_argument for k = 0.
ClusterResult kmeans(const Matrix& data, const KMeansOptions& options);

/// Mean silhouette over all points. Labels need not be contiguous; a
/// singleton cluster contributes 0. Throws DegenerateError for fewer than 2
/// clusters.
double silhouette(const Matrix& data, std::span<const int> assignments, Exec exec = Exec::parallel);

/// One-way ANOVA of `auxiliary` grouped by cluster label (ascending).
AnovaOneWay cluster_validate(std::span<const int> assignments, std::span<const double> auxiliary);

}  // namespace milkspec
