#include "milkspec/kernels/silhouette.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace milkspec::kernels {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(s);
}

}  // namespace

std::vector<double> silhouette_values(const Matrix& data, std::span<const int> labels, int k, Exec exec) {
  const std::size_t n = data.rows();
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  std::vector<double> s(n, 0.0);

  auto one = [&](std::size_t i) {
    const auto own = static_cast<std::size_t>(labels[i]);
    if (sizes[own] < 2) return;
    std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) sums[static_cast<std::size_t>(labels[j])] += distance(data.row(i), data.row(j));
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sums.size(); ++c)
      if (c != own && sizes[c] > 0) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    const double m = std::max(a, b);
    s[i] = m > 0.0 ? (b - a) / m : 0.0;
  };

  const auto nn = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < nn; ++i) one(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < nn; ++i) one(static_cast<std::size_t>(i));
  }
  return s;
}

std::vector<double> assign_nearest(const Matrix& data, const Matrix& centroids, std::vector<int>& assignments,
                                   Exec exec) {
  const std::size_t n = data.rows(), k = centroids.rows();
  assignments.resize(n);
  std::vector<double> best(n);
  auto one = [&](std::size_t i) {
    const auto row = data.row(i);
    double bd = std::numeric_limits<double>::infinity();
    int bc = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const auto ctr = centroids.row(c);
      double d = 0.0;
      for (std::size_t f = 0; f < row.size(); ++f) d += (row[f] - ctr[f]) * (row[f] - ctr[f]);
      if (d < bd) bd = d, bc = static_cast<int>(c);
    }
    assignments[i] = bc;
    best[i] = bd;
  };
  const auto nn = static_cast<std::ptrdiff_t>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < nn; ++i) one(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < nn; ++i) one(static_cast<std::size_t>(i));
  }
  return best;
}

}  // namespace milkspec::kernels
