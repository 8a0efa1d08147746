#include "milkspec/learn/cluster.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "milkspec/error.hpp"
#include "milkspec/kernels/silhouette.hpp"
#include "milkspec/learn/rng.hpp"

namespace milkspec {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return s;
}

std::size_t distinct_rows(const Matrix& data) {
  std::set<std::vector<double>> rows;
  for (std::size_t r = 0; r < data.rows(); ++r) rows.emplace(data.row(r).begin(), data.row(r).end());
  return rows.size();
}

}  // namespace

ClusterResult kmeans(const Matrix& data, const KMeansOptions& options) {
  const std::size_t n = data.rows(), p = data.cols(), k = options.k;
  if (k == 0) throw std::invalid_argument("kmeans: k must be positive");
  if (n == 0) throw std::invalid_argument("kmeans: no data");
  const std::size_t distinct = distinct_rows(data);
  if (k > distinct) throw DegenerateError(fmt::format("kmeans: k = {} exceeds {} distinct rows", k, distinct));

  SplitMix64 rng(options.seed);
  ClusterResult r;
  r.centroids = Matrix(k, p);
  std::vector<std::size_t> chosen{rng.below(n)};
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(data.row(i), data.row(chosen[0]));
  while (chosen.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    const double target = rng.uniform() * total;
    std::size_t pick = n;
    double cum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      cum += d2[i];
      pick = i;
      if (cum > target) break;
    }
    chosen.push_back(pick);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(data.row(i), data.row(pick)));
  }
  for (std::size_t c = 0; c < k; ++c)
    std::copy(data.row(chosen[c]).begin(), data.row(chosen[c]).end(), r.centroids.row(c).begin());

  std::vector<int> previous;
  for (r.iterations = 1; r.iterations <= options.max_iterations; ++r.iterations) {
    auto dist = kernels::assign_nearest(data, r.centroids, r.assignments, options.exec);
    double inertia = 0.0;
    for (double v : dist) inertia += v;
    r.inertia_history.push_back(inertia);
    r.inertia = inertia;
    if (r.assignments == previous) break;
    previous = r.assignments;

    Matrix sums(k, p, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(r.assignments[i]);
      ++counts[c];
      auto s = sums.row(c);
      const auto row = data.row(i);
      for (std::size_t f = 0; f < p; ++f) s[f] += row[f];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i)
          if (dist[i] > dist[far]) far = i;
        std::copy(data.row(far).begin(), data.row(far).end(), r.centroids.row(c).begin());
        dist[far] = 0.0;
        continue;
      }
      for (std::size_t f = 0; f < p; ++f) r.centroids(c, f) = sums(c, f) / static_cast<double>(counts[c]);
    }
  }
  r.iterations = std::min(r.iterations, options.max_iterations);
  return r;
}

double silhouette(const Matrix& data, std::span<const int> assignments, Exec exec) {
  if (assignments.size() != data.rows()) throw std::invalid_argument("silhouette: one label per row required");
  std::map<int, int> index;
  for (int l : assignments) index.emplace(l, 0);
  if (index.size() < 2) throw DegenerateError("silhouette: need at least 2 clusters");
  int next = 0;
  for (auto& [_, v] : index) v = next++;
  std::vector<int> compact(assignments.size());
  for (std::size_t i = 0; i < assignments.size(); ++i) compact[i] = index.at(assignments[i]);
  const auto s = kernels::silhouette_values(data, compact, next, exec);
  double sum = 0.0;
  for (double v : s) sum += v;
  return sum / static_cast<double>(s.size());
}

AnovaOneWay cluster_validate(std::span<const int> assignments, std::span<const double> auxiliary) {
  if (assignments.size() != auxiliary.size())
    throw std::invalid_argument("cluster_validate: one auxiliary value per assignment required");
  std::map<int, std::vector<double>> groups;
  for (std::size_t i = 0; i < assignments.size(); ++i) groups[assignments[i]].push_back(auxiliary[i]);
  std::vector<std::vector<double>> g;
  for (auto& [_, v] : groups) g.push_back(std::move(v));
  return anova_oneway(g);
}

}  // namespace milkspec
