#include "milkspec/kernels/covariance.hpp"

#include <cstddef>
#include <stdexcept>

namespace milkspec::kernels {

Matrix covariance(const Matrix& centered, Exec exec) {
  const std::size_t n = centered.rows();
  const std::size_t p = centered.cols();
  if (n < 2) throw std::invalid_argument("covariance: need at least 2 rows");
  const Matrix cols = centered.transpose();  // contiguous columns
  Matrix cov(p, p);
  const double denom = static_cast<double>(n - 1);
  const auto pp = static_cast<std::ptrdiff_t>(p);

  auto row_of_output = [&](std::size_t i) {
    const auto xi = cols.row(i);
    for (std::size_t j = i; j < p; ++j) {
      const auto xj = cols.row(j);
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += xi[r] * xj[r];
      cov(i, j) = s / denom;
    }
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < pp; ++i) row_of_output(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < pp; ++i) row_of_output(static_cast<std::size_t>(i));
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) cov(i, j) = cov(j, i);
  return cov;
}

}  // namespace milkspec::kernels
