#include "milkspec/numerics/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace milkspec {

HouseholderQr::HouseholderQr(const Matrix& a) : m_(a.rows()), n_(a.cols()), work_(a) {
  if (m_ < n_) throw std::invalid_argument("HouseholderQr: needs rows >= cols");
  v_.resize(n_);
  for (std::size_t k = 0; k < n_; ++k) {
    std::vector<double> v(m_ - k);
    for (std::size_t i = k; i < m_; ++i) v[i - k] = work_(i, k);
    const double norm = norm2(v);
    if (norm == 0.0) {
      v_[k].assign(m_ - k, 0.0);
      continue;
    }
    const double alpha = v[0] > 0.0 ? -norm : norm;
    v[0] -= alpha;
    const double vnorm = norm2(v);
    for (double& x : v) x /= vnorm;
    for (std::size_t j = k; j < n_; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < m_; ++i) s += v[i - k] * work_(i, j);
      for (std::size_t i = k; i < m_; ++i) work_(i, j) -= 2.0 * s * v[i - k];
    }
    work_(k, k) = alpha;
    for (std::size_t i = k + 1; i < m_; ++i) work_(i, k) = 0.0;
    v_[k] = std::move(v);
  }
}

std::size_t HouseholderQr::rank(double rel_tol) const {
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n_; ++i) max_diag = std::max(max_diag, std::abs(work_(i, i)));
  std::size_t r = 0;
  for (std::size_t i = 0; i < n_; ++i)
    if (std::abs(work_(i, i)) > rel_tol * max_diag) ++r;
  return r;
}

std::vector<double> HouseholderQr::apply_qt(std::span<const double> b) const {
  if (b.size() != m_) throw std::invalid_argument("HouseholderQr: rhs length mismatch");
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t k = 0; k < n_; ++k) {
    const auto& v = v_[k];
    double s = 0.0;
    for (std::size_t i = k; i < m_; ++i) s += v[i - k] * y[i];
    for (std::size_t i = k; i < m_; ++i) y[i] -= 2.0 * s * v[i - k];
  }
  return y;
}

std::vector<double> HouseholderQr::solve(std::span<const double> b) const {
  const auto y = apply_qt(b);
  return back_substitute(r(), std::span<const double>(y).first(n_));
}

Matrix HouseholderQr::r() const {
  Matrix out(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i; j < n_; ++j) out(i, j) = work_(i, j);
  return out;
}

Matrix HouseholderQr::r_inverse() const {
  const Matrix rr = r();
  Matrix inv(n_, n_);
  for (std::size_t c = 0; c < n_; ++c) {
    std::vector<double> e(n_, 0.0);
    e[c] = 1.0;
    const auto col = back_substitute(rr, e);
    for (std::size_t i = 0; i < n_; ++i) inv(i, c) = col[i];
  }
  return inv;
}

std::vector<double> back_substitute(const Matrix& r, std::span<const double> b) {
  const std::size_t n = r.cols();
  std::vector<double> x(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= r(ii, j) * x[j];
    x[ii] = s / r(ii, ii);
  }
  return x;
}

}  // namespace milkspec
