#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "milkspec/core/matrix.hpp"

namespace milkspec {

/// Householder QR of a tall matrix (rows ≥ cols), used for least squares.
class HouseholderQr {
 public:
  explicit HouseholderQr(const Matrix& a);

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

  /// Number of |R_ii| above rel_tol · max |R_jj|.
  std::size_t rank(double rel_tol = 1e-10) const;
  bool full_rank(double rel_tol = 1e-10) const { return rank(rel_tol) == n_; }

  /// Qᵀ·b.
  std::vector<double> apply_qt(std::span<const double> b) const;
  /// Least-squares solution of A·x ≈ b.
  std::vector<double> solve(std::span<const double> b) const;
  /// Upper-triangular factor (cols × cols).
  Matrix r() const;
  /// R⁻¹, so that (AᵀA)⁻¹ = R⁻¹·R⁻ᵀ.
  Matrix r_inverse() const;

 private:
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  Matrix work_;                          // R in the upper triangle
  std::vector<std::vector<double>> v_;   // Householder vectors (unit norm)
};

/// Solves the upper-triangular system R·x = b.
std::vector<double> back_substitute(const Matrix& r, std::span<const double> b);

}  // namespace milkspec
