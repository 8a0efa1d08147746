#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace milkspec {

/// Dense row-major matrix of doubles. Rows are samples throughout the
/// library; columns are features, bands or components.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_columns(const std::vector<std::vector<double>>& columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Matrix transpose() const;
  /// Rows selected by index, in the given order.
  Matrix select_rows(std::span<const std::size_t> idx) const;
  /// Columns selected by index, in the given order.
  Matrix select_cols(std::span<const std::size_t> idx) const;
  /// Leading `n` columns.
  Matrix left_cols(std::size_t n) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);
Matrix operator-(const Matrix& a, const Matrix& b);

/// Aᵀ·A without forming the transpose.
Matrix gram(const Matrix& a);
/// Aᵀ·x.
std::vector<double> transpose_times(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double frobenius_norm(const Matrix& a);

double mean(std::span<const double> v);
/// Sample variance (divisor n−1).
double sample_variance(std::span<const double> v);

/// Per-column means.
std::vector<double> column_means(const Matrix& a);
/// Subtracts `means` from every row.
Matrix center_columns(const Matrix& a, std::span<const double> means);

}  // namespace milkspec
