#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "milkspec/core/matrix.hpp"

namespace milkspec {

struct LassoOptions {
  int max_sweeps = 10000;
  /// Converged once no coefficient moves by more than this in a sweep.
  double tolerance = 1e-8;
};

struct LassoResult {
  double intercept = 0.0;
  std::vector<double> coefficients;
  int sweeps = 0;
  /// ½‖y − Xβ‖² + λ‖β‖₁ after each sweep (centred problem).
  std::vector<double> objective_history;
};

/// Cyclic coordinate descent with soft-thresholding. X and y are centred
/// internally so the intercept is not penalized. Throws
/// std::invalid_argument for a negative lambda or a shape mismatch and
/// DegenerateError when the sweep limit is reached.
LassoResult lasso_fit(const Matrix& x, std::span<const double> y, double lambda, const LassoOptions& options = {});

/// max |Xᵀy| over the centred data; every coefficient is zero above it.
double lasso_lambda_max(const Matrix& x, std::span<const double> y);

std::vector<double> lasso_predict(const LassoResult& model, const Matrix& x);

double soft_threshold(double z, double gamma);

struct PlsOptions {
  int max_iterations = 500;
  double tolerance = 1e-12;
  double rank_tolerance = 1e-10;
};

struct PlsModel {
  std::size_t n_components = 0;
  Matrix x_weights;    // W, predictors × components
  Matrix x_loadings;   // P
  Matrix y_loadings;   // Q, responses × components
  Matrix x_scores;     // T, samples × components
  Matrix coefficients; // B = W (PᵀW)⁻¹ Qᵀ, predictors × responses
  std::vector<double> x_means;
  std::vector<double> y_means;
};

/// NIPALS partial least squares. Throws DegenerateError when a response has
/// zero variance or n_components exceeds the rank of the centred X.
PlsModel pls_fit(const Matrix& x, const Matrix& y, std::size_t n_components, const PlsOptions& options = {});
PlsModel pls_fit(const Matrix& x, std::span<const double> y, std::size_t n_components, const PlsOptions& options = {});

/// samples × responses predictions.
Matrix pls_predict(const PlsModel& model, const Matrix& x);

/// Numerical rank of a matrix of any shape.
std::size_t matrix_rank(const Matrix& a, double rel_tol = 1e-10);

}  // namespace milkspec
