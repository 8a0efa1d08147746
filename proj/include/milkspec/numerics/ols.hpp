#pragma once

#include <span>
#include <string>
#include <vector>

#include "milkspec/core/matrix.hpp"

namespace milkspec {

struct OlsCoefficient {
  std::string name;
  double coef = 0.0;
  double std_err = 0.0;
  double t = 0.0;
  double p_value = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct OlsOptions {
  double alpha = 0.05;  // confidence interval level is 1 − alpha
  /// Residual sum of squares at or below (tol)²·Σy² counts as an exact fit.
  double exact_fit_tolerance = 1e-12;
  double rank_tolerance = 1e-10;
  std::string dependent = "y";
};

struct OlsSummary {
  std::string dependent;
  double alpha = 0.05;
  std::vector<OlsCoefficient> coefficients;
  std::size_t n_obs = 0;
  double df_model = 0.0;
  double df_resid = 0.0;
  bool has_intercept = false;
  double r_squared = 0.0;
  double adj_r_squared = 0.0;
  double f_statistic = 0.0;
  double f_p_value = 1.0;
  double log_likelihood = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double durbin_watson = 0.0;
  double omnibus = 0.0;
  double omnibus_p = 1.0;
  double jarque_bera = 0.0;
  double jb_p = 1.0;
  double skew = 0.0;
  double kurtosis = 0.0;
  double condition_number = 0.0;
  /// Exact fit: residual diagnostics are NaN.
  bool degenerate = false;
  std::vector<double> fitted;
  std::vector<double> residuals;

  /// Fixed-width report in the familiar regression-results layout.
  std::string render_text() const;
  /// JSON object with snake_case keys; NaN and infinities become null.
  std::string render_json(int indent = 2) const;
};

/// Least squares through Householder QR. X holds the design including any
/// intercept column (a constant non-zero column counts as intercept).
/// Throws std::invalid_argument on shape mismatch and DegenerateError when
/// n ≤ k or X is rank deficient.
OlsSummary ols_fit(const Matrix& x, std::span<const double> y, const std::vector<std::string>& names,
                   const OlsOptions& options = {});

/// Prepends a column of ones.
Matrix add_intercept(const Matrix& x);

struct MomentStats {
  double skew = 0.0;      // biased (population) moments
  double kurtosis = 0.0;  // not excess; 3 for a normal
};
MomentStats residual_moments(std::span<const double> e);

double durbin_watson(std::span<const double> e);

struct NormalityTest {
  double statistic = 0.0;
  double p_value = 1.0;
};

NormalityTest jarque_bera(std::span<const double> e);
/// D'Agostino–Pearson K² with a chi²(2) reference; NaN for n < 8.
NormalityTest omnibus_normality(std::span<const double> e);

/// sqrt(λmax/λmin) of XᵀX after scaling each column of X to unit norm.
double scaled_condition_number(const Matrix& x);

}  // namespace milkspec
