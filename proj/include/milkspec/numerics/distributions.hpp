#pragma once

namespace milkspec {

/// Reference distributions for p-values. CDFs go through the regularized
/// incomplete beta and gamma functions; survival functions are evaluated
/// directly so small upper-tail probabilities keep their relative accuracy.
namespace dist {

double regularized_beta(double a, double b, double x);
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

double normal_cdf(double x);
double normal_sf(double x);
/// Inverse of normal_cdf for p in (0, 1).
double normal_quantile(double p);

double t_cdf(double x, double df);
double t_sf(double x, double df);
/// P(|T| ≥ |t|).
double t_two_sided_p(double t, double df);
double t_quantile(double p, double df);

double f_cdf(double x, double d1, double d2);
double f_sf(double x, double d1, double d2);

double chi2_cdf(double x, double df);
double chi2_sf(double x, double df);

}  // namespace dist

enum class DistKind { normal, t, f, chi2 };

struct Distribution {
  DistKind kind = DistKind::normal;
  double df1 = 0.0;  // t, F numerator, chi2
  double df2 = 0.0;  // F denominator

  static Distribution normal() { return {}; }
  static Distribution student_t(double df) { return {DistKind::t, df, 0.0}; }
  static Distribution fisher_f(double d1, double d2) { return {DistKind::f, d1, d2}; }
  static Distribution chi_squared(double df) { return {DistKind::chi2, df, 0.0}; }
};

/// CDF in [0, 1]. Throws std::invalid_argument for non-positive degrees of
/// freedom.
double dist_cdf(const Distribution& d, double x);

}  // namespace milkspec
