#include "milkspec/numerics/ols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "milkspec/error.hpp"
#include "milkspec/numerics/distributions.hpp"
#include "milkspec/numerics/eigen.hpp"
#include "milkspec/numerics/linalg.hpp"

namespace milkspec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_constant_column(const Matrix& x, std::size_t c) {
  const double v = x(0, c);
  if (v == 0.0) return false;
  for (std::size_t r = 1; r < x.rows(); ++r)
    if (x(r, c) != v) return false;
  return true;
}

}  // namespace

Matrix add_intercept(const Matrix& x) {
  Matrix out(x.rows(), x.cols() + 1, 1.0);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c + 1) = x(r, c);
  return out;
}

MomentStats residual_moments(std::span<const double> e) {
  const double n = static_cast<double>(e.size());
  const double m = mean(e);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : e) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 == 0.0) return {kNaN, kNaN};
  return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
}

double durbin_watson(std::span<const double> e) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    den += e[i] * e[i];
    if (i > 0) num += (e[i] - e[i - 1]) * (e[i] - e[i - 1]);
  }
  return den == 0.0 ? kNaN : num / den;
}

NormalityTest jarque_bera(std::span<const double> e) {
  const auto [s, k] = residual_moments(e);
  const double n = static_cast<double>(e.size());
  const double jb = n / 6.0 * (s * s + (k - 3.0) * (k - 3.0) / 4.0);
  if (!std::isfinite(jb)) return {kNaN, kNaN};
  return {jb, dist::chi2_sf(jb, 2.0)};
}

NormalityTest omnibus_normality(std::span<const double> e) {
  const double n = static_cast<double>(e.size());
  if (e.size() < 8) return {kNaN, kNaN};
  const auto [b1, b2] = residual_moments(e);
  if (!std::isfinite(b1)) return {kNaN, kNaN};

  // skewness statistic
  const double y = b1 * std::sqrt((n + 1) * (n + 3) / (6.0 * (n - 2)));
  const double beta2 = 3.0 * (n * n + 27 * n - 70) * (n + 1) * (n + 3) / ((n - 2) * (n + 5) * (n + 7) * (n + 9));
  const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
  const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
  const double alpha = std::sqrt(2.0 / (w2 - 1.0));
  const double zs = delta * std::asinh(y / alpha);

  // kurtosis statistic
  const double ek = 3.0 * (n - 1) / (n + 1);
  const double varb2 = 24.0 * n * (n - 2) * (n - 3) / ((n + 1) * (n + 1) * (n + 3) * (n + 5));
  const double x = (b2 - ek) / std::sqrt(varb2);
  const double sqrtbeta1 =
      6.0 * (n * n - 5 * n + 2) / ((n + 7) * (n + 9)) * std::sqrt(6.0 * (n + 3) * (n + 5) / (n * (n - 2) * (n - 3)));
  const double a = 6.0 + 8.0 / sqrtbeta1 * (2.0 / sqrtbeta1 + std::sqrt(1.0 + 4.0 / (sqrtbeta1 * sqrtbeta1)));
  const double term1 = 1.0 - 2.0 / (9.0 * a);
  const double denom = 1.0 + x * std::sqrt(2.0 / (a - 4.0));
  if (denom == 0.0) return {kNaN, kNaN};
  const double term2 = std::copysign(std::cbrt((1.0 - 2.0 / a) / std::abs(denom)), denom);
  const double zk = (term1 - term2) / std::sqrt(2.0 / (9.0 * a));

  const double k2 = zs * zs + zk * zk;
  return {k2, dist::chi2_sf(k2, 2.0)};
}

double scaled_condition_number(const Matrix& x) {
  Matrix s = x;
  for (std::size_t c = 0; c < s.cols(); ++c) {
    double nrm = 0.0;
    for (std::size_t r = 0; r < s.rows(); ++r) nrm += s(r, c) * s(r, c);
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) return std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < s.rows(); ++r) s(r, c) /= nrm;
  }
  const auto eig = sym_eigen(gram(s));
  const double hi = eig.eigenvalues.front(), lo = eig.eigenvalues.back();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(hi / lo);
}

OlsSummary ols_fit(const Matrix& x, std::span<const double> y, const std::vector<std::string>& names,
                   const OlsOptions& options) {
  const std::size_t n = x.rows(), k = x.cols();
  if (y.size() != n) throw std::invalid_argument("ols_fit: y length differs from design rows");
  if (names.size() != k) throw std::invalid_argument("ols_fit: one name per design column required");
  if (k == 0) throw std::invalid_argument("ols_fit: empty design");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw std::invalid_argument("ols_fit: alpha must lie in (0, 1)");
  if (n <= k) throw DegenerateError(fmt::format("ols_fit: need more observations ({}) than parameters ({})", n, k));
  for (double v : x.data())
    if (!std::isfinite(v)) throw std::invalid_argument("ols_fit: non-finite design value");
  for (double v : y)
    if (!std::isfinite(v)) throw std::invalid_argument("ols_fit: non-finite response");

  const HouseholderQr qr(x);
  if (!qr.full_rank(options.rank_tolerance)) throw DegenerateError("ols_fit: design matrix is rank deficient");
  const std::vector<double> beta = qr.solve(y);

  OlsSummary s;
  s.dependent = options.dependent;
  s.alpha = options.alpha;
  s.n_obs = n;
  s.fitted = x * std::span<const double>(beta);
  s.residuals.resize(n);
  double ssr = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.residuals[i] = y[i] - s.fitted[i];
    ssr += s.residuals[i] * s.residuals[i];
    yy += y[i] * y[i];
  }
  for (std::size_t c = 0; c < k && !s.has_intercept; ++c) s.has_intercept = is_constant_column(x, c);

  const double tol = options.exact_fit_tolerance;
  s.degenerate = ssr <= tol * tol * yy;
  if (s.degenerate) {
    ssr = 0.0;
    std::fill(s.residuals.begin(), s.residuals.end(), 0.0);
    s.fitted.assign(y.begin(), y.end());
  }

  const double dn = static_cast<double>(n);
  s.df_resid = dn - static_cast<double>(k);
  s.df_model = static_cast<double>(k) - (s.has_intercept ? 1.0 : 0.0);
  const double ybar = mean(y);
  double tss = 0.0;
  for (double v : y) tss += s.has_intercept ? (v - ybar) * (v - ybar) : v * v;

  s.r_squared = tss > 0.0 ? 1.0 - ssr / tss : kNaN;
  const double df_total = s.has_intercept ? dn - 1.0 : dn;
  s.adj_r_squared = tss > 0.0 ? 1.0 - (df_total / s.df_resid) * (1.0 - s.r_squared) : kNaN;

  const double sigma2 = ssr / s.df_resid;
  const Matrix rinv = qr.r_inverse();
  const double tq = dist::t_quantile(1.0 - options.alpha / 2.0, s.df_resid);
  s.coefficients.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    double v = 0.0;
    for (std::size_t c = j; c < k; ++c) v += rinv(j, c) * rinv(j, c);
    OlsCoefficient& co = s.coefficients[j];
    co.name = names[j];
    co.coef = beta[j];
    co.std_err = std::sqrt(sigma2 * v);
    if (co.std_err > 0.0) {
      co.t = co.coef / co.std_err;
      co.p_value = dist::t_two_sided_p(co.t, s.df_resid);
    } else {
      co.t = kNaN;
      co.p_value = kNaN;
    }
    co.ci_low = co.coef - tq * co.std_err;
    co.ci_high = co.coef + tq * co.std_err;
  }

  if (s.df_model > 0.0 && !s.degenerate) {
    const double ess = tss - ssr;
    s.f_statistic = (ess / s.df_model) / sigma2;
    s.f_p_value = dist::f_sf(std::max(0.0, s.f_statistic), s.df_model, s.df_resid);
  } else {
    s.f_statistic = s.f_p_value = kNaN;
  }

  s.condition_number = scaled_condition_number(x);

  if (s.degenerate) {
    s.log_likelihood = s.aic = s.bic = kNaN;
    s.durbin_watson = s.omnibus = s.omnibus_p = s.jarque_bera = s.jb_p = s.skew = s.kurtosis = kNaN;
    return s;
  }
  const double kk = static_cast<double>(k);
  s.log_likelihood = -dn / 2.0 * (std::log(2.0 * std::numbers::pi) + std::log(ssr / dn) + 1.0);
  s.aic = 2.0 * kk - 2.0 * s.log_likelihood;
  s.bic = kk * std::log(dn) - 2.0 * s.log_likelihood;
  s.durbin_watson = durbin_watson(s.residuals);
  const auto m = residual_moments(s.residuals);
  s.skew = m.skew;
  s.kurtosis = m.kurtosis;
  const auto jb = jarque_bera(s.residuals);
  s.jarque_bera = jb.statistic;
  s.jb_p = jb.p_value;
  const auto om = omnibus_normality(s.residuals);
  s.omnibus = om.statistic;
  s.omnibus_p = om.p_value;
  return s;
}

namespace {

std::string num(double v, const char* spec) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format(fmt::runtime(spec), v);
}

std::string pair_cell(std::string_view label, std::string_view value, std::size_t width) {
  const std::size_t used = label.size() + value.size();
  return std::string(label) + std::string(used < width ? width - used : 1, ' ') + std::string(value);
}

}  // namespace

std::string OlsSummary::render_text() const {
  std::size_t name_w = 5;
  for (const auto& c : coefficients) name_w = std::max(name_w, c.name.size());
  const std::size_t table_w = name_w + 2 + 10 + 11 + 11 + 11 + 12 + 12;
  const std::size_t width = std::max<std::size_t>(78, table_w);
  const std::size_t half = width / 2 - 1;
  const std::string heavy(width, '='), light(width, '-');

  std::string out;
  const std::string title = "OLS Regression Results";
  out += std::string((width - title.size()) / 2, ' ') + title + "\n" + heavy + "\n";
  auto row2 = [&](std::string_view l1, const std::string& v1, std::string_view l2, const std::string& v2) {
    std::string line = pair_cell(l1, v1, half);
    line += "   ";
    if (!l2.empty()) line += pair_cell(l2, v2, width - half - 3);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  };
  row2("Dep. Variable:", dependent, "R-squared:", num(r_squared, "{:.3f}"));
  row2("Model:", "OLS", "Adj. R-squared:", num(adj_r_squared, "{:.3f}"));
  row2("Method:", "Least Squares", "F-statistic:", num(f_statistic, "{:.4g}"));
  row2("No. Observations:", std::to_string(n_obs), "Prob (F-statistic):", num(f_p_value, "{:.3g}"));
  row2("Df Residuals:", num(df_resid, "{:.0f}"), "Log-Likelihood:", num(log_likelihood, "{:.5g}"));
  row2("Df Model:", num(df_model, "{:.0f}"), "AIC:", num(aic, "{:.4g}"));
  row2("Covariance Type:", "nonrobust", "BIC:", num(bic, "{:.4g}"));
  out += heavy + "\n";

  const std::string lo = fmt::format("[{:g}", alpha / 2.0), hi = fmt::format("{:g}]", 1.0 - alpha / 2.0);
  out += fmt::format("{:<{}}{:>10}{:>11}{:>11}{:>11}{:>12}{:>12}\n", "", name_w + 2, "coef", "std err", "t", "P>|t|",
                     lo, hi);
  out += light + "\n";
  for (const auto& c : coefficients)
    out += fmt::format("{:<{}}{:>10}{:>11}{:>11}{:>11}{:>12}{:>12}\n", c.name, name_w + 2, num(c.coef, "{:.4f}"),
                       num(c.std_err, "{:.3f}"), num(c.t, "{:.3f}"), num(c.p_value, "{:.3f}"),
                       num(c.ci_low, "{:.3f}"), num(c.ci_high, "{:.3f}"));
  out += heavy + "\n";
  row2("Omnibus:", num(omnibus, "{:.3f}"), "Durbin-Watson:", num(durbin_watson, "{:.3f}"));
  row2("Prob(Omnibus):", num(omnibus_p, "{:.3f}"), "Jarque-Bera (JB):", num(jarque_bera, "{:.3f}"));
  row2("Skew:", num(skew, "{:.3f}"), "Prob(JB):", num(jb_p, "{:.3g}"));
  row2("Kurtosis:", num(kurtosis, "{:.3f}"), "Cond. No.", num(condition_number, "{:.3g}"));
  out += heavy + "\n";
  if (degenerate) out += "Note: exact fit; residual diagnostics are undefined.\n";
  return out;
}

std::string OlsSummary::render_json(int indent) const {
  using nlohmann::json;
  auto v = [](double d) -> json { return std::isfinite(d) ? json(d) : json(nullptr); };
  json coefs = json::array();
  for (const auto& c : coefficients)
    coefs.push_back({{"name", c.name}, {"coef", v(c.coef)}, {"std_err", v(c.std_err)}, {"t", v(c.t)},
                     {"p_value", v(c.p_value)}, {"ci_low", v(c.ci_low)}, {"ci_high", v(c.ci_high)}});
  json j = {{"dependent", dependent},
            {"n_obs", n_obs},
            {"df_model", v(df_model)},
            {"df_resid", v(df_resid)},
            {"has_intercept", has_intercept},
            {"coefficients", coefs},
            {"r_squared", v(r_squared)},
            {"adj_r_squared", v(adj_r_squared)},
            {"f_statistic", v(f_statistic)},
            {"f_p_value", v(f_p_value)},
            {"log_likelihood", v(log_likelihood)},
            {"aic", v(aic)},
            {"bic", v(bic)},
            {"durbin_watson", v(durbin_watson)},
            {"omnibus", v(omnibus)},
            {"omnibus_p", v(omnibus_p)},
            {"jarque_bera", v(jarque_bera)},
            {"jb_p", v(jb_p)},
            {"skew", v(skew)},
            {"kurtosis", v(kurtosis)},
            {"condition_number", v(condition_number)},
            {"degenerate", degenerate}};
  return j.dump(indent);
}

}  // namespace milkspec
