#include "milkspec/numerics/regression.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "milkspec/error.hpp"
#include "milkspec/numerics/linalg.hpp"

namespace milkspec {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

namespace {

std::vector<double> centered(std::span<const double> y, double& m) {
  m = mean(y);
  std::vector<double> out(y.begin(), y.end());
  for (double& v : out) v -= m;
  return out;
}

}  // namespace

double lasso_lambda_max(const Matrix& x, std::span<const double> y) {
  double ym = 0.0;
  const auto yc = centered(y, ym);
  const auto xty = transpose_times(center_columns(x, column_means(x)), yc);
  double m = 0.0;
  for (double v : xty) m = std::max(m, std::abs(v));
  return m;
}

LassoResult lasso_fit(const Matrix& x, std::span<const double> y, double lambda, const LassoOptions& options) {
  const std::size_t n = x.rows(), p = x.cols();
  if (y.size() != n) throw std::invalid_argument("lasso_fit: y length differs from X rows");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lasso_fit: lambda must be non-negative");
  if (n == 0 || p == 0) throw std::invalid_argument("lasso_fit: empty problem");

  const auto xm = column_means(x);
  const Matrix xc = center_columns(x, xm);
  double ym = 0.0;
  const auto yc = centered(y, ym);
  const Matrix cols = xc.transpose();
  std::vector<double> sq(p);
  for (std::size_t j = 0; j < p; ++j) sq[j] = dot(cols.row(j), cols.row(j));

  LassoResult r;
  r.coefficients.assign(p, 0.0);
  std::vector<double> resid = yc;
  auto objective = [&] {
    double l1 = 0.0;
    for (double b : r.coefficients) l1 += std::abs(b);
    return 0.5 * dot(resid, resid) + lambda * l1;
  };

  for (r.sweeps = 1; r.sweeps <= options.max_sweeps; ++r.sweeps) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (sq[j] == 0.0) continue;
      const auto xj = cols.row(j);
      const double old = r.coefficients[j];
      const double rho = dot(xj, resid) + sq[j] * old;
      const double nb = soft_threshold(rho, lambda) / sq[j];
      if (nb != old) {
        const double delta = nb - old;
        for (std::size_t i = 0; i < n; ++i) resid[i] -= delta * xj[i];
        r.coefficients[j] = nb;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    r.objective_history.push_back(objective());
    if (max_change < options.tolerance) break;
  }
  if (r.sweeps > options.max_sweeps)
    throw DegenerateError(fmt::format("lasso_fit: no convergence after {} sweeps", options.max_sweeps));

  r.intercept = ym;
  for (std::size_t j = 0; j < p; ++j) r.intercept -= xm[j] * r.coefficients[j];
  return r;
}

std::vector<double> lasso_predict(const LassoResult& model, const Matrix& x) {
  if (x.cols() != model.coefficients.size()) throw std::invalid_argument("lasso_predict: feature count mismatch");
  auto out = x * std::span<const double>(model.coefficients);
  for (double& v : out) v += model.intercept;
  return out;
}

std::size_t matrix_rank(const Matrix& a, double rel_tol) {
  if (a.empty()) return 0;
  if (a.rows() >= a.cols()) return HouseholderQr(a).rank(rel_tol);
  return HouseholderQr(a.transpose()).rank(rel_tol);
}

PlsModel pls_fit(const Matrix& x, const Matrix& y, std::size_t k, const PlsOptions& options) {
  const std::size_t n = x.rows(), p = x.cols(), m = y.cols();
  if (y.rows() != n) throw std::invalid_argument("pls_fit: X and Y row counts differ");
  if (n < 2 || p == 0 || m == 0) throw std::invalid_argument("pls_fit: empty problem");
  if (k == 0) throw std::invalid_argument("pls_fit: need at least one component");

  PlsModel model;
  model.n_components = k;
  model.x_means = column_means(x);
  model.y_means = column_means(y);
  Matrix xr = center_columns(x, model.x_means);
  Matrix yr = center_columns(y, model.y_means);
  for (std::size_t c = 0; c < m; ++c) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += yr(i, c) * yr(i, c);
    if (ss == 0.0) throw DegenerateError("pls_fit: response has zero variance");
  }
  const std::size_t rank = matrix_rank(xr, options.rank_tolerance);
  if (k > rank) throw DegenerateError(fmt::format("pls_fit: {} components requested but rank of X is {}", k, rank));

  model.x_weights = Matrix(p, k);
  model.x_loadings = Matrix(p, k);
  model.y_loadings = Matrix(m, k);
  model.x_scores = Matrix(n, k);
  const double x_scale = frobenius_norm(xr);

  for (std::size_t a = 0; a < k; ++a) {
    // start from the response column with the largest sum of squares
    std::size_t start = 0;
    double best = -1.0;
    for (std::size_t c = 0; c < m; ++c) {
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) ss += yr(i, c) * yr(i, c);
      if (ss > best) best = ss, start = c;
    }
    std::vector<double> u = yr.column(start);
    std::vector<double> w, t, q, t_old;
    for (int it = 0; it < options.max_iterations; ++it) {
      w = transpose_times(xr, u);
      const double wn = norm2(w);
      if (!(wn > options.rank_tolerance * x_scale * std::max(1.0, norm2(u))))
        throw DegenerateError("pls_fit: residual predictors carry no covariance with the response");
      for (double& v : w) v /= wn;
      t = xr * std::span<const double>(w);
      const double tt = dot(t, t);
      q = transpose_times(yr, t);
      for (double& v : q) v /= tt;
      if (m == 1) break;
      const double qq = dot(q, q);
      u = yr * std::span<const double>(q);
      for (double& v : u) v /= qq;
      if (!t_old.empty()) {
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff += (t[i] - t_old[i]) * (t[i] - t_old[i]);
        if (std::sqrt(diff) <= options.tolerance * std::sqrt(tt)) break;
      }
      t_old = t;
    }
    const double tt = dot(t, t);
    std::vector<double> pl = transpose_times(xr, t);
    for (double& v : pl) v /= tt;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) xr(i, j) -= t[i] * pl[j];
      for (std::size_t c = 0; c < m; ++c) yr(i, c) -= t[i] * q[c];
    }
    model.x_weights.set_column(a, w);
    model.x_loadings.set_column(a, pl);
    model.y_loadings.set_column(a, q);
    model.x_scores.set_column(a, t);
  }

  // B = W (PᵀW)⁻¹ Qᵀ
  const Matrix ptw = model.x_loadings.transpose() * model.x_weights;
  const HouseholderQr qr(ptw);
  Matrix inv(k, k);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> e(k, 0.0);
    e[c] = 1.0;
    inv.set_column(c, qr.solve(e));
  }
  model.coefficients = model.x_weights * inv * model.y_loadings.transpose();
  return model;
}

PlsModel pls_fit(const Matrix& x, std::span<const double> y, std::size_t k, const PlsOptions& options) {
  Matrix ym(y.size(), 1);
  ym.set_column(0, y);
  return pls_fit(x, ym, k, options);
}

Matrix pls_predict(const PlsModel& model, const Matrix& x) {
  if (x.cols() != model.x_means.size()) throw std::invalid_argument("pls_predict: feature count mismatch");
  Matrix out = center_columns(x, model.x_means) * model.coefficients;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t c = 0; c < out.cols(); ++c) out(i, c) += model.y_means[c];
  return out;
}

}  // namespace milkspec
