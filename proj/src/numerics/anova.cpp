#include "milkspec/numerics/anova.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "milkspec/core/matrix.hpp"
#include "milkspec/error.hpp"
#include "milkspec/numerics/distributions.hpp"
#include "milkspec/numerics/linalg.hpp"

namespace milkspec {

namespace {

// F and p for an effect against the residual mean square; a zero residual
// mean square gives F = inf, p = 0 for a real effect and F = 0, p = 1 for
// none.
void finish_effect(AnovaEffect& e, double ms_resid, int df_resid, bool& degenerate, double tol) {
  if (e.ss <= tol) e.ss = 0.0;
  if (e.df <= 0) {
    e.ss = e.ms = e.f = 0.0;
    e.p_value = 1.0;
    return;
  }
  e.ms = e.ss / e.df;
  if (ms_resid <= 0.0) {
    degenerate = true;
    if (e.ss > 0.0) {
      e.f = std::numeric_limits<double>::infinity();
      e.p_value = 0.0;
    } else {
      e.f = 0.0;
      e.p_value = 1.0;
    }
    return;
  }
  e.f = e.ms / ms_resid;
  e.p_value = std::clamp(dist::f_sf(e.f, e.df, df_resid), 0.0, 1.0);
}

// Sums of squares below this are rounding noise of an exact fit.
double zero_tolerance(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return 1e-24 * s;
}

double ss_about_mean(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s;
}

std::vector<std::size_t> encode(std::span<const std::string> labels, std::size_t& levels) {
  std::map<std::string, std::size_t> index;
  for (const auto& l : labels) index.emplace(l, 0);
  std::size_t k = 0;
  for (auto& [_, v] : index) v = k++;
  levels = k;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(index.at(l));
  return out;
}

}  // namespace

AnovaOneWay anova_oneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw std::invalid_argument("anova_oneway: need at least 2 groups");
  std::vector<double> all;
  for (const auto& g : groups) {
    if (g.size() < 2) throw std::invalid_argument("anova_oneway: every group needs at least 2 values");
    all.insert(all.end(), g.begin(), g.end());
  }
  const double grand = mean(all);
  AnovaOneWay r;
  for (const auto& g : groups) {
    const double m = mean(g);
    r.ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    r.ss_within += ss_about_mean(g);
  }
  const double tol = zero_tolerance(all);
  if (r.ss_within <= tol) r.ss_within = 0.0;
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(all.size() - groups.size());
  AnovaEffect e{"between", r.df_between, r.ss_between};
  finish_effect(e, r.ss_within / r.df_within, r.df_within, r.degenerate, tol);
  r.f = e.f;
  r.p_value = e.p_value;
  return r;
}

AnovaTwoWay anova_twoway(std::span<const double> values, std::span<const std::string> factor_a,
                         std::span<const std::string> factor_b, bool interaction) {
  const std::size_t n = values.size();
  if (factor_a.size() != n || factor_b.size() != n)
    throw std::invalid_argument("anova_twoway: label count differs from value count");
  std::size_t la = 0, lb = 0;
  const auto a = encode(factor_a, la);
  const auto b = encode(factor_b, lb);
  if (la < 2 || lb < 2) throw DegenerateError("anova_twoway: each factor needs at least 2 levels");

  std::vector<std::vector<double>> cells(la * lb), by_a(la), by_b(lb);
  for (std::size_t i = 0; i < n; ++i) {
    cells[a[i] * lb + b[i]].push_back(values[i]);
    by_a[a[i]].push_back(values[i]);
    by_b[b[i]].push_back(values[i]);
  }
  const bool full = std::all_of(cells.begin(), cells.end(), [](const auto& c) { return !c.empty(); });
  if (interaction && !full) throw DataError("anova_twoway: empty cell with interaction requested");
  const bool balanced = full && std::all_of(cells.begin(), cells.end(),
                                            [&](const auto& c) { return c.size() == cells[0].size(); });

  const double sst = ss_about_mean(values);
  double rss_a = 0.0;  // residual after the A main effect
  for (const auto& g : by_a) rss_a += ss_about_mean(g);
  double rss_cells = 0.0;
  for (const auto& c : cells)
    if (!c.empty()) rss_cells += ss_about_mean(c);

  double rss_ab = 0.0;  // residual after A + B
  if (balanced) {
    double ss_b = 0.0;
    const double grand = mean(values);
    for (const auto& g : by_b) ss_b += static_cast<double>(g.size()) * (mean(g) - grand) * (mean(g) - grand);
    rss_ab = rss_a - ss_b;
  } else {
    Matrix x(n, la + lb - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      x(i, 0) = 1.0;
      if (a[i] > 0) x(i, a[i]) = 1.0;
      if (b[i] > 0) x(i, la - 1 + b[i]) = 1.0;
    }
    const HouseholderQr qr(x);
    const auto beta = qr.solve(values);
    const auto fit = x * std::span<const double>(beta);
    for (std::size_t i = 0; i < n; ++i) rss_ab += (values[i] - fit[i]) * (values[i] - fit[i]);
  }

  AnovaTwoWay r;
  r.balanced = balanced;
  r.a = {"A", static_cast<int>(la) - 1, sst - rss_a};
  r.b = {"B", static_cast<int>(lb) - 1, rss_a - rss_ab};
  const std::size_t params = interaction ? la * lb : la + lb - 1;
  if (n <= params) throw DegenerateError("anova_twoway: no residual degrees of freedom");
  r.df_residual = static_cast<int>(n - params);
  if (interaction) {
    r.interaction = {"A:B", static_cast<int>((la - 1) * (lb - 1)), rss_ab - rss_cells};
    r.ss_residual = rss_cells;
  } else {
    r.interaction = {"A:B", 0, 0.0};
    r.ss_residual = rss_ab;
  }
  const double tol = zero_tolerance(values);
  if (r.ss_residual <= tol) r.ss_residual = 0.0;
  r.ms_residual = r.ss_residual / r.df_residual;
  finish_effect(r.a, r.ms_residual, r.df_residual, r.degenerate, tol);
  finish_effect(r.b, r.ms_residual, r.df_residual, r.degenerate, tol);
  finish_effect(r.interaction, r.ms_residual, r.df_residual, r.degenerate, tol);
  return r;
}

std::string format_effect_p_table(const std::vector<EffectPRow>& rows) {
  std::size_t w = std::string("Parameter").size();
  for (const auto& r : rows) w = std::max(w, r.parameter.size());
  std::string out = fmt::format("{:<{}}  {:>12}  {:>8}  {:>8}\n", "Parameter", w, "TIME_p", "GROUP_p", "INT_p");
  for (const auto& r : rows)
    out += fmt::format("{:<{}}  {:>12.6e}  {:>8.6f}  {:>8.6f}\n", r.parameter, w, r.result.a.p_value,
                       r.result.b.p_value, r.result.interaction.p_value);
  return out;
}

}  // namespace milkspec
