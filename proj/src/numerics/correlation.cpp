#include "milkspec/numerics/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "milkspec/error.hpp"
#include "milkspec/numerics/distributions.hpp"
#include "milkspec/util/text.hpp"

namespace milkspec {

std::string to_string(CorrelationMethod m) {
  switch (m) {
    case CorrelationMethod::pearson: return "pearson";
    case CorrelationMethod::spearman: return "spearman";
    case CorrelationMethod::kendall: return "kendall";
  }
  return "?";
}

CorrelationMethod parse_correlation_method(std::string_view s) {
  const std::string v = text::to_lower(text::trim(s));
  if (v == "pearson") return CorrelationMethod::pearson;
  if (v == "spearman") return CorrelationMethod::spearman;
  if (v == "kendall" || v == "tau") return CorrelationMethod::kendall;
  throw ConfigError("unknown correlation method: " + std::string(s));
}

std::string to_string(PCorrection c) {
  return c == PCorrection::none ? "none" : "benjamini_hochberg";
}

PCorrection parse_p_correction(std::string_view s) {
  const std::string v = text::to_lower(text::trim(s));
  if (v == "none") return PCorrection::none;
  if (v == "benjamini_hochberg" || v == "bh" || v == "fdr_bh") return PCorrection::benjamini_hochberg;
  throw ConfigError("unknown p-value correction: " + std::string(s));
}

namespace {

void check_inputs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("correlation: inputs differ in length");
  if (x.size() < 3) throw std::invalid_argument("correlation: need at least 3 observations");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw std::invalid_argument("correlation: non-finite input");
}

CorrelationResult pearson_impl(std::span<const double> x, std::span<const double> y, CorrelationMethod tag) {
  const std::size_t n = x.size();
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateError("correlation: zero variance input");
  double r = sxy / std::sqrt(sxx * syy);
  CorrelationResult out{tag, r, 1.0, n};
  if (std::abs(r) >= 1.0) {
    out.coefficient = r > 0 ? 1.0 : -1.0;
    out.p_value = 0.0;
    return out;
  }
  const double df = static_cast<double>(n - 2);
  const double t = r * std::sqrt(df / (1.0 - r * r));
  out.p_value = std::clamp(dist::t_two_sided_p(t, df), 0.0, 1.0);
  return out;
}

// Pairs within runs of equal values of a sorted sequence, plus the sums
// Σt(t−1)(2t+5), Σt(t−1), Σt(t−1)(t−2) used by the tie-corrected variance.
struct TieSums {
  double pairs = 0.0, v = 0.0, s1 = 0.0, s2 = 0.0;
};

TieSums tie_sums(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  TieSums t;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double k = static_cast<double>(j - i);
    t.pairs += k * (k - 1) / 2;
    t.v += k * (k - 1) * (2 * k + 5);
    t.s1 += k * (k - 1);
    t.s2 += k * (k - 1) * (k - 2);
    i = j;
  }
  return t;
}

// Counts strict inversions while merge-sorting `a` in place.
double merge_count(std::vector<double>& a, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0.0;
  const std::size_t mid = lo + (hi - lo) / 2;
  double swaps = merge_count(a, buf, lo, mid) + merge_count(a, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (a[j] < a[i]) {
      swaps += static_cast<double>(mid - i);
      buf[k++] = a[j++];
    } else {
      buf[k++] = a[i++];
    }
  }
  while (i < mid) buf[k++] = a[i++];
  while (j < hi) buf[k++] = a[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            a.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

CorrelationResult kendall_impl(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const KendallCounts k = kendall_counts(x, y);
  const double denom = std::sqrt((k.pairs - k.x_ties) * (k.pairs - k.y_ties));
  if (denom == 0.0) throw DegenerateError("correlation: zero variance input");
  CorrelationResult out{CorrelationMethod::kendall, std::clamp(k.concordant_minus_discordant / denom, -1.0, 1.0), 1.0, n};

  if (n <= 10 && k.x_ties == 0.0 && k.y_ties == 0.0) {
    out.p_value = kendall_exact_p(n, static_cast<std::size_t>(k.discordant));
    return out;
  }
  const TieSums tx = tie_sums({x.begin(), x.end()});
  const TieSums ty = tie_sums({y.begin(), y.end()});
  const double nn = static_cast<double>(n);
  const double v0 = nn * (nn - 1) * (2 * nn + 5);
  const double var = (v0 - tx.v - ty.v) / 18.0 + tx.s1 * ty.s1 / (2 * nn * (nn - 1)) +
                     tx.s2 * ty.s2 / (9 * nn * (nn - 1) * (nn - 2));
  const double z = k.concordant_minus_discordant / std::sqrt(var);
  out.p_value = std::clamp(2.0 * dist::normal_sf(std::abs(z)), 0.0, 1.0);
  return out;
}

}  // namespace

std::vector<double> mid_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

KendallCounts kendall_counts(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  KendallCounts k;
  const double nn = static_cast<double>(n);
  k.pairs = nn * (nn - 1) / 2;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    const double t = static_cast<double>(j - i);
    k.x_ties += t * (t - 1) / 2;
    for (std::size_t a = i; a < j;) {
      std::size_t b = a;
      while (b < j && y[order[b]] == y[order[a]]) ++b;
      const double u = static_cast<double>(b - a);
      k.joint_ties += u * (u - 1) / 2;
      a = b;
    }
    i = j;
  }

  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const double swaps = merge_count(ys, buf, 0, n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && ys[j] == ys[i]) ++j;
    const double u = static_cast<double>(j - i);
    k.y_ties += u * (u - 1) / 2;
    i = j;
  }
  k.discordant = swaps;
  k.concordant_minus_discordant = k.pairs - k.x_ties - k.y_ties + k.joint_ties - 2.0 * swaps;
  return k;
}

double kendall_exact_p(std::size_t n, std::size_t discordant) {
  const std::size_t total = n * (n - 1) / 2;
  if (discordant > total) throw std::invalid_argument("kendall_exact_p: discordant count out of range");
  // counts[d] = permutations of the current size with d inversions
  std::vector<double> counts{1.0};
  for (std::size_t m = 2; m <= n; ++m) {
    std::vector<double> next(counts.size() + m - 1, 0.0);
    for (std::size_t d = 0; d < counts.size(); ++d)
      for (std::size_t add = 0; add < m; ++add) next[d + add] += counts[d];
    counts = std::move(next);
  }
  const double all = std::accumulate(counts.begin(), counts.end(), 0.0);
  const std::size_t tail = std::min(discordant, total - discordant);
  double cum = 0.0;
  for (std::size_t d = 0; d <= tail; ++d) cum += counts[d];
  return std::min(1.0, 2.0 * cum / all);
}

CorrelationResult correlation(std::span<const double> x, std::span<const double> y, CorrelationMethod method) {
  check_inputs(x, y);
  switch (method) {
    case CorrelationMethod::pearson: return pearson_impl(x, y, method);
    case CorrelationMethod::spearman: {
      const auto rx = mid_ranks(x), ry = mid_ranks(y);
      return pearson_impl(rx, ry, method);
    }
    case CorrelationMethod::kendall: return kendall_impl(x, y);
  }
  throw std::invalid_argument("correlation: unknown method");
}

std::vector<double> benjamini_hochberg(std::span<const double> p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> adj(m);
  double running = 1.0;
  for (std::size_t r = m; r-- > 0;) {
    const double v = p[order[r]] * static_cast<double>(m) / static_cast<double>(r + 1);
    running = std::min(running, v);
    adj[order[r]] = std::min(1.0, running);
  }
  return adj;
}

std::vector<BandResult> band_significance(const Matrix& spectra, std::span<const double> target,
                                          const BandSignificanceOptions& options,
                                          std::span<const double> wavelengths) {
  if (target.size() != spectra.rows())
    throw std::invalid_argument("band_significance: target length differs from sample count");
  if (!(options.alpha > 0.0 && options.alpha < 1.0))
    throw std::invalid_argument("band_significance: alpha must lie in (0, 1)");
  if (!wavelengths.empty() && wavelengths.size() != spectra.cols())
    throw std::invalid_argument("band_significance: wavelength count differs from band count");
  if (spectra.rows() < 3) throw std::invalid_argument("band_significance: need at least 3 samples");
  for (double v : spectra.data())
    if (!std::isfinite(v)) throw std::invalid_argument("band_significance: non-finite spectrum value");
  for (double v : target)
    if (!std::isfinite(v)) throw std::invalid_argument("band_significance: non-finite target value");
  {
    const auto [lo, hi] = std::minmax_element(target.begin(), target.end());
    if (target.empty() || *lo == *hi) throw DegenerateError("band_significance: target is constant");
  }

  const std::size_t bands = spectra.cols();
  const Matrix cols = spectra.transpose();
  std::vector<BandResult> out(bands);
  const auto nb = static_cast<std::ptrdiff_t>(bands);

  auto one = [&](std::size_t b) {
    BandResult& r = out[b];
    r.band = b;
    if (!wavelengths.empty()) r.wavelength = wavelengths[b];
    const auto col = cols.row(b);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    if (*lo == *hi) {
      r.coefficient = r.p_value = r.p_adjusted = std::numeric_limits<double>::quiet_NaN();
      r.diagnostic = "constant band";
      return;
    }
    const CorrelationResult c = correlation(col, target, options.method);
    r.coefficient = c.coefficient;
    r.p_value = r.p_adjusted = c.p_value;
  };

  if (options.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t b = 0; b < nb; ++b) one(static_cast<std::size_t>(b));
  } else {
    for (std::ptrdiff_t b = 0; b < nb; ++b) one(static_cast<std::size_t>(b));
  }

  if (options.correction == PCorrection::benjamini_hochberg) {
    std::vector<std::size_t> tested;
    std::vector<double> p;
    for (const auto& r : out)
      if (r.diagnostic.empty()) {
        tested.push_back(r.band);
        p.push_back(r.p_value);
      }
    const auto adj = benjamini_hochberg(p);
    for (std::size_t i = 0; i < tested.size(); ++i) out[tested[i]].p_adjusted = adj[i];
  }
  for (auto& r : out) r.significant = r.diagnostic.empty() && r.p_adjusted < options.alpha;
  return out;
}

}  // namespace milkspec
