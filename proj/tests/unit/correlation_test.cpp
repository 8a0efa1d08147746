#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "milkspec/error.hpp"
#include "milkspec/learn/rng.hpp"
#include "milkspec/numerics/correlation.hpp"

using namespace milkspec;

namespace {

double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Average rank by counting, O(n²).
std::vector<double> oracle_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i];
      equal += w == v[i];
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

// Tau-b by pair enumeration.
double oracle_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  double c = 0, d = 0, tx = 0, ty = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = x[i] - x[j], b = y[i] - y[j];
      if (a == 0 && b == 0) continue;
      if (a == 0) ++tx;
      else if (b == 0) ++ty;
      else if (a * b > 0) ++c;
      else ++d;
    }
  return (c - d) / std::sqrt((c + d + tx) * (c + d + ty));
}

double oracle_exact_p(std::size_t n, std::size_t discordant) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> counts(n * (n - 1) / 2 + 1, 0.0);
  do {
    std::size_t inv = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) inv += perm[i] > perm[j];
    counts[inv] += 1;
  } while (std::next_permutation(perm.begin(), perm.end()));
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  double lo = 0, hi = 0;
  for (std::size_t d = 0; d <= discordant; ++d) lo += counts[d];
  for (std::size_t d = discordant; d < counts.size(); ++d) hi += counts[d];
  return std::min(1.0, 2.0 * std::min(lo, hi) / total);
}

}  // namespace

TEST(Correlation, Examples) {
  const std::vector<double> x{1, 2, 3}, y{2, 4, 6};
  const auto r = correlation(x, y, CorrelationMethod::pearson);
  EXPECT_EQ(r.coefficient, 1.0);
  EXPECT_EQ(r.p_value, 0.0);

  const std::vector<double> a{1, 2, 3, 4}, b{1, 3, 2, 4};
  EXPECT_EQ(correlation(a, b, CorrelationMethod::pearson).coefficient, 0.8);

  const std::vector<double> c{1, 2, 3}, d{1, 3, 2};
  EXPECT_NEAR(correlation(c, d, CorrelationMethod::kendall).coefficient, 1.0 / 3.0, 1e-15);
}

TEST(Correlation, Errors) {
  const std::vector<double> x{1, 2, 3}, c{5, 5, 5}, short_{1, 2}, longer{1, 2, 3, 4};
  EXPECT_THROW(correlation(x, c, CorrelationMethod::pearson), DegenerateError);
  EXPECT_THROW(correlation(c, x, CorrelationMethod::spearman), DegenerateError);
  EXPECT_THROW(correlation(short_, short_, CorrelationMethod::pearson), std::invalid_argument);
  EXPECT_THROW(correlation(x, longer, CorrelationMethod::kendall), std::invalid_argument);
}

TEST(Correlation, OraclesWithTies) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 5 + seed % 40;
    const auto x = fixtures::tied_vector(n, 2 + static_cast<int>(seed % 7), seed);
    auto y = fixtures::tied_vector(n, 3 + static_cast<int>(seed % 5), seed + 1000);
    for (std::size_t i = 0; i < n; ++i) y[i] += 0.5 * x[i];
    if (oracle_ranks(x) == std::vector<double>(n, (n + 1.0) / 2.0)) continue;
    EXPECT_NEAR(correlation(x, y, CorrelationMethod::pearson).coefficient, oracle_pearson(x, y), 1e-12);
    EXPECT_NEAR(correlation(x, y, CorrelationMethod::spearman).coefficient,
                oracle_pearson(oracle_ranks(x), oracle_ranks(y)), 1e-12);
    EXPECT_NEAR(correlation(x, y, CorrelationMethod::kendall).coefficient, oracle_tau_b(x, y), 1e-12);
  }
}

TEST(Correlation, PearsonPValueMatchesT) {
  const auto x = fixtures::random_vector(25, 1);
  auto y = fixtures::random_vector(25, 2);
  for (std::size_t i = 0; i < 25; ++i) y[i] += 0.3 * x[i];
  const auto r = correlation(x, y, CorrelationMethod::pearson);
  const double t = r.coefficient * std::sqrt(23.0 / (1 - r.coefficient * r.coefficient));
  const boost::math::students_t dist(23.0);
  EXPECT_NEAR(r.p_value, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 1e-12);
}

TEST(Correlation, KendallNormalApproximationWithTies) {
  // scipy's tie-corrected variance, recomputed directly
  const auto x = fixtures::tied_vector(30, 4, 5);
  auto y = fixtures::tied_vector(30, 5, 6);
  for (std::size_t i = 0; i < 30; ++i) y[i] += x[i];
  double s = 0;
  for (std::size_t i = 0; i < 30; ++i)
    for (std::size_t j = i + 1; j < 30; ++j) {
      const double a = x[i] - x[j], b = y[i] - y[j];
      s += (a > 0) - (a < 0) == 0 || (b > 0) - (b < 0) == 0 ? 0.0 : ((a > 0) == (b > 0) ? 1.0 : -1.0);
    }
  auto tie_terms = [](const std::vector<double>& v, double& vt, double& t1, double& t2) {
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    vt = t1 = t2 = 0;
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      vt += t * (t - 1) * (2 * t + 5);
      t1 += t * (t - 1);
      t2 += t * (t - 1) * (t - 2);
      i = j;
    }
  };
  double vx, x1, x2, vy, y1, y2;
  tie_terms(x, vx, x1, x2);
  tie_terms(y, vy, y1, y2);
  const double n = 30;
  const double var = (n * (n - 1) * (2 * n + 5) - vx - vy) / 18 + x1 * y1 / (2 * n * (n - 1)) +
                     x2 * y2 / (9 * n * (n - 1) * (n - 2));
  const double z = s / std::sqrt(var);
  const boost::math::normal n01;
  EXPECT_NEAR(correlation(x, y, CorrelationMethod::kendall).p_value,
              2.0 * boost::math::cdf(boost::math::complement(n01, std::abs(z))), 1e-12);
}

TEST(Correlation, KendallExactSmallSamples) {
  for (std::size_t n = 3; n <= 7; ++n)
    for (std::size_t d = 0; d <= n * (n - 1) / 2; ++d) EXPECT_NEAR(kendall_exact_p(n, d), oracle_exact_p(n, d), 1e-14);
  const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 1, 3, 5, 4};
  EXPECT_NEAR(correlation(x, y, CorrelationMethod::kendall).p_value, oracle_exact_p(5, 2), 1e-14);
}

TEST(Correlation, SymmetryAndInvariance) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = fixtures::random_vector(15, seed);
    const auto y = fixtures::random_vector(15, seed + 50);
    std::vector<double> ax(15), mx(15);
    for (std::size_t i = 0; i < 15; ++i) {
      ax[i] = 3.0 * x[i] + 7.0;
      mx[i] = std::exp(x[i]);
    }
    for (auto m : {CorrelationMethod::pearson, CorrelationMethod::spearman, CorrelationMethod::kendall}) {
      const double r = correlation(x, y, m).coefficient;
      EXPECT_NEAR(r, correlation(y, x, m).coefficient, 1e-14);
      EXPECT_NEAR(r, correlation(ax, y, m).coefficient, 1e-12);
      if (m != CorrelationMethod::pearson) {
        EXPECT_EQ(r, correlation(mx, y, m).coefficient);
      }
    }
  }
}

TEST(KendallCounts, MatchesEnumeration) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto x = fixtures::tied_vector(40, 5, seed);
    const auto y = fixtures::tied_vector(40, 6, seed + 7);
    const KendallCounts k = kendall_counts(x, y);
    double s = 0, tx = 0, ty = 0, both = 0;
    for (std::size_t i = 0; i < 40; ++i)
      for (std::size_t j = i + 1; j < 40; ++j) {
        const double a = x[i] - x[j], b = y[i] - y[j];
        if (a == 0) ++tx;
        if (b == 0) ++ty;
        if (a == 0 && b == 0) ++both;
        if (a != 0 && b != 0) s += a * b > 0 ? 1 : -1;
      }
    EXPECT_EQ(k.concordant_minus_discordant, s);
    EXPECT_EQ(k.x_ties, tx);
    EXPECT_EQ(k.y_ties, ty);
    EXPECT_EQ(k.joint_ties, both);
    EXPECT_EQ(k.pairs, 780.0);
  }
}

TEST(MidRanks, Ties) {
  const std::vector<double> v{10, 20, 10, 30};
  EXPECT_EQ(mid_ranks(v), (std::vector<double>{1.5, 3, 1.5, 4}));
}

TEST(BenjaminiHochberg, KnownValues) {
  const std::vector<double> p{0.01, 0.04, 0.03, 0.2};
  const auto q = benjamini_hochberg(p);
  EXPECT_NEAR(q[0], 0.04, 1e-15);
  EXPECT_NEAR(q[1], 0.16 / 3.0, 1e-15);
  EXPECT_NEAR(q[2], 0.16 / 3.0, 1e-15);
  EXPECT_NEAR(q[3], 0.2, 1e-15);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_GE(q[i], p[i]);
}

TEST(BandSignificance, CopiedBandIsFlagged) {
  const Matrix spectra = fixtures::random_matrix(30, 40, 3);
  const std::vector<double> target = spectra.column(17);
  for (auto m : {CorrelationMethod::pearson, CorrelationMethod::kendall, CorrelationMethod::spearman}) {
    const auto bands = band_significance(spectra, target, {m, 0.05, PCorrection::none, Exec::parallel});
    ASSERT_EQ(bands.size(), 40u);
    EXPECT_EQ(bands[17].coefficient, 1.0);
    EXPECT_TRUE(bands[17].significant);
  }
}

TEST(BandSignificance, BhNeverFlagsMore) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix spectra = fixtures::random_matrix(40, 224, seed);
    const auto target = fixtures::random_vector(40, seed + 100);
    const auto raw = band_significance(spectra, target, {CorrelationMethod::pearson, 0.05, PCorrection::none});
    const auto bh =
        band_significance(spectra, target, {CorrelationMethod::pearson, 0.05, PCorrection::benjamini_hochberg});
    std::size_t nr = 0, nb = 0;
    for (std::size_t b = 0; b < 224; ++b) {
      nr += raw[b].significant;
      nb += bh[b].significant;
      EXPECT_EQ(raw[b].p_value, bh[b].p_value);
    }
    EXPECT_LE(nb, nr);
  }
}

TEST(BandSignificance, ConstantBandAndTarget) {
  Matrix spectra = fixtures::random_matrix(12, 3, 4);
  for (std::size_t i = 0; i < 12; ++i) spectra(i, 1) = 0.25;
  const auto target = fixtures::random_vector(12, 9);
  const std::vector<double> wl{900, 1000, 1100};
  const auto bands = band_significance(spectra, target, {CorrelationMethod::pearson, 0.05, PCorrection::none}, wl);
  EXPECT_TRUE(std::isnan(bands[1].coefficient));
  EXPECT_FALSE(bands[1].significant);
  EXPECT_FALSE(bands[1].diagnostic.empty());
  EXPECT_EQ(*bands[2].wavelength, 1100.0);
  const std::vector<double> flat(12, 1.0);
  EXPECT_THROW(band_significance(spectra, flat, {}), DegenerateError);
  EXPECT_THROW(band_significance(spectra, target, {CorrelationMethod::pearson, 1.5, PCorrection::none}),
               std::invalid_argument);
}

TEST(BandSignificance, SerialAndParallelIdentical) {
  const Matrix spectra = fixtures::random_matrix(50, 224, 77);
  const auto target = fixtures::random_vector(50, 78);
  for (auto m : {CorrelationMethod::pearson, CorrelationMethod::spearman, CorrelationMethod::kendall}) {
    const auto s = band_significance(spectra, target, {m, 0.05, PCorrection::benjamini_hochberg, Exec::serial});
    const auto p = band_significance(spectra, target, {m, 0.05, PCorrection::benjamini_hochberg, Exec::parallel});
    for (std::size_t b = 0; b < s.size(); ++b) {
      EXPECT_EQ(s[b].coefficient, p[b].coefficient);
      EXPECT_EQ(s[b].p_value, p[b].p_value);
      EXPECT_EQ(s[b].p_adjusted, p[b].p_adjusted);
    }
  }
}
