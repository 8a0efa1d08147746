#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/fisher_f.hpp>
#include <gtest/gtest.h>

#include "milkspec/error.hpp"
#include "milkspec/learn/rng.hpp"
#include "milkspec/numerics/anova.hpp"

using namespace milkspec;

namespace {

std::vector<std::string> labels(std::initializer_list<const char*> l) { return {l.begin(), l.end()}; }

// Residual sum of squares of y on the columns of X.
double rss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
  return (y - x * beta).squaredNorm();
}

}  // namespace

TEST(AnovaOneWay, Examples) {
  const AnovaOneWay a = anova_oneway({{1, 2, 3}, {2, 3, 4}, {3, 4, 5}});
  EXPECT_NEAR(a.f, 3.0, 1e-12);
  EXPECT_EQ(a.df_between, 2);
  EXPECT_EQ(a.df_within, 6);
  const boost::math::fisher_f f(2, 6);
  EXPECT_NEAR(a.p_value, boost::math::cdf(boost::math::complement(f, 3.0)), 1e-12);

  const AnovaOneWay same = anova_oneway({{1, 2, 3}, {1, 2, 3}});
  EXPECT_EQ(same.f, 0.0);
  EXPECT_EQ(same.p_value, 1.0);

  EXPECT_LT(anova_oneway({{0, 0.1}, {100, 100.1}}).p_value, 1e-6);
}

TEST(AnovaOneWay, DegenerateAndErrors) {
  const AnovaOneWay d = anova_oneway({{1, 1}, {2, 2}});
  EXPECT_TRUE(d.degenerate);
  EXPECT_THROW(anova_oneway({{1, 2, 3}}), std::invalid_argument);
  EXPECT_THROW(anova_oneway({{1, 2}, {3}}), std::invalid_argument);
}

TEST(AnovaTwoWay, BalancedTwoByTwo) {
  const std::vector<double> v{1, 2, 3, 4, 1, 2, 3, 4};
  const auto a = labels({"T0", "T0", "T0", "T0", "T12", "T12", "T12", "T12"});
  const auto b = labels({"SIG", "SIG", "CTR", "CTR", "SIG", "SIG", "CTR", "CTR"});
  const AnovaTwoWay r = anova_twoway(v, a, b);
  EXPECT_EQ(r.a.f, 0.0);
  EXPECT_EQ(r.b.f, 16.0);
  EXPECT_EQ(r.interaction.f, 0.0);
  EXPECT_EQ(r.ms_residual, 0.5);
  EXPECT_EQ(r.df_residual, 4);
  EXPECT_TRUE(r.balanced);
  EXPECT_EQ(r.a.p_value, 1.0);
  EXPECT_EQ(r.interaction.p_value, 1.0);
}

TEST(AnovaTwoWay, AllEqual) {
  const std::vector<double> v(8, 2.5);
  const auto a = labels({"x", "x", "x", "x", "y", "y", "y", "y"});
  const auto b = labels({"p", "p", "q", "q", "p", "p", "q", "q"});
  const AnovaTwoWay r = anova_twoway(v, a, b);
  for (const AnovaEffect* e : {&r.a, &r.b, &r.interaction}) {
    EXPECT_EQ(e->f, 0.0);
    EXPECT_EQ(e->p_value, 1.0);
  }
  EXPECT_TRUE(r.degenerate);
}

TEST(AnovaTwoWay, UnbalancedMatchesNestedRegression) {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v;
    std::vector<std::string> fa, fb;
    const int la = 2 + static_cast<int>(rng.below(2)), lb = 2 + static_cast<int>(rng.below(3));
    for (int i = 0; i < la; ++i)
      for (int j = 0; j < lb; ++j) {
        const std::size_t reps = 1 + rng.below(4) + (i == 0 && j == 0);
        for (std::size_t r = 0; r < reps; ++r) {
          v.push_back(0.5 * i - 0.3 * j + 0.2 * i * j + rng.normal());
          fa.push_back("a" + std::to_string(i));
          fb.push_back("b" + std::to_string(j));
        }
      }
    const std::size_t n = v.size();
    if (n <= static_cast<std::size_t>(la * lb)) continue;
    Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n));
    Eigen::MatrixXd full(n, la * lb);
    full.setZero();
    Eigen::MatrixXd m0 = Eigen::MatrixXd::Ones(n, 1);
    Eigen::MatrixXd m1(n, la), m2(n, la + lb - 1);
    m1.setZero();
    m2.setZero();
    for (std::size_t r = 0; r < n; ++r) {
      const int i = fa[r][1] - '0', j = fb[r][1] - '0';
      m1(r, i) = 1;
      m2(r, i) = 1;
      if (j > 0) m2(r, la + j - 1) = 1;
      full(r, i * lb + j) = 1;
    }
    const double r0 = rss(m0, y), r1 = rss(m1, y), r2 = rss(m2, y), r3 = rss(full, y);
    const AnovaTwoWay res = anova_twoway(v, fa, fb);
    EXPECT_NEAR(res.a.ss, r0 - r1, 1e-9);
    EXPECT_NEAR(res.b.ss, r1 - r2, 1e-9);
    EXPECT_NEAR(res.interaction.ss, r2 - r3, 1e-9);
    EXPECT_NEAR(res.ss_residual, r3, 1e-9);
    const double dfr = static_cast<double>(n) - la * lb;
    EXPECT_EQ(res.df_residual, static_cast<int>(dfr));
    const boost::math::fisher_f fdist(la - 1, dfr);
    EXPECT_NEAR(res.a.p_value, boost::math::cdf(boost::math::complement(fdist, res.a.f)), 1e-9);
  }
}

TEST(AnovaTwoWay, Errors) {
  const std::vector<double> v{1, 2, 3};
  const auto a = labels({"x", "x", "y"});
  const auto b = labels({"p", "q", "p"});
  EXPECT_THROW(anova_twoway(v, a, b, true), DataError);  // empty (y, q) cell
  const auto one = labels({"x", "x", "x"});
  EXPECT_THROW(anova_twoway(v, one, b, false), DegenerateError);
}

TEST(AnovaTwoWay, RendersEffectColumns) {
  const std::vector<double> v{1, 2, 3, 4, 1, 2, 3, 4};
  const auto a = labels({"T0", "T0", "T0", "T0", "T12", "T12", "T12", "T12"});
  const auto b = labels({"SIG", "SIG", "CTR", "CTR", "SIG", "SIG", "CTR", "CTR"});
  const std::string table = format_effect_p_table({{"C16:0", anova_twoway(v, a, b)}});
  const auto header = table.substr(0, table.find('\n'));
  EXPECT_LT(header.find("TIME_p"), header.find("GROUP_p"));
  EXPECT_LT(header.find("GROUP_p"), header.find("INT_p"));
  EXPECT_NE(table.find("C16:0"), std::string::npos);
}
