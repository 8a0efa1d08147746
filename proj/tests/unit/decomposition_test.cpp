#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "milkspec/error.hpp"
#include "milkspec/kernels/covariance.hpp"
#include "milkspec/numerics/decomposition.hpp"
#include "milkspec/numerics/eigen.hpp"
#include "milkspec/numerics/ols.hpp"
#include "milkspec/numerics/regression.hpp"

using namespace milkspec;

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

Matrix symmetric(std::size_t n, std::uint64_t seed) {
  const Matrix r = fixtures::random_matrix(n, n, seed);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = r(i, j) + r(j, i);
  return a;
}

Matrix centered(const Matrix& x) {
  Matrix c = x;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) m += x(i, j);
    m /= static_cast<double>(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) c(i, j) -= m;
  }
  return c;
}

double column_cosine(const Matrix& a, std::size_t ca, const Matrix& b, std::size_t cb) {
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    d += a(i, ca) * b(i, cb);
    na += a(i, ca) * a(i, ca);
    nb += b(i, cb) * b(i, cb);
  }
  return d / std::sqrt(na * nb);
}

OlsSummary ols(const Matrix& x, const std::vector<double>& y) {
  std::vector<std::string> names{"const"};
  for (std::size_t j = 0; j < x.cols(); ++j) names.push_back("x" + std::to_string(j));
  return ols_fit(add_intercept(x), y, names);
}

}  // namespace

TEST(SymEigen, DiagonalAndTwoByTwo) {
  const auto d = sym_eigen(Matrix{{1, 0, 0}, {0, 3, 0}, {0, 0, 2}});
  EXPECT_EQ(d.eigenvalues, (std::vector<double>{3, 2, 1}));
  const auto e = sym_eigen(Matrix{{2, 1}, {1, 2}});
  EXPECT_NEAR(e.eigenvalues[0], 3.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-14);
  EXPECT_NEAR(std::abs(e.eigenvectors(0, 0)), 1 / std::sqrt(2.0), 1e-14);
}

TEST(SymEigen, RejectsBadInput) {
  EXPECT_THROW(sym_eigen(Matrix(2, 3)), std::invalid_argument);
  EXPECT_THROW(sym_eigen(Matrix{{1, 2}, {0, 1}}), std::invalid_argument);
}

TEST(SymEigen, MatchesEigenSolverAndResiduals) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::size_t n = 3 + seed;
    const Matrix a = symmetric(n, seed);
    const auto d = sym_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a));
    const Eigen::VectorXd ref = es.eigenvalues().reverse();
    const Eigen::MatrixXd v = to_eigen(d.eigenvectors);
    const Eigen::MatrixXd ea = to_eigen(a);
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_NEAR(d.eigenvalues[k], ref(k), 1e-10);
      const double res = (ea * v.col(k) - d.eigenvalues[k] * v.col(k)).norm();
      EXPECT_LT(res, 1e-10 * ea.norm());
    }
    EXPECT_LT((v.transpose() * v - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-12);
  }
}

TEST(SymEigen, SignConvention) {
  Matrix v{{-0.6, 0.2}, {0.8, -0.9}};
  normalize_column_signs(v);
  EXPECT_EQ(v(1, 0), 0.8);
  EXPECT_EQ(v(1, 1), 0.9);
  EXPECT_EQ(v(0, 1), -0.2);
}

TEST(CovarianceKernel, SerialAndParallelIdentical) {
  const Matrix x = centered(fixtures::random_matrix(301, 17, 5));
  const Matrix s = kernels::covariance(x, Exec::serial);
  const Matrix p = kernels::covariance(x, Exec::parallel);
  EXPECT_EQ(s, p);
  const Eigen::MatrixXd e = to_eigen(x);
  const Eigen::MatrixXd ref = e.transpose() * e / 300.0;
  EXPECT_LT((to_eigen(s) - ref).norm(), 1e-12);
}

TEST(Pca, CollinearPoints) {
  const auto r = pca(Matrix{{1, 1}, {2, 2}, {3, 3}, {4, 4}}, 2);
  EXPECT_NEAR(r.explained_variance_ratio[0], 1.0, 1e-12);
  EXPECT_NEAR(r.explained_variance_ratio[1], 0.0, 1e-12);
  EXPECT_NEAR(r.loadings(0, 0), 1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(r.loadings(1, 0), 1 / std::sqrt(2.0), 1e-12);
}

TEST(Pca, AxisAlignedCross) {
  const auto r = pca(Matrix{{1, 0}, {-1, 0}, {0, 0.5}, {0, -0.5}}, 2);
  EXPECT_NEAR(r.explained_variance_ratio[0], 0.8, 1e-12);
  EXPECT_NEAR(r.explained_variance_ratio[1], 0.2, 1e-12);
  EXPECT_NEAR(r.loadings(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(r.loadings(1, 1), 1.0, 1e-12);
}

TEST(Pca, Errors) {
  EXPECT_THROW(pca(Matrix{{1, 2}}, 1), std::invalid_argument);
  EXPECT_THROW(pca(fixtures::random_matrix(3, 5, 1), 3), std::invalid_argument);
  EXPECT_THROW(pca(fixtures::random_matrix(3, 5, 1), 0), std::invalid_argument);
  EXPECT_THROW(pca(Matrix(5, 2, 1.0), 1), DegenerateError);
}

TEST(Pca, InvariantsAndEigenOracle) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Matrix x = fixtures::random_matrix(40, 6, seed * 11);
    const auto r = pca(x, 6);
    double sum = 0;
    for (std::size_t k = 0; k < 6; ++k) {
      EXPECT_GE(r.explained_variance_ratio[k], 0.0);
      if (k) {
        EXPECT_LE(r.explained_variance_ratio[k], r.explained_variance_ratio[k - 1]);
      }
      sum += r.explained_variance_ratio[k];
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);

    const Eigen::MatrixXd c = to_eigen(centered(x));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.transpose() * c / 39.0);
    for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(r.explained_variance[k], es.eigenvalues()(5 - k), 1e-10);

    const Eigen::MatrixXd l = to_eigen(r.loadings);
    EXPECT_LT((l.transpose() * l - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-12);
    EXPECT_LT((to_eigen(r.scores) - c * l).norm(), 1e-10);

    double prev = INFINITY;
    for (std::size_t k = 1; k <= 6; ++k) {
      const Eigen::MatrixXd lk = l.leftCols(k);
      const double err = (c - c * lk * lk.transpose()).squaredNorm();
      EXPECT_LE(err, prev + 1e-9);
      prev = err;
    }
    EXPECT_LT(prev, 1e-18 + 1e-12 * c.squaredNorm());
  }
}

TEST(Pca, TransformMatchesScores) {
  const Matrix x = fixtures::random_matrix(20, 4, 3);
  const auto r = pca(x, 2);
  const Matrix t = pca_transform(r, x);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(t(i, j), r.scores(i, j), 1e-12);
}

TEST(Pca, SerialAndParallelIdentical) {
  const Matrix x = fixtures::random_matrix(200, 12, 9);
  const auto s = pca(x, 5, Exec::serial);
  const auto p = pca(x, 5, Exec::parallel);
  EXPECT_EQ(s.scores, p.scores);
  EXPECT_EQ(s.loadings, p.loadings);
}

TEST(Mnf, IdentityNoiseMatchesPca) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Matrix x = fixtures::random_matrix(80, 5, seed * 3);
    const auto m = mnf_with_noise(x, Matrix::identity(5));
    const auto p = pca(x, 5);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(std::abs(column_cosine(m.transform, k, p.loadings, k)), 1.0, 1e-6);
  }
}

TEST(Mnf, NoiseFreeBandComesFirst) {
  // band 0 is a ramp along samples: its horizontal shift differences are
  // constant, so its noise variance is zero; band 1 is white noise
  const std::size_t lines = 12, samples = 12;
  Matrix px(lines * samples, 2);
  const auto noise = fixtures::random_vector(lines * samples, 77);
  for (std::size_t l = 0; l < lines; ++l)
    for (std::size_t s = 0; s < samples; ++s) {
      px(l * samples + s, 0) = 0.5 * static_cast<double>(s) + static_cast<double>(l);
      px(l * samples + s, 1) = noise[l * samples + s];
    }
  const auto m = mnf(px, lines, samples);
  EXPECT_FALSE(m.regularization_fallback);
  EXPECT_LT(std::abs(m.transform(1, 0)) / std::abs(m.transform(0, 0)), 1e-6);
  EXPECT_GT(m.snr_eigenvalues[0], 1e6 * m.snr_eigenvalues[1]);
}

TEST(Mnf, ConstantCubeFallsBack) {
  Matrix px(16, 3, 4.0);
  for (std::size_t i = 0; i < 16; ++i) px(i, 2) = 1.0;
  const auto flat = mnf(px, 4, 4);
  EXPECT_TRUE(flat.regularization_fallback);
  for (double v : flat.snr_eigenvalues) EXPECT_NEAR(v, 0.0, 1e-12);
  Matrix ramp(16, 3);
  for (std::size_t l = 0; l < 4; ++l)
    for (std::size_t s = 0; s < 4; ++s)
      for (std::size_t b = 0; b < 3; ++b) ramp(l * 4 + s, b) = static_cast<double>(s * (b + 1));
  const auto m = mnf(ramp, 4, 4);
  EXPECT_TRUE(m.regularization_fallback);
  for (std::size_t b = 0; b < 3; ++b) EXPECT_GT(m.noise_covariance(b, b), 0.0);
}

TEST(Mnf, EigenvaluesDescendAndWhitenNoise) {
  const auto cube = fixtures::random_cube(10, 10, 6, 4);
  const auto m = mnf(cube);
  for (std::size_t k = 1; k < 6; ++k) EXPECT_LE(m.snr_eigenvalues[k], m.snr_eigenvalues[k - 1]);
  const Eigen::MatrixXd t = to_eigen(m.transform);
  const Eigen::MatrixXd w = t.transpose() * to_eigen(m.noise_covariance) * t;
  EXPECT_LT((w - Eigen::MatrixXd::Identity(6, 6)).norm(), 1e-8);
}

TEST(Mnf, AccumulatorMatchesSingleRegion) {
  const auto cube = fixtures::random_cube(9, 11, 5, 8);
  const auto direct = mnf(cube);
  MnfAccumulator acc(5);
  acc.add(cube, NoiseShift::horizontal);
  const auto pooled = acc.finish();
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_NEAR(pooled.snr_eigenvalues[k], direct.snr_eigenvalues[k], 1e-9 * direct.snr_eigenvalues[0]);
    EXPECT_NEAR(std::abs(column_cosine(pooled.transform, k, direct.transform, k)), 1.0, 1e-8);
  }
}

TEST(Mnf, AccumulatorRequiresData) {
  MnfAccumulator acc(4);
  EXPECT_THROW(acc.finish(), DegenerateError);
  EXPECT_THROW(acc.add(fixtures::random_matrix(4, 3, 1), 2, 2, NoiseShift::horizontal), std::invalid_argument);
}

TEST(Mnf, SerialAndParallelIdentical) {
  const auto cube = fixtures::random_cube(20, 20, 8, 12);
  MnfOptions s;
  s.exec = Exec::serial;
  MnfOptions p;
  p.exec = Exec::parallel;
  EXPECT_EQ(mnf(cube, s).components, mnf(cube, p).components);
}

TEST(Lasso, ZeroLambdaIsOls) {
  const Matrix x = fixtures::random_matrix(30, 4, 21);
  const auto y = fixtures::random_vector(30, 22);
  const auto l = lasso_fit(x, y, 0.0);
  const auto o = ols(x, y);
  EXPECT_NEAR(l.intercept, o.coefficients[0].coef, 1e-6);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(l.coefficients[j], o.coefficients[j + 1].coef, 1e-6);
}

TEST(Lasso, AboveLambdaMaxAllZero) {
  const Matrix x = fixtures::random_matrix(30, 4, 31);
  const auto y = fixtures::random_vector(30, 32);
  const double lmax = lasso_lambda_max(x, y);
  const auto l = lasso_fit(x, y, lmax * 1.0001);
  for (double b : l.coefficients) EXPECT_EQ(b, 0.0);
  const auto below = lasso_fit(x, y, lmax * 0.9);
  EXPECT_GT(std::count_if(below.coefficients.begin(), below.coefficients.end(), [](double b) { return b != 0.0; }), 0);
}

TEST(Lasso, SoftThresholdOnUnitColumn) {
  const std::vector<double> col{1, -1, 1, -1};
  Matrix x(4, 1);
  for (std::size_t i = 0; i < 4; ++i) x(i, 0) = col[i] / 2.0;  // centred, unit norm
  const std::vector<double> y{3, 1, 2.5, 0.5};
  const double b = 0.5 * (3 - 1 + 2.5 - 0.5);
  for (double lambda : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    const auto l = lasso_fit(x, y, lambda);
    EXPECT_NEAR(l.coefficients[0], soft_threshold(b, lambda), 1e-12);
  }
  EXPECT_EQ(soft_threshold(-3, 1), -2);
  EXPECT_EQ(soft_threshold(0.5, 1), 0);
}

TEST(Lasso, ObjectiveNonIncreasing) {
  const Matrix x = fixtures::random_matrix(50, 8, 41);
  const auto y = fixtures::random_vector(50, 42);
  const auto l = lasso_fit(x, y, 0.1 * lasso_lambda_max(x, y));
  ASSERT_GE(l.objective_history.size(), 2u);
  for (std::size_t i = 1; i < l.objective_history.size(); ++i)
    EXPECT_LE(l.objective_history[i], l.objective_history[i - 1] + 1e-12);
}

TEST(Lasso, Errors) {
  const Matrix x = fixtures::random_matrix(20, 3, 1);
  const auto y = fixtures::random_vector(20, 2);
  EXPECT_THROW(lasso_fit(x, y, -1.0), std::invalid_argument);
  EXPECT_THROW(lasso_fit(x, std::vector<double>(5), 1.0), std::invalid_argument);
  Matrix corr(40, 2);
  const auto base = fixtures::random_vector(40, 3);
  const auto jitter = fixtures::random_vector(40, 4);
  for (std::size_t i = 0; i < 40; ++i) {
    corr(i, 0) = base[i];
    corr(i, 1) = base[i] + 1e-3 * jitter[i];
  }
  LassoOptions opts;
  opts.max_sweeps = 1;
  EXPECT_THROW(lasso_fit(corr, fixtures::random_vector(40, 5), 0.0, opts), DegenerateError);
}

TEST(Pls, SinglePredictorIsOls) {
  const Matrix x = fixtures::random_matrix(25, 1, 51);
  const auto y = fixtures::random_vector(25, 52);
  const auto p = pls_fit(x, y, 1);
  const auto o = ols(x, y);
  EXPECT_NEAR(p.coefficients(0, 0), o.coefficients[1].coef, 1e-10);
}

TEST(Pls, FullRankMatchesOlsPredictions) {
  const Matrix x = fixtures::random_matrix(30, 5, 61);
  const auto y = fixtures::random_vector(30, 62);
  const auto p = pls_fit(x, y, 5);
  const auto o = ols(x, y);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(p.coefficients(j, 0), o.coefficients[j + 1].coef, 1e-8);
  const Matrix pred = pls_predict(p, x);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_NEAR(pred(i, 0), o.fitted[i], 1e-8);
}

TEST(Pls, ScoresOrthogonal) {
  const Matrix x = fixtures::random_matrix(40, 8, 71);
  const auto y = fixtures::random_vector(40, 72);
  const auto p = pls_fit(x, y, 4);
  const Eigen::MatrixXd t = to_eigen(p.x_scores);
  const Eigen::MatrixXd g = t.transpose() * t;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a != b) {
        EXPECT_LT(std::abs(g(a, b)), 1e-10 * g(a, a));
      }
}

TEST(Pls, Errors) {
  const Matrix x = fixtures::random_matrix(20, 3, 1);
  EXPECT_THROW(pls_fit(x, std::vector<double>(20, 2.0), 1), DegenerateError);
  EXPECT_THROW(pls_fit(x, fixtures::random_vector(20, 2), 4), DegenerateError);
  EXPECT_THROW(pls_fit(x, fixtures::random_vector(20, 2), 0), std::invalid_argument);
  EXPECT_THROW(pls_fit(x, fixtures::random_vector(19, 2), 1), std::invalid_argument);
  EXPECT_EQ(matrix_rank(Matrix{{1, 2}, {2, 4}, {3, 6}}), 1u);
}
