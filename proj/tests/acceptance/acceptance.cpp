// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iterator>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "fixtures.hpp"
#include "milkspec/cli/pipeline.hpp"
#include "milkspec/core/roi.hpp"
#include "milkspec/features/glcm.hpp"
#include "milkspec/learn/mlp.hpp"
#include "milkspec/learn/models.hpp"
#include "milkspec/learn/report.hpp"
#include "milkspec/learn/rng.hpp"
#include "milkspec/learn/split.hpp"
#include "milkspec/numerics/anova.hpp"
#include "milkspec/numerics/correlation.hpp"
#include "milkspec/numerics/decomposition.hpp"
#include "milkspec/numerics/ols.hpp"
#include "milkspec/numerics/regression.hpp"
#include "ols_oracle.hpp"

using namespace milkspec;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double rel_err(double got, double want) {
  if (std::isnan(got) && std::isnan(want)) return 0.0;
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1
Outcome ols_engine() {
  Outcome o;
  const auto t0 = Clock::now();
  Matrix x(4, 1);
  for (int i = 0; i < 4; ++i) x(i, 0) = i;
  const std::vector<double> y{1, 2, 2, 4};
  const OlsSummary s = ols_fit(add_intercept(x), y, {"const", "x"});
  o.check(rel_err(s.coefficients[1].coef, 0.9) < 1e-10, "slope");
  o.check(rel_err(s.coefficients[0].coef, 0.9) < 1e-10, "intercept");
  o.check(rel_err(s.r_squared, 1.0 - 0.7 / 4.75) < 1e-10, "r2");
  o.check(rel_err(s.durbin_watson, 2.9) < 1e-10, "dw");

  double worst = 0.0;
  for (std::size_t n : {8u, 12u, 20u}) {
    const Matrix xd = add_intercept(fixtures::random_matrix(n, 3, 100 + n));
    auto yv = fixtures::random_vector(n, 200 + n);
    for (std::size_t i = 0; i < n; ++i) yv[i] += 0.5 + 1.5 * xd(i, 1) - xd(i, 2);
    const OlsSummary f = ols_fit(xd, yv, {"const", "a", "b", "c"});
    const auto r = fixtures::ols_oracle(to_eigen(xd), Eigen::Map<const Eigen::VectorXd>(yv.data(), n));
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t j = 0; j < 4; ++j) {
      const auto& c = f.coefficients[j];
      pairs.insert(pairs.end(), {{c.coef, r.coef[j]}, {c.std_err, r.se[j]}, {c.t, r.t[j]}, {c.p_value, r.p[j]},
                                 {c.ci_low, r.lo[j]}, {c.ci_high, r.hi[j]}});
    }
    pairs.insert(pairs.end(), {{f.r_squared, r.r2},
                               {f.adj_r_squared, r.adj_r2},
                               {f.f_statistic, r.f},
                               {f.f_p_value, r.f_p},
                               {f.log_likelihood, r.llf},
                               {f.aic, r.aic},
                               {f.bic, r.bic},
                               {f.durbin_watson, r.dw},
                               {f.skew, r.skew},
                               {f.kurtosis, r.kurtosis},
                               {f.jarque_bera, r.jb},
                               {f.jb_p, r.jb_p},
                               {f.omnibus, r.omnibus},
                               {f.omnibus_p, r.omnibus_p},
                               {f.condition_number, r.cond}});
    for (const auto& [g, w] : pairs) worst = std::max(worst, rel_err(g, w));
  }
  o.check(worst < 1e-8, fmt::format("oracle rel err {:.2e}", worst));
  const double t = elapsed(t0);
  o.check(t < 1.0, "runtime");
  if (o.pass) o.detail = fmt::format("4-point exact, oracle max rel err {:.1e}", worst);
  return o;
}

// 2
Outcome separable_classifiers() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto d = fixtures::separable_two_class(52, 14, 2024);
  const auto split = train_test_split(52, SplitSpec{0.8, 2024});
  o.check(split.train.size() == 41 && split.test.size() == 11, "split sizes");
  const Matrix xtr = d.x.select_rows(split.train), xte = d.x.select_rows(split.test);
  std::vector<int> ytr, yte;
  for (auto i : split.train) ytr.push_back(d.y[i]);
  for (auto i : split.test) yte.push_back(d.y[i]);
  const std::vector<std::pair<std::string, ModelSpec>> models{
      {"tree", TreeSpec{}}, {"linear_svm", SvmSpec{}}, {"mlp", MlpSpec{}}};
  std::string accs;
  for (const auto& [name, spec] : models) {
    const auto m = fit(spec, xtr, ytr, 2);
    const double a_tr = accuracy(ytr, m.predict(xtr)), a_te = accuracy(yte, m.predict(xte));
    o.check(a_tr == 1.0 && a_te == 1.0, fmt::format("{} train {:.3f} test {:.3f}", name, a_tr, a_te));
    accs += fmt::format("{}{} {:.0f}/{:.0f}%", accs.empty() ? "" : ", ", name, 100 * a_tr, 100 * a_te);
  }
  o.check(elapsed(t0) < 5.0, "runtime");
  if (o.pass) o.detail = "41/11 split, train/test: " + accs;
  return o;
}

// 3
Outcome forest_spectral() {
  Outcome o;
  const auto t0 = Clock::now();
  int at95 = 0;
  double lowest = 1.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto d = fixtures::gaussian_spectral(49, 224, 2.0, seed);
    const auto split = train_test_split(49, SplitSpec{0.8, seed});
    std::vector<int> ytr, yte;
    for (auto i : split.train) ytr.push_back(d.y[i]);
    for (auto i : split.test) yte.push_back(d.y[i]);
    ForestSpec spec;
    spec.seed = seed;
    const auto m = fit(spec, d.x.select_rows(split.train), ytr, 3);
    const double a = accuracy(yte, m.predict(d.x.select_rows(split.test)));
    lowest = std::min(lowest, a);
    at95 += a >= 0.95;
  }
  o.check(lowest >= 0.90, fmt::format("lowest accuracy {:.3f}", lowest));
  o.check(at95 >= 7, fmt::format("{} of 10 seeds at 0.95", at95));

  const auto r = report_from_confusion({{12, 1, 0}, {0, 17, 1}, {1, 0, 17}}, {"ASIG", "CTR", "SIG"});
  const std::string expected =
      "GROUP         Precision     Recall   F1-score    Support\n"
      "\n"
      "ASIG               0.92       0.92       0.92         13\n"
      "CTR                0.94       0.94       0.94         18\n"
      "SIG                0.94       0.94       0.94         18\n"
      "\n"
      "Accuracy                                 0.94         49\n"
      "Macro avg          0.94       0.94       0.94         49\n"
      "Weighted avg       0.94       0.94       0.94         49\n";
  o.check(r.render_text() == expected, "report layout");
  o.check(elapsed(t0) < 30.0, "runtime");
  if (o.pass) o.detail = fmt::format("min test accuracy {:.2f}, {}/10 seeds >= 0.95, report layout exact", lowest, at95);
  return o;
}

// 4
Method11Result run_method11(const fixtures::ClusterCubes& data, std::uint64_t seed) {
  MnfAccumulator acc(data.cubes.front().bands());
  Matrix spectra(data.cubes.size(), data.cubes.front().bands());
  for (std::size_t s = 0; s < data.cubes.size(); ++s) {
    const auto& cube = data.cubes[s];
    const Roi roi = extract_center_roi(cube.lines(), cube.samples(), cube.lines());
    acc.add(crop(cube, roi), NoiseShift::horizontal);
    const auto spec = roi_mean_spectrum(cube, roi, "s");
    for (std::size_t b = 0; b < spec.mean_reflectance.size(); ++b) spectra(s, b) = spec.mean_reflectance[b];
  }
  MnfClusterSettings settings;
  settings.mnf_components = 6;
  settings.pca_components = 2;
  settings.k = 3;
  return method11_analysis(acc.finish(), spectra, data.auxiliary, settings, seed);
}

Outcome method11() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto data = fixtures::three_cluster_cubes(10, 12, 32, 77);
  const auto a = run_method11(data, 5);
  const auto b = run_method11(data, 5);
  const double sil = a.clusters.silhouette_mean.value_or(-1.0);
  const double p = a.anova ? a.anova->p_value : 1.0;
  o.check(sil > 0.7, fmt::format("silhouette {:.3f}", sil));
  o.check(p < 1e-6, fmt::format("anova p {:.2e}", p));
  const bool same = a.clusters.assignments == b.clusters.assignments && a.clusters.centroids == b.clusters.centroids &&
                    a.reduced == b.reduced && a.pca.scores == b.pca.scores &&
                    a.clusters.silhouette_mean == b.clusters.silhouette_mean && b.anova && a.anova->f == b.anova->f;
  o.check(same, "runs differ");
  o.check(elapsed(t0) < 10.0, "runtime");
  if (o.pass) o.detail = fmt::format("silhouette {:.3f}, ANOVA p {:.1e}, repeat run bit-identical", sil, p);
  return o;
}

// 5
Outcome mnf_pca() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t bands = 3 + seed % 6;
    const Matrix x = fixtures::random_matrix(40 + 3 * seed, bands, 500 + seed);
    const auto m = mnf_with_noise(x, Matrix::identity(bands));
    const auto p = pca(x, bands);
    for (std::size_t k = 0; k < bands; ++k) {
      double norm = 0.0, dot = 0.0;
      for (std::size_t b = 0; b < bands; ++b) {
        norm += m.transform(b, k) * m.transform(b, k);
        dot += m.transform(b, k) * p.loadings(b, k);
      }
      const double sign = dot < 0 ? -1.0 : 1.0;
      for (std::size_t b = 0; b < bands; ++b)
        worst = std::max(worst, std::abs(sign * m.transform(b, k) / std::sqrt(norm) - p.loadings(b, k)));
    }
  }
  o.check(worst < 1e-6, fmt::format("max direction difference {:.2e}", worst));
  if (o.pass) o.detail = fmt::format("20 datasets, max direction difference {:.1e}", worst);
  return o;
}

// 6
double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
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

std::vector<double> rank_oracle(const std::vector<double>& v) {
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

double tau_b_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  double c = 0, d = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double a = x[i] - x[j], b = y[i] - y[j];
      if (a == 0 && b == 0) continue;
      if (a == 0) ++tx;
      else if (b == 0) ++ty;
      else if (a * b > 0) ++c;
      else ++d;
    }
  return (c - d) / std::sqrt((c + d + tx) * (c + d + ty));
}

Outcome correlation_oracles() {
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const std::size_t n = 10 + seed % 40;
    const auto x = fixtures::tied_vector(n, 4 + seed % 5, seed);
    const auto y = fixtures::tied_vector(n, 3 + seed % 7, seed + 1000);
    worst = std::max(worst, std::abs(correlation(x, y, CorrelationMethod::pearson).coefficient - pearson_oracle(x, y)));
    worst = std::max(worst, std::abs(correlation(x, y, CorrelationMethod::spearman).coefficient -
                                     pearson_oracle(rank_oracle(x), rank_oracle(y))));
    worst = std::max(worst, std::abs(correlation(x, y, CorrelationMethod::kendall).coefficient - tau_b_oracle(x, y)));
  }
  o.check(worst < 1e-12, fmt::format("max abs diff {:.2e}", worst));
  const std::vector<double> a{1, 2, 3, 4}, b{1, 3, 2, 4};
  const double r = correlation(a, b, CorrelationMethod::pearson).coefficient;
  o.check(r == 0.8, fmt::format("r = {:.17g}", r));
  if (o.pass) o.detail = fmt::format("100 tied vectors, max abs diff {:.1e}; r = 0.8 exact", worst);
  return o;
}

// 7
Outcome band_significance_null() {
  Outcome o;
  const std::size_t bands = 224, n = 52;
  std::string fractions;
  for (auto method : {CorrelationMethod::pearson, CorrelationMethod::kendall}) {
    double flagged = 0.0;
    bool copied_ok = true;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const Matrix spectra = fixtures::random_matrix(n, bands, 9000 + seed);
      const auto target = fixtures::random_vector(n, 19000 + seed);
      BandSignificanceOptions opt;
      opt.method = method;
      const auto res = band_significance(spectra, target, opt);
      for (const auto& b : res) flagged += b.significant;
      const std::size_t copy = seed % bands;
      const auto hit = band_significance(spectra, spectra.column(copy), opt);
      copied_ok = copied_ok && hit[copy].significant && std::abs(hit[copy].coefficient - 1.0) < 1e-12;
    }
    const double frac = flagged / (50.0 * bands);
    o.check(frac >= 0.02 && frac <= 0.08, fmt::format("{} null fraction {:.4f}", to_string(method), frac));
    o.check(copied_ok, to_string(method) + " copied band");
    fractions += fmt::format("{}{} {:.4f}", fractions.empty() ? "" : ", ", to_string(method), frac);
  }
  if (o.pass) o.detail = "null fraction " + fractions + "; copied band flagged with r = 1";
  return o;
}

// 8
Outcome envi_round_trip() {
  Outcome o;
  const DataType types[] = {DataType::float32, DataType::uint16};
  const Interleave layouts[] = {Interleave::bsq, Interleave::bil, Interleave::bip};
  const ByteOrder orders[] = {ByteOrder::little, ByteOrder::big};
  SplitMix64 rng(808);
  int ok = 0;
  for (int c = 0; c < 30; ++c) {
    const DataType dt = types[c % 2];
    const Interleave il = layouts[(c / 2) % 3];
    const ByteOrder bo = orders[(c / 6) % 2];
    const HyperCube cube = fixtures::random_cube(1 + rng.below(9), 1 + rng.below(9), 1 + rng.below(12), 800 + c,
                                                 dt == DataType::uint16);
    const EnviBlob blob = write_cube(cube, EnviWriteOptions{il, dt, bo});
    const EnviHeader h = parse_envi_header(blob.header);
    const HyperCube back = read_cube(h, blob.payload);
    const EnviBlob again = write_cube(back, EnviWriteOptions{il, dt, bo});
    const bool same = back.values() == cube.values() && again.payload == blob.payload && h.interleave == il &&
                      h.data_type == dt && h.byte_order == bo;
    o.check(same, fmt::format("case {}", c));
    ok += same;
  }
  if (o.pass) o.detail = fmt::format("{}/30 cases bit-exact", ok);
  return o;
}

// 9
Outcome glcm_texture() {
  Outcome o;
  const GlcmProps flat = glcm_props(compute_glcm(std::vector<double>(64, 128.0), 8, 8, 8, GlcmOffset{0, 1}));
  o.check(flat.contrast == 0.0 && flat.energy == 1.0 && flat.homogeneity == 1.0 && flat.correlation == 1.0,
          "constant patch");
  LevelPlane stripe{8, 8, 2, std::vector<std::uint16_t>(64)};
  for (std::size_t i = 0; i < 64; ++i) stripe.data[i] = static_cast<std::uint16_t>(i % 2);
  const GlcmProps s = glcm_props(compute_glcm(stripe, GlcmOffset{0, 1}));
  o.check(std::abs(s.contrast - 1.0) < 1e-12 && std::abs(s.energy - std::sqrt(0.5)) < 1e-12 &&
              std::abs(s.homogeneity - 0.5) < 1e-12 && std::abs(s.correlation + 1.0) < 1e-12,
          fmt::format("stripe ({}, {}, {}, {})", s.contrast, s.energy, s.homogeneity, s.correlation));
  if (o.pass) o.detail = "constant (0, 1, 1, 1) exact; stripe (1, sqrt 0.5, 0.5, -1)";
  return o;
}

// 10
Outcome pls_lasso() {
  Outcome o;
  const Matrix x = fixtures::random_matrix(30, 5, 1010);
  const auto y = fixtures::random_vector(30, 1011);
  const OlsSummary ols = ols_fit(add_intercept(x), y, {"const", "a", "b", "c", "d", "e"});
  const Matrix pred = pls_predict(pls_fit(x, y, 5), x);
  double pls_err = 0.0;
  for (std::size_t i = 0; i < 30; ++i) pls_err = std::max(pls_err, std::abs(pred(i, 0) - ols.fitted[i]));
  o.check(pls_err < 1e-8, fmt::format("pls {:.2e}", pls_err));

  const auto l0 = lasso_fit(x, y, 0.0);
  double lasso_err = std::abs(l0.intercept - ols.coefficients[0].coef);
  for (std::size_t j = 0; j < 5; ++j) lasso_err = std::max(lasso_err, std::abs(l0.coefficients[j] - ols.coefficients[j + 1].coef));
  o.check(lasso_err < 1e-6, fmt::format("lasso(0) {:.2e}", lasso_err));
  const auto big = lasso_fit(x, y, 1.01 * lasso_lambda_max(x, y));
  o.check(std::all_of(big.coefficients.begin(), big.coefficients.end(), [](double b) { return b == 0.0; }),
          "lasso above lambda max");

  Matrix u(6, 1);
  const double col[] = {1, -1, 2, -2, 1, -1};
  for (int i = 0; i < 6; ++i) u(i, 0) = col[i] / std::sqrt(12.0);
  const std::vector<double> yu{2.0, 0.5, 3.0, -1.0, 1.5, 0.0};
  double b = 0.0, ym = 0.0;
  for (double v : yu) ym += v / 6.0;
  for (int i = 0; i < 6; ++i) b += u(i, 0) * (yu[i] - ym);
  double st_err = 0.0;
  for (double lambda : {0.0, 0.3, 1.0, 2.5, 10.0}) {
    const double want = b > 0 ? std::max(b - lambda, 0.0) : std::min(b + lambda, 0.0);
    st_err = std::max(st_err, std::abs(lasso_fit(u, yu, lambda).coefficients[0] - want));
  }
  o.check(st_err < 1e-10, fmt::format("soft threshold {:.2e}", st_err));
  if (o.pass)
    o.detail = fmt::format("PLS vs OLS {:.1e}, LASSO(0) vs OLS {:.1e}, soft threshold {:.1e}", pls_err, lasso_err,
                           st_err);
  return o;
}

// 11
Outcome mlp_gradient() {
  Outcome o;
  const Matrix x = fixtures::random_matrix(10, 14, 1111);
  std::vector<int> y2, y3;
  for (int i = 0; i < 10; ++i) {
    y2.push_back(i % 2);
    y3.push_back(i % 3);
  }
  const double e_sig = gradient_check(Mlp({14, 64, 32, 1}, MlpOutput::sigmoid, 11), x, class_targets(y2, 2));
  const double e_soft = gradient_check(Mlp({14, 16, 8, 3}, MlpOutput::softmax, 12), x, class_targets(y3, 3));
  const double worst = std::max(e_sig, e_soft);
  o.check(worst < 1e-4, fmt::format("max rel err {:.2e}", worst));
  if (o.pass) o.detail = fmt::format("10 samples, max rel err {:.1e}", worst);
  return o;
}

// 12
Outcome two_way_anova() {
  Outcome o;
  const std::vector<double> v{1, 2, 3, 4, 1, 2, 3, 4};
  const std::vector<std::string> a{"T0", "T0", "T0", "T0", "T12", "T12", "T12", "T12"};
  const std::vector<std::string> b{"SIG", "SIG", "CTR", "CTR", "SIG", "SIG", "CTR", "CTR"};
  const AnovaTwoWay r = anova_twoway(v, a, b);
  o.check(r.a.f == 0.0 && r.b.f == 16.0 && r.interaction.f == 0.0,
          fmt::format("F = ({}, {}, {})", r.a.f, r.b.f, r.interaction.f));
  const std::string table = format_effect_p_table({{"C16:0", r}});
  const std::string head = table.substr(0, table.find('\n'));
  const auto pt = head.find("TIME_p"), pg = head.find("GROUP_p"), pi = head.find("INT_p");
  o.check(pt != std::string::npos && pg != std::string::npos && pi != std::string::npos && pt < pg && pg < pi,
          "column headers");
  if (o.pass) o.detail = "F = (0, 16, 0) exact; columns TIME_p GROUP_p INT_p";
  return o;
}

}  // namespace

int main() {
  const auto start = Clock::now();
  Outcome (*const criteria[])() = {
      ols_engine,        separable_classifiers,  forest_spectral, method11,     mnf_pca,
      correlation_oracles, band_significance_null, envi_round_trip, glcm_texture, pls_lasso,
      mlp_gradient,      two_way_anova};
  bool all = true;
  for (std::size_t i = 0; i < std::size(criteria); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    fmt::print("criterion {:>2}: {} ({}; {:.2f} s)\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail, elapsed(t0));
    std::fflush(stdout);
  }

  // 13: the unit suite in one process plus this run
  const auto t0 = Clock::now();
  const int rc = std::system(MILKSPEC_UNIT_PATH " --gtest_brief=1 > /dev/null 2>&1");
  const double unit = elapsed(t0), total = elapsed(start);
  const bool ok13 = rc == 0 && total < 120.0;
  all = all && ok13;
  fmt::print("criterion 13: {} (unit suite {:.2f} s, exit {}; whole suite {:.2f} s)\n", ok13 ? "PASS" : "FAIL", unit,
             rc, total);
  return all ? 0 : 1;
}
