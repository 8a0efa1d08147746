// Serial reference vs OpenMP path for each kernel. Arg 0 = serial, 1 = parallel.

#include <cstddef>
#include <vector>

#include <benchmark/benchmark.h>

#include "milkspec/core/matrix.hpp"
#include "milkspec/features/glcm.hpp"
#include "milkspec/kernels/covariance.hpp"
#include "milkspec/kernels/cube_layout.hpp"
#include "milkspec/kernels/glcm_counts.hpp"
#include "milkspec/kernels/silhouette.hpp"
#include "milkspec/learn/rng.hpp"
#include "milkspec/learn/tree.hpp"
#include "milkspec/numerics/correlation.hpp"

using namespace milkspec;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

void BM_DecodeCube(benchmark::State& state) {
  const kernels::CubeLayout layout{256, 256, 64, Interleave::bil};
  const std::size_t n = layout.lines * layout.samples * layout.bands;
  std::vector<double> values(n);
  SplitMix64 rng(1);
  for (double& v : values) v = static_cast<double>(rng.below(4096));
  const auto payload = kernels::encode_canonical(values, layout, DataType::uint16, ByteOrder::big, Exec::serial);
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::decode_canonical(payload, layout, DataType::uint16, ByteOrder::big, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}

void BM_GlcmCounts(benchmark::State& state) {
  LevelPlane plane{1024, 1024, 64, std::vector<std::uint16_t>(1024 * 1024)};
  SplitMix64 rng(2);
  for (auto& v : plane.data) v = static_cast<std::uint16_t>(rng.below(64));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::glcm_counts(plane, GlcmOffset{0, 1}, exec_of(state)));
}

void BM_Covariance(benchmark::State& state) {
  Matrix x = random_matrix(4096, 128, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::covariance(x, exec_of(state)));
}

void BM_BandSignificance(benchmark::State& state) {
  const Matrix spectra = random_matrix(52, 224, 4);
  const Matrix t = random_matrix(52, 1, 5);
  const auto target = t.column(0);
  BandSignificanceOptions opt;
  opt.method = CorrelationMethod::kendall;
  opt.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(band_significance(spectra, target, opt));
}

void BM_Silhouette(benchmark::State& state) {
  const Matrix x = random_matrix(2000, 8, 6);
  std::vector<int> labels(x.rows());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 4);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::silhouette_values(x, labels, 4, exec_of(state)));
}

void BM_Forest(benchmark::State& state) {
  const Matrix x = random_matrix(200, 224, 7);
  std::vector<int> y(x.rows());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x(i, 0) + x(i, 1) > 0 ? 1 : 0;
  ForestParams p;
  p.n_trees = 64;
  p.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(fit_forest(x, y, 2, p));
}

}  // namespace

BENCHMARK(BM_DecodeCube)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GlcmCounts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Covariance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BandSignificance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Silhouette)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Forest)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
