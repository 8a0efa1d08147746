#include "milkspec/numerics/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "milkspec/error.hpp"
#include "milkspec/kernels/covariance.hpp"
#include "milkspec/numerics/eigen.hpp"

namespace milkspec {

PcaResult pca(const Matrix& data, std::size_t k, Exec exec) {
  const std::size_t n = data.rows(), p = data.cols();
  if (n < 2) throw std::invalid_argument("pca: need at least 2 samples");
  if (k < 1 || k > std::min(n - 1, p)) throw std::invalid_argument("pca: n_components out of range");

  PcaResult r;
  r.means = column_means(data);
  const Matrix centered = center_columns(data, r.means);
  const auto eig = sym_eigen(kernels::covariance(centered, exec));
  double total = 0.0;
  for (double l : eig.eigenvalues) total += std::max(0.0, l);
  if (!(total > 0.0)) throw DegenerateError("pca: data have zero variance");

  r.loadings = eig.eigenvectors.left_cols(k);
  normalize_column_signs(r.loadings);
  for (std::size_t i = 0; i < k; ++i) {
    const double l = std::max(0.0, eig.eigenvalues[i]);
    r.explained_variance.push_back(l);
    r.explained_variance_ratio.push_back(l / total);
  }
  r.scores = centered * r.loadings;
  return r;
}

Matrix pca_transform(const PcaResult& model, const Matrix& data) {
  if (data.cols() != model.means.size()) throw std::invalid_argument("pca_transform: feature count mismatch");
  return center_columns(data, model.means) * model.loadings;
}

Matrix pixel_matrix(const HyperCube& cube) {
  Matrix m(cube.lines() * cube.samples(), cube.bands());
  std::copy(cube.values().begin(), cube.values().end(), m.data().begin());
  return m;
}

namespace {
Matrix shift_differences(const Matrix& pixels, std::size_t lines, std::size_t samples, NoiseShift shift);
}  // namespace

Matrix shift_difference_noise(const Matrix& pixels, std::size_t lines, std::size_t samples, NoiseShift shift,
                              Exec exec) {
  const Matrix d = shift_differences(pixels, lines, samples, shift);
  if (d.rows() < 2) throw DegenerateError("mnf: region has no shift pairs for noise estimation");
  Matrix cov = kernels::covariance(center_columns(d, column_means(d)), exec);
  for (double& v : cov.data()) v *= 0.5;
  return cov;
}

MnfResult mnf_from_covariances(const Matrix& cov, const Matrix& noise_in, std::vector<double> means,
                               const MnfOptions& options) {
  const std::size_t bands = cov.rows();
  if (cov.cols() != bands || noise_in.rows() != bands || noise_in.cols() != bands || means.size() != bands)
    throw std::invalid_argument("mnf: covariance shapes disagree");

  MnfResult r;
  Matrix noise = noise_in;
  double trace = 0.0;
  for (std::size_t i = 0; i < bands; ++i) trace += noise(i, i);
  const double ridge = trace > 0.0 ? options.epsilon * trace / static_cast<double>(bands) : options.epsilon;
  r.regularization_fallback = !(trace > 0.0);
  for (std::size_t i = 0; i < bands; ++i) noise(i, i) += ridge;
  r.noise_covariance = noise;

  // Σ_N^{-1/2} through the noise eigendecomposition
  const auto ne = sym_eigen(noise);
  Matrix whiten(bands, bands);
  for (std::size_t i = 0; i < bands; ++i)
    for (std::size_t j = 0; j < bands; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < bands; ++k) {
        const double l = ne.eigenvalues[k];
        if (l > 0.0) s += ne.eigenvectors(i, k) * ne.eigenvectors(j, k) / std::sqrt(l);
      }
      whiten(i, j) = s;
    }

  Matrix cw = whiten * cov * whiten;
  for (std::size_t i = 0; i < bands; ++i)
    for (std::size_t j = i + 1; j < bands; ++j) cw(i, j) = cw(j, i) = 0.5 * (cw(i, j) + cw(j, i));
  auto se = sym_eigen(cw);
  normalize_column_signs(se.eigenvectors);
  r.snr_eigenvalues = se.eigenvalues;
  for (double& v : r.snr_eigenvalues) v = std::max(0.0, v);
  r.transform = whiten * se.eigenvectors;
  r.means = std::move(means);
  return r;
}

namespace {

MnfResult mnf_core(const Matrix& pixels, const Matrix& noise, const MnfOptions& options) {
  const std::size_t n = pixels.rows(), bands = pixels.cols();
  if (noise.rows() != bands || noise.cols() != bands) throw std::invalid_argument("mnf: noise covariance shape mismatch");
  if (n < bands + 1) throw DegenerateError("mnf: need at least bands + 1 pixels");
  auto means = column_means(pixels);
  const Matrix centered = center_columns(pixels, means);
  MnfResult r = mnf_from_covariances(kernels::covariance(centered, options.exec), noise, std::move(means), options);
  r.components = centered * r.transform;
  return r;
}

Matrix shift_differences(const Matrix& pixels, std::size_t lines, std::size_t samples, NoiseShift shift) {
  if (pixels.rows() != lines * samples) throw std::invalid_argument("shift_difference_noise: grid shape mismatch");
  const std::size_t bands = pixels.cols();
  const bool horiz = shift == NoiseShift::horizontal;
  const std::size_t pair_lines = horiz ? lines : (lines > 0 ? lines - 1 : 0);
  const std::size_t pair_samples = horiz ? (samples > 0 ? samples - 1 : 0) : samples;
  Matrix d(pair_lines * pair_samples, bands);
  std::size_t k = 0;
  for (std::size_t l = 0; l < pair_lines; ++l)
    for (std::size_t s = 0; s < pair_samples; ++s, ++k) {
      const auto a = pixels.row(l * samples + s);
      const auto b = horiz ? pixels.row(l * samples + s + 1) : pixels.row((l + 1) * samples + s);
      for (std::size_t c = 0; c < bands; ++c) d(k, c) = a[c] - b[c];
    }
  return d;
}

}  // namespace

void MnfAccumulator::Moments::merge(const Matrix& block, Exec exec) {
  const std::size_t nb = block.rows(), p = block.cols();
  if (nb == 0) return;
  const auto mb = column_means(block);
  Matrix sb(p, p, 0.0);
  if (nb > 1) {
    sb = kernels::covariance(center_columns(block, mb), exec);
    for (double& v : sb.data()) v *= static_cast<double>(nb - 1);
  }
  if (n == 0) {
    n = nb;
    mean = mb;
    scatter = sb;
    return;
  }
  const double na = static_cast<double>(n), nbd = static_cast<double>(nb), nt = na + nbd;
  std::vector<double> delta(p);
  for (std::size_t c = 0; c < p; ++c) delta[c] = mb[c] - mean[c];
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) scatter(i, j) += sb(i, j) + delta[i] * delta[j] * na * nbd / nt;
  for (std::size_t c = 0; c < p; ++c) mean[c] += delta[c] * nbd / nt;
  n += nb;
}

MnfAccumulator::MnfAccumulator(std::size_t bands) : bands_(bands) {
  if (bands == 0) throw std::invalid_argument("MnfAccumulator: need at least one band");
}

void MnfAccumulator::add(const Matrix& pixels, std::size_t lines, std::size_t samples, NoiseShift shift, Exec exec) {
  if (pixels.cols() != bands_) throw std::invalid_argument("MnfAccumulator: band count mismatch");
  data_.merge(pixels, exec);
  noise_.merge(shift_differences(pixels, lines, samples, shift), exec);
}

void MnfAccumulator::add(const HyperCube& roi, NoiseShift shift, Exec exec) {
  add(pixel_matrix(roi), roi.lines(), roi.samples(), shift, exec);
}

MnfResult MnfAccumulator::finish(const MnfOptions& options) const {
  if (data_.n < bands_ + 1) throw DegenerateError("mnf: need at least bands + 1 pixels");
  if (noise_.n < 2) throw DegenerateError("mnf: region has no shift pairs for noise estimation");
  Matrix cov = data_.scatter, noise = noise_.scatter;
  for (double& v : cov.data()) v /= static_cast<double>(data_.n - 1);
  for (double& v : noise.data()) v /= 2.0 * static_cast<double>(noise_.n - 1);
  return mnf_from_covariances(cov, noise, data_.mean, options);
}

MnfResult mnf(const Matrix& pixels, std::size_t lines, std::size_t samples, const MnfOptions& options) {
  if (pixels.rows() < pixels.cols() + 1) throw DegenerateError("mnf: need at least bands + 1 pixels");
  return mnf_core(pixels, shift_difference_noise(pixels, lines, samples, options.shift, options.exec), options);
}

MnfResult mnf(const HyperCube& roi, const MnfOptions& options) {
  return mnf(pixel_matrix(roi), roi.lines(), roi.samples(), options);
}

MnfResult mnf_with_noise(const Matrix& pixels, const Matrix& noise_covariance, const MnfOptions& options) {
  return mnf_core(pixels, noise_covariance, options);
}

Matrix mnf_transform(const MnfResult& model, const Matrix& data) {
  if (data.cols() != model.means.size()) throw std::invalid_argument("mnf_transform: band count mismatch");
  return center_columns(data, model.means) * model.transform;
}

}  // namespace milkspec
