#pragma once

#include <cstddef>
#include <vector>

#include "milkspec/core/envi.hpp"
#include "milkspec/core/matrix.hpp"
#include "milkspec/kernels/exec.hpp"

namespace milkspec {

struct PcaResult {
  Matrix scores;                  // samples × components
  Matrix loadings;                // features × components, orthonormal columns
  std::vector<double> explained_variance;        // retained eigenvalues
  std::vector<double> explained_variance_ratio;  // λᵢ / Σ all λ
  std::vector<double> means;
};

/// Covariance (n − 1) eigendecomposition of the column-centred data. The
/// largest-magnitude entry of each loading is made positive. Throws
/// std::invalid_argument unless 1 ≤ n_components ≤ min(samples − 1,
/// features), and DegenerateError when the data have no variance.
PcaResult pca(const Matrix& data, std::size_t n_components, Exec exec = Exec::parallel);

/// Scores of new rows under a fitted PCA.
Matrix pca_transform(const PcaResult& model, const Matrix& data);

enum class NoiseShift { horizontal, vertical };

struct MnfOptions {
  NoiseShift shift = NoiseShift::horizontal;
  double epsilon = 1e-10;
  Exec exec = Exec::parallel;
};

struct MnfResult {
  Matrix components;               // pixels × bands, descending SNR order
  Matrix transform;                // bands × bands; components = (X − mean)·transform
  std::vector<double> snr_eigenvalues;
  Matrix noise_covariance;         // after regularization
  std::vector<double> means;
  /// The noise estimate had zero trace and fell back to ε·I.
  bool regularization_fallback = false;
};

/// Noise covariance from shift differences over a lines × samples pixel
/// grid (rows of `pixels` in line-major order), halved.
Matrix shift_difference_noise(const Matrix& pixels, std::size_t lines, std::size_t samples, NoiseShift shift,
                              Exec exec = Exec::parallel);

/// Minimum noise fraction over a pixel grid. Throws DegenerateError when
/// no shift pairs exist or there are fewer than bands + 1 pixels.
MnfResult mnf(const Matrix& pixels, std::size_t lines, std::size_t samples, const MnfOptions& options = {});
MnfResult mnf(const HyperCube& roi, const MnfOptions& options = {});
/// Same transform with a caller-supplied noise covariance.
MnfResult mnf_with_noise(const Matrix& pixels, const Matrix& noise_covariance, const MnfOptions& options = {});

/// Pixel matrix (lines·samples × bands) of a cube.
Matrix pixel_matrix(const HyperCube& cube);

/// MNF from already estimated covariances; `components` stays empty.
MnfResult mnf_from_covariances(const Matrix& data_covariance, const Matrix& noise_covariance,
                               std::vector<double> means, const MnfOptions& options = {});

/// Pools pixel and shift-difference statistics over several regions (one
/// per sample) without keeping the pixels. Pairs never straddle regions.
class MnfAccumulator {
 public:
  explicit MnfAccumulator(std::size_t bands);

  void add(const Matrix& pixels, std::size_t lines, std::size_t samples, NoiseShift shift, Exec exec = Exec::parallel);
  void add(const HyperCube& roi, NoiseShift shift, Exec exec = Exec::parallel);

  std::size_t pixel_count() const { return data_.n; }
  std::size_t pair_count() const { return noise_.n; }
  /// Throws DegenerateError when too few pixels or pairs were added.
  MnfResult finish(const MnfOptions& options = {}) const;

 private:
  struct Moments {
    std::size_t n = 0;
    std::vector<double> mean;
    Matrix scatter;  // Σ (x − mean)(x − mean)ᵀ
    void merge(const Matrix& block, Exec exec);
  };
  std::size_t bands_;
  Moments data_;
  Moments noise_;
};

/// Applies a fitted MNF transform to new rows.
Matrix mnf_transform(const MnfResult& model, const Matrix& data);

}  // namespace milkspec
