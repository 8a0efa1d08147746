#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "milkspec/core/envi.hpp"
#include "milkspec/core/matrix.hpp"
#include "milkspec/features/image.hpp"

namespace fixtures {

using milkspec::Matrix;

/// Temporary directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);
std::vector<double> random_vector(std::size_t n, std::uint64_t seed);
/// Integers in [0, levels) as doubles, so ties are frequent.
std::vector<double> tied_vector(std::size_t n, int levels, std::uint64_t seed);

milkspec::HyperCube random_cube(std::size_t lines, std::size_t samples, std::size_t bands, std::uint64_t seed,
                                bool integral = false);

/// `per_class` rows of each class around well separated centres; the
/// classes are linearly separable with margin.
struct Labeled {
  Matrix x;
  std::vector<int> y;
};
Labeled separable_two_class(std::size_t rows, std::size_t features, std::uint64_t seed);
/// Three Gaussian classes of spectra with unit noise per band; neighbouring
/// class means differ by `separation` in every band.
Labeled gaussian_spectral(std::size_t rows, std::size_t bands, double separation, std::uint64_t seed);

/// Per-sample ROI cubes drawn around three cluster spectra.
struct ClusterCubes {
  std::vector<milkspec::HyperCube> cubes;
  std::vector<int> cluster;
  std::vector<double> auxiliary;  // tracks the cluster
};
ClusterCubes three_cluster_cubes(std::size_t per_cluster, std::size_t side, std::size_t bands, std::uint64_t seed);

/// Writes cubes/, patches/, chemistry.csv and config.json (every analysis
/// selected) under `root`; returns the config path.
std::filesystem::path write_pipeline_fixture(const std::filesystem::path& root, std::uint64_t seed);

}  // namespace fixtures
