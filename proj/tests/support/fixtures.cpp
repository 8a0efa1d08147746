#include "fixtures.hpp"

#include <cmath>
#include <fstream>

#include <unistd.h>

#include <fmt/format.h>
#include <json.hpp>

#include "milkspec/learn/rng.hpp"
#include "milkspec/util/text.hpp"

namespace fixtures {

using milkspec::SplitMix64;
namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  path_ = fs::temp_directory_path() /
          fmt::format("milkspec_{}_{}_{}", tag, static_cast<long>(::getpid()), counter++);
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

std::vector<double> tied_vector(std::size_t n, int levels, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(rng.below(static_cast<std::size_t>(levels)));
  return v;
}

milkspec::HyperCube random_cube(std::size_t lines, std::size_t samples, std::size_t bands, std::uint64_t seed,
                                bool integral) {
  SplitMix64 rng(seed);
  milkspec::EnviHeader h;
  h.lines = lines;
  h.samples = samples;
  h.bands = bands;
  h.data_type = integral ? milkspec::DataType::uint16 : milkspec::DataType::float32;
  std::vector<double> v(lines * samples * bands);
  for (auto& x : v) {
    if (integral) x = static_cast<double>(rng.below(65536));
    else x = static_cast<double>(static_cast<float>(rng.normal() * 100.0));
  }
  return milkspec::HyperCube(h, std::move(v));
}

Labeled separable_two_class(std::size_t rows, std::size_t features, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Labeled out{Matrix(rows, features), {}};
  for (std::size_t i = 0; i < rows; ++i) {
    const int label = static_cast<int>(i % 2);
    out.y.push_back(label);
    for (std::size_t j = 0; j < features; ++j) out.x(i, j) = rng.normal() * 0.5;
    // first feature carries the class with a gap of 2 around zero
    out.x(i, 0) = (label == 1 ? 1.0 : -1.0) * (1.0 + rng.uniform());
  }
  return out;
}

Labeled gaussian_spectral(std::size_t rows, std::size_t bands, double separation, std::uint64_t seed) {
  SplitMix64 rng(seed);
  // smooth baseline shared by all classes, class k shifted by (k - 1) * separation
  std::vector<double> base(bands);
  for (std::size_t b = 0; b < bands; ++b) base[b] = 5.0 + 2.0 * std::sin(3.0 * static_cast<double>(b) / bands);
  Labeled out{Matrix(rows, bands), {}};
  for (std::size_t i = 0; i < rows; ++i) {
    const int label = static_cast<int>(i % 3);
    out.y.push_back(label);
    for (std::size_t b = 0; b < bands; ++b) out.x(i, b) = base[b] + separation * (label - 1) + rng.normal();
  }
  return out;
}

ClusterCubes three_cluster_cubes(std::size_t per_cluster, std::size_t side, std::size_t bands, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::vector<double>> base(3, std::vector<double>(bands));
  for (std::size_t b = 0; b < bands; ++b) {
    const double t = static_cast<double>(b) / static_cast<double>(bands);
    base[0][b] = 0.40 + 0.10 * t;
    base[1][b] = 0.55 - 0.15 * t + 0.05 * std::sin(6.0 * t);
    base[2][b] = 0.30 + 0.30 * t * t;
  }
  ClusterCubes out;
  for (std::size_t s = 0; s < 3 * per_cluster; ++s) {
    const int k = static_cast<int>(s % 3);
    milkspec::EnviHeader h;
    h.lines = side;
    h.samples = side;
    h.bands = bands;
    std::vector<double> v(side * side * bands);
    const double offset = 0.01 * rng.normal();
    for (std::size_t p = 0; p < side * side; ++p)
      for (std::size_t b = 0; b < bands; ++b)
        v[p * bands + b] = static_cast<double>(static_cast<float>(base[k][b] + offset + 0.01 * rng.normal()));
    out.cubes.emplace_back(h, std::move(v));
    out.cluster.push_back(k);
    out.auxiliary.push_back(1.0 + 0.5 * k + 0.02 * rng.normal());
  }
  return out;
}

fs::path write_pipeline_fixture(const fs::path& root, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const std::size_t per_cell = 4;
  const std::size_t side = 10, bands = 24, roi = 8;
  fs::create_directories(root / "cubes");
  fs::create_directories(root / "patches");

  std::vector<double> wl(bands);
  for (std::size_t b = 0; b < bands; ++b) wl[b] = 950.0 + 30.0 * static_cast<double>(b);
  const char* groups[] = {"SIG", "CTR", "ASIG"};

  std::string chem = "sample_id,group,time,polyphenols,frap,C14:0,C16:0,C18:0,C18:1c9\n";
  std::size_t idx = 0;
  for (int t = 0; t < 2; ++t) {
    for (int g = 0; g < 3; ++g) {
      for (std::size_t r = 0; r < per_cell; ++r, ++idx) {
        const std::string id = fmt::format("S{:02}", idx + 1);
        // cube: spectrum shape follows the group
        milkspec::EnviHeader h;
        h.lines = side;
        h.samples = side;
        h.bands = bands;
        h.wavelengths = milkspec::WavelengthGrid(wl);
        std::vector<double> v(side * side * bands);
        const double offset = 0.01 * rng.normal();
        for (std::size_t p = 0; p < side * side; ++p)
          for (std::size_t b = 0; b < bands; ++b) {
            const double x = static_cast<double>(b) / static_cast<double>(bands);
            const double shape = g == 0 ? 0.4 + 0.1 * x : g == 1 ? 0.55 - 0.15 * x : 0.3 + 0.3 * x * x;
            v[p * bands + b] = static_cast<double>(static_cast<float>(shape + offset + 0.01 * rng.normal()));
          }
        milkspec::save_envi(root / "cubes" / id, milkspec::HyperCube(h, std::move(v)),
                            milkspec::EnviWriteOptions{});

        // patch: brightness follows the time point, texture is random
        milkspec::RgbPatch patch(16, 16);
        const int base = t == 0 ? 170 : 80;
        for (std::size_t row = 0; row < 16; ++row)
          for (std::size_t col = 0; col < 16; ++col)
            for (std::size_t ch = 0; ch < 3; ++ch) {
              const int val = base + static_cast<int>(ch) * 10 + static_cast<int>(rng.below(30));
              patch.set(ch, row, col, static_cast<std::uint8_t>(val));
            }
        milkspec::text::write_file((root / "patches" / (id + ".ppm")).string(), milkspec::format_ppm(patch));

        const double poly = 1.0 + 0.4 * g + 0.1 * t + 0.05 * rng.normal();
        const double frap = 0.5 + 0.1 * g + 0.02 * rng.normal();
        chem += fmt::format("{},{},T{},{:.4f},{:.4f},{:.3f},{:.3f},{:.3f},{:.3f}\n", id, groups[g], t == 0 ? 0 : 12,
                            poly, frap, 10.0 + g + 0.3 * rng.normal(), 30.0 - g + 0.5 * rng.normal(),
                            9.0 + 0.5 * g + 0.3 * rng.normal(), 20.0 + 0.4 * rng.normal());
      }
    }
  }
  milkspec::text::write_file((root / "chemistry.csv").string(), chem);

  nlohmann::json cfg = {
      {"inputs", {{"cube_dir", "cubes"}, {"patch_dir", "patches"}, {"chemistry_csv", "chemistry.csv"}}},
      {"roi_side", roi},
      {"seed", seed},
      {"output_dir", "out"},
      {"analyses",
       {"group_summary", "effects", "correlate", "pca", "mnf_cluster", "cluster_validate", "regress", "classify"}},
      {"mnf_cluster", {{"mnf_components", 4}, {"pca_components", 2}, {"k", 3}, {"auxiliary", "polyphenols"}}},
      {"regress",
       {{"source", "image"},
        {"target", "polyphenols"},
        {"features", {"Mean color channel 0", "Std color channel 0", "Texture contrast"}}}},
      {"classify",
       {{"source", "image"},
        {"target", "time"},
        {"features", {"Mean color channel 0", "Mean color channel 1", "Mean color channel 2", "Texture contrast"}},
        {"model", {{"kind", "forest"}, {"n_trees", 25}}},
        {"train_fraction", 0.75}}},
  };
  const fs::path path = root / "config.json";
  milkspec::text::write_file(path.string(), cfg.dump(2));
  return path;
}

}  // namespace fixtures
