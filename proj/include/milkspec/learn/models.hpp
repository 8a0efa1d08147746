#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <optional>
#include <variant>
#include <vector>

#include "milkspec/core/matrix.hpp"
#include "milkspec/kernels/exec.hpp"
#include "milkspec/learn/mlp.hpp"
#include "milkspec/learn/tree.hpp"

namespace milkspec {

struct KnnSpec {
  int k = 5;
};

struct TreeSpec {
  int max_depth = 0;  // 0 = unlimited
  int min_leaf = 1;
};

struct ForestSpec {
  int n_trees = 100;
  int max_depth = 0;
  int min_leaf = 1;
  int features_per_split = 0;  // 0 = floor(sqrt(features))
  std::uint64_t seed = 42;
  bool bootstrap = true;
  Exec exec = Exec::parallel;
};

struct SvmSpec {
  double lambda = 0.01;
  int epochs = 20;
  std::uint64_t seed = 42;
};

struct MlpSpec {
  std::vector<std::size_t> hidden{64, 32};
  int epochs = 3;
  double learning_rate = 0.1;
  int batch_size = 4;
  std::uint64_t seed = 42;
};

using ModelSpec = std::variant<KnnSpec, TreeSpec, ForestSpec, SvmSpec, MlpSpec>;

/// "knn", "tree", "forest", "linear_svm" or "mlp".
std::string model_kind(const ModelSpec& spec);

/// Throws ConfigError for counts below 1 or non-positive rates.
void validate_model_spec(const ModelSpec& spec);

/// JSON object {"kind": ..., parameters...}. Unknown keys raise ConfigError.
ModelSpec parse_model_spec(std::string_view json_text);
std::string model_spec_to_json(const ModelSpec& spec);

/// Sets a numeric parameter by its config key (e.g. "lambda", "k",
/// "n_trees"). Throws ConfigError when the kind has no such key.
void set_model_param(ModelSpec& spec, std::string_view name, double value);

/// Per-column centring and scaling learned from training rows; zero-spread
/// columns keep scale 1.
class Standardizer {
 public:
  Standardizer() = default;
  explicit Standardizer(const Matrix& train);

  Matrix apply(const Matrix& x) const;
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& scales() const { return scales_; }

 private:
  std::vector<double> means_;
  std::vector<double> scales_;
};

/// k nearest neighbours by Euclidean distance. Equal distances prefer the
/// lower training row; equal votes the lower class id.
class KnnModel {
 public:
  KnnModel() = default;
  KnnModel(Matrix train, std::vector<int> labels, int n_classes, int k);
  std::vector<int> predict(const Matrix& x) const;

 private:
  Matrix train_;
  std::vector<int> labels_;
  int n_classes_ = 0;
  int k_ = 1;
};

/// Pegasos hinge-loss subgradient descent; the bias is the weight of an
/// appended constant feature.
/// Two classes train one separator (positive = class 1); more classes train
/// one-vs-rest separators and the highest margin wins, ties to the lowest id.
class LinearSvm {
 public:
  LinearSvm() = default;
  LinearSvm(const Matrix& x, std::span<const int> y, int n_classes, const SvmSpec& spec);

  std::vector<int> predict(const Matrix& x) const;
  /// samples × separators decision values.
  Matrix decision_function(const Matrix& x) const;
  const Matrix& weights() const { return w_; }
  const std::vector<double>& bias() const { return b_; }

 private:
  Matrix w_;  // separators × features
  std::vector<double> b_;
  int n_classes_ = 0;
};

class TrainedModel {
 public:
  using Impl = std::variant<KnnModel, DecisionTree, RandomForest, LinearSvm, Mlp>;

  TrainedModel(ModelSpec spec, Impl impl, std::optional<Standardizer> scaler, std::size_t n_features, int n_classes);

  const ModelSpec& spec() const { return spec_; }
  const Impl& impl() const { return impl_; }
  const std::optional<Standardizer>& standardizer() const { return scaler_; }
  std::size_t n_features() const { return n_features_; }
  int n_classes() const { return n_classes_; }

  /// Throws std::invalid_argument on a feature-count mismatch.
  std::vector<int> predict(const Matrix& x) const;
  /// The matrix the learner sees (standardized for knn, svm and mlp).
  Matrix prepared(const Matrix& x) const;

 private:
  ModelSpec spec_;
  Impl impl_;
  std::optional<Standardizer> scaler_;
  std::size_t n_features_ = 0;
  int n_classes_ = 0;
};

/// Labels are class ids 0..C−1; C is one more than the largest label unless
/// `n_classes` is given. Throws std::invalid_argument for an empty training
/// set or negative labels.
TrainedModel fit(const ModelSpec& spec, const Matrix& x, std::span<const int> y, int n_classes = 0);
std::vector<int> predict(const TrainedModel& model, const Matrix& x);

double accuracy(std::span<const int> truth, std::span<const int> predicted);

}  // namespace milkspec
