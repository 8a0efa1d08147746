#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "milkspec/core/matrix.hpp"

namespace milkspec {

enum class MlpOutput {
  sigmoid,   // one unit, binary cross-entropy
  softmax,   // one unit per class, categorical cross-entropy
  identity,  // squared error, mean over samples of Σ (ŷ − y)²
};

struct MlpLayer {
  Matrix w;               // outputs × inputs
  std::vector<double> b;  // outputs
};

using MlpGradients = std::vector<MlpLayer>;

/// Fully connected network with ReLU hidden layers (ReLU'(0) = 0).
class Mlp {
 public:
  Mlp() = default;
  /// `sizes` = {inputs, hidden..., outputs}. Weights are drawn from
  /// N(0, 2/fan_in) with the seeded stream; biases start at zero.
  Mlp(std::vector<std::size_t> sizes, MlpOutput output, std::uint64_t seed);
  /// Explicit parameters (for tests and closed-form checks).
  Mlp(std::vector<MlpLayer> layers, MlpOutput output);

  MlpOutput output() const { return output_; }
  const std::vector<MlpLayer>& layers() const { return layers_; }
  std::vector<MlpLayer>& layers() { return layers_; }
  std::size_t inputs() const;
  std::size_t outputs() const;

  /// Output activations, samples × outputs.
  Matrix forward(const Matrix& x) const;
  /// Mean loss over the rows of x.
  double loss(const Matrix& x, const Matrix& targets) const;

  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> p);
  std::size_t parameter_count() const;

 private:
  std::vector<MlpLayer> layers_;
  MlpOutput output_ = MlpOutput::sigmoid;
};

/// Backpropagated gradient of Mlp::loss, same shapes as the layers.
MlpGradients mlp_gradient(const Mlp& model, const Matrix& x, const Matrix& targets);

std::vector<double> flatten(const MlpGradients& g);

/// Largest |analytic − numeric| / max(|analytic|, |numeric|, floor) over all
/// parameters, using central differences with step h.
double gradient_check(const Mlp& model, const Matrix& x, const Matrix& targets, double h = 1e-5,
                      double floor = 1e-6);

struct MlpTrainParams {
  std::vector<std::size_t> hidden{64, 32};
  int epochs = 3;
  double learning_rate = 0.1;
  int batch_size = 4;
  std::uint64_t seed = 42;
};

/// Mini-batch gradient descent on class labels 0..n_classes−1; two classes
/// use a single sigmoid unit, more use softmax. Rows are reshuffled every
/// epoch.
Mlp train_mlp(const Matrix& x, std::span<const int> y, int n_classes, const MlpTrainParams& params);

/// Class ids from network outputs (sigmoid: p > 0.5; softmax: argmax with
/// ties to the lowest id).
std::vector<int> mlp_classify(const Mlp& model, const Matrix& x);

/// Targets for classification training: a 0/1 column for two classes,
/// one-hot rows otherwise.
Matrix class_targets(std::span<const int> y, int n_classes);

}  // namespace milkspec
