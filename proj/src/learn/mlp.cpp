#include "milkspec/learn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "milkspec/learn/rng.hpp"

namespace milkspec {

namespace {

struct Pass {
  std::vector<Matrix> z;  // pre-activations per layer
  std::vector<Matrix> a;  // a[0] = input, a[l+1] = activation of layer l
};

Matrix affine(const Matrix& in, const MlpLayer& layer) {
  const std::size_t n = in.rows(), out = layer.w.rows(), inn = layer.w.cols();
  Matrix z(n, out);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = in.row(i);
    for (std::size_t o = 0; o < out; ++o) {
      const auto w = layer.w.row(o);
      double s = layer.b[o];
      for (std::size_t k = 0; k < inn; ++k) s += w[k] * row[k];
      z(i, o) = s;
    }
  }
  return z;
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

Matrix activate_output(const Matrix& z, MlpOutput kind) {
  Matrix a = z;
  switch (kind) {
    case MlpOutput::identity: break;
    case MlpOutput::sigmoid:
      for (double& v : a.data()) v = sigmoid(v);
      break;
    case MlpOutput::softmax:
      for (std::size_t i = 0; i < a.rows(); ++i) {
        auto row = a.row(i);
        const double m = *std::max_element(row.begin(), row.end());
        double s = 0.0;
        for (double& v : row) s += (v = std::exp(v - m));
        for (double& v : row) v /= s;
      }
      break;
  }
  return a;
}

Pass run(const Mlp& model, const Matrix& x) {
  if (x.cols() != model.inputs()) throw std::invalid_argument("Mlp: input width mismatch");
  Pass p;
  p.a.push_back(x);
  const auto& layers = model.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    p.z.push_back(affine(p.a.back(), layers[l]));
    if (l + 1 < layers.size()) {
      Matrix h = p.z.back();
      for (double& v : h.data()) v = std::max(0.0, v);
      p.a.push_back(std::move(h));
    } else {
      p.a.push_back(activate_output(p.z.back(), model.output()));
    }
  }
  return p;
}

void check_targets(const Mlp& model, const Matrix& x, const Matrix& t) {
  if (t.rows() != x.rows() || t.cols() != model.outputs())
    throw std::invalid_argument("Mlp: target shape mismatch");
  if (x.rows() == 0) throw std::invalid_argument("Mlp: empty batch");
}

}  // namespace

Mlp::Mlp(std::vector<std::size_t> sizes, MlpOutput output, std::uint64_t seed) : output_(output) {
  if (sizes.size() < 2) throw std::invalid_argument("Mlp: need input and output sizes");
  for (std::size_t s : sizes)
    if (s == 0) throw std::invalid_argument("Mlp: layer sizes must be positive");
  if (output == MlpOutput::sigmoid && sizes.back() != 1) throw std::invalid_argument("Mlp: sigmoid output has one unit");
  SplitMix64 rng(seed);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    MlpLayer layer{Matrix(sizes[l + 1], sizes[l]), std::vector<double>(sizes[l + 1], 0.0)};
    const double sd = std::sqrt(2.0 / static_cast<double>(sizes[l]));
    for (double& v : layer.w.data()) v = sd * rng.normal();
    layers_.push_back(std::move(layer));
  }
}

Mlp::Mlp(std::vector<MlpLayer> layers, MlpOutput output) : layers_(std::move(layers)), output_(output) {
  if (layers_.empty()) throw std::invalid_argument("Mlp: no layers");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].b.size() != layers_[l].w.rows()) throw std::invalid_argument("Mlp: bias size mismatch");
    if (l > 0 && layers_[l].w.cols() != layers_[l - 1].w.rows())
      throw std::invalid_argument("Mlp: layer widths do not chain");
  }
}

std::size_t Mlp::inputs() const { return layers_.empty() ? 0 : layers_.front().w.cols(); }
std::size_t Mlp::outputs() const { return layers_.empty() ? 0 : layers_.back().w.rows(); }

Matrix Mlp::forward(const Matrix& x) const { return run(*this, x).a.back(); }

double Mlp::loss(const Matrix& x, const Matrix& t) const {
  check_targets(*this, x, t);
  const Pass p = run(*this, x);
  const Matrix& z = p.z.back();
  const Matrix& a = p.a.back();
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t o = 0; o < outputs(); ++o) {
      switch (output_) {
        case MlpOutput::identity: total += (a(i, o) - t(i, o)) * (a(i, o) - t(i, o)); break;
        case MlpOutput::sigmoid: total += softplus(z(i, o)) - t(i, o) * z(i, o); break;
        case MlpOutput::softmax:
          if (t(i, o) != 0.0) total -= t(i, o) * std::log(std::max(a(i, o), 1e-300));
          break;
      }
    }
  return total / static_cast<double>(x.rows());
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.w.data().size() + l.b.size();
  return n;
}

std::vector<double> Mlp::parameters() const { return flatten(layers_); }

void Mlp::set_parameters(std::span<const double> p) {
  if (p.size() != parameter_count()) throw std::invalid_argument("Mlp: parameter count mismatch");
  std::size_t k = 0;
  for (auto& l : layers_) {
    for (double& v : l.w.data()) v = p[k++];
    for (double& v : l.b) v = p[k++];
  }
}

std::vector<double> flatten(const MlpGradients& g) {
  std::vector<double> out;
  for (const auto& l : g) {
    out.insert(out.end(), l.w.data().begin(), l.w.data().end());
    out.insert(out.end(), l.b.begin(), l.b.end());
  }
  return out;
}

MlpGradients mlp_gradient(const Mlp& model, const Matrix& x, const Matrix& t) {
  check_targets(model, x, t);
  const Pass p = run(model, x);
  const auto& layers = model.layers();
  const std::size_t n = x.rows();
  const double inv_n = 1.0 / static_cast<double>(n);

  // dL/dz at the output
  Matrix delta = p.a.back();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t o = 0; o < delta.cols(); ++o) {
      const double diff = delta(i, o) - t(i, o);
      delta(i, o) = (model.output() == MlpOutput::identity ? 2.0 * diff : diff) * inv_n;
    }

  MlpGradients g(layers.size());
  for (std::size_t l = layers.size(); l-- > 0;) {
    const Matrix& in = p.a[l];
    const std::size_t out = layers[l].w.rows(), inn = layers[l].w.cols();
    g[l].w = Matrix(out, inn);
    g[l].b.assign(out, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta(i, o);
        if (d == 0.0) continue;
        g[l].b[o] += d;
        auto gw = g[l].w.row(o);
        const auto a = in.row(i);
        for (std::size_t k = 0; k < inn; ++k) gw[k] += d * a[k];
      }
    if (l == 0) break;
    Matrix prev(n, inn, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < inn; ++k) {
        if (!(p.z[l - 1](i, k) > 0.0)) continue;
        double s = 0.0;
        for (std::size_t o = 0; o < out; ++o) s += delta(i, o) * layers[l].w(o, k);
        prev(i, k) = s;
      }
    delta = std::move(prev);
  }
  return g;
}

double gradient_check(const Mlp& model, const Matrix& x, const Matrix& t, double h, double floor) {
  const auto analytic = flatten(mlp_gradient(model, x, t));
  Mlp probe = model;
  auto params = model.parameters();
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + h;
    probe.set_parameters(params);
    const double up = probe.loss(x, t);
    params[i] = keep - h;
    probe.set_parameters(params);
    const double down = probe.loss(x, t);
    params[i] = keep;
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
  }
  return worst;
}

Matrix class_targets(std::span<const int> y, int n_classes) {
  if (n_classes < 2) throw std::invalid_argument("class_targets: need at least 2 classes");
  const std::size_t width = n_classes == 2 ? 1 : static_cast<std::size_t>(n_classes);
  Matrix t(y.size(), width, 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0 || y[i] >= n_classes) throw std::invalid_argument("class_targets: label out of range");
    if (n_classes == 2)
      t(i, 0) = y[i] == 1 ? 1.0 : 0.0;
    else
      t(i, static_cast<std::size_t>(y[i])) = 1.0;
  }
  return t;
}

Mlp train_mlp(const Matrix& x, std::span<const int> y, int n_classes, const MlpTrainParams& params) {
  if (x.rows() == 0) throw std::invalid_argument("train_mlp: empty training set");
  if (y.size() != x.rows()) throw std::invalid_argument("train_mlp: label count differs from rows");
  if (params.epochs < 1 || params.batch_size < 1 || !(params.learning_rate > 0.0))
    throw std::invalid_argument("train_mlp: epochs, batch size and learning rate must be positive");
  const int k = std::max(2, n_classes);
  const Matrix targets = class_targets(y, k);

  std::vector<std::size_t> sizes{x.cols()};
  sizes.insert(sizes.end(), params.hidden.begin(), params.hidden.end());
  sizes.push_back(targets.cols());
  Mlp model(sizes, k == 2 ? MlpOutput::sigmoid : MlpOutput::softmax, params.seed);

  SplitMix64 rng(derive_seed(params.seed, 1));
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  const auto bs = static_cast<std::size_t>(params.batch_size);
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const std::size_t end = std::min(order.size(), start + bs);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      const auto g = mlp_gradient(model, x.select_rows(idx), targets.select_rows(idx));
      auto& layers = model.layers();
      for (std::size_t l = 0; l < layers.size(); ++l) {
        auto w = layers[l].w.data();
        const auto gw = g[l].w.data();
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= params.learning_rate * gw[j];
        for (std::size_t j = 0; j < layers[l].b.size(); ++j) layers[l].b[j] -= params.learning_rate * g[l].b[j];
      }
    }
  }
  return model;
}

std::vector<int> mlp_classify(const Mlp& model, const Matrix& x) {
  const Matrix a = model.forward(x);
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (model.output() == MlpOutput::sigmoid) {
      out[i] = a(i, 0) > 0.5 ? 1 : 0;
    } else {
      const auto row = a.row(i);
      out[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
  }
  return out;
}

}  // namespace milkspec
