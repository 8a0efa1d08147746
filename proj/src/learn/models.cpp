#include "milkspec/learn/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "milkspec/error.hpp"
#include "milkspec/learn/rng.hpp"

namespace milkspec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int lowest_max(std::span<const std::size_t> votes) {
  int best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c)
    if (votes[c] > votes[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  return best;
}

}  // namespace

std::string model_kind(const ModelSpec& spec) {
  return std::visit(overloaded{[](const KnnSpec&) { return std::string("knn"); },
                               [](const TreeSpec&) { return std::string("tree"); },
                               [](const ForestSpec&) { return std::string("forest"); },
                               [](const SvmSpec&) { return std::string("linear_svm"); },
                               [](const MlpSpec&) { return std::string("mlp"); }},
                    spec);
}

void validate_model_spec(const ModelSpec& spec) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("model spec: ") + what);
  };
  std::visit(overloaded{[&](const KnnSpec& s) { need(s.k >= 1, "k must be at least 1"); },
                        [&](const TreeSpec& s) {
                          need(s.max_depth >= 0, "max_depth must be non-negative (0 = unlimited)");
                          need(s.min_leaf >= 1, "min_leaf must be at least 1");
                        },
                        [&](const ForestSpec& s) {
                          need(s.n_trees >= 1, "n_trees must be at least 1");
                          need(s.max_depth >= 0, "max_depth must be non-negative (0 = unlimited)");
                          need(s.min_leaf >= 1, "min_leaf must be at least 1");
                          need(s.features_per_split >= 0, "features_per_split must be non-negative");
                        },
                        [&](const SvmSpec& s) {
                          need(s.lambda > 0.0, "lambda must be positive");
                          need(s.epochs >= 1, "epochs must be at least 1");
                        },
                        [&](const MlpSpec& s) {
                          need(s.epochs >= 1, "epochs must be at least 1");
                          need(s.learning_rate > 0.0, "learning_rate must be positive");
                          need(s.batch_size >= 1, "batch_size must be at least 1");
                          for (std::size_t h : s.hidden) need(h >= 1, "hidden layer sizes must be at least 1");
                        }},
             spec);
}

ModelSpec parse_model_spec(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model spec: ") + e.what());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ConfigError("model spec: expected an object with a \"kind\" string");
  const std::string kind = j["kind"];
  ModelSpec spec;
  if (kind == "knn") spec = KnnSpec{};
  else if (kind == "tree") spec = TreeSpec{};
  else if (kind == "forest") spec = ForestSpec{};
  else if (kind == "linear_svm" || kind == "svm") spec = SvmSpec{};
  else if (kind == "mlp") spec = MlpSpec{};
  else throw ConfigError("model spec: unknown kind \"" + kind + "\"");

  for (const auto& [key, value] : j.items()) {
    if (key == "kind") continue;
    try {
      if (key == "hidden") {
        auto* m = std::get_if<MlpSpec>(&spec);
        if (m == nullptr) throw ConfigError("model spec: \"hidden\" only applies to mlp");
        m->hidden = value.get<std::vector<std::size_t>>();
      } else if (key == "seed") {
        const auto seed = value.get<std::uint64_t>();
        std::visit(overloaded{[&](ForestSpec& s) { s.seed = seed; }, [&](SvmSpec& s) { s.seed = seed; },
                              [&](MlpSpec& s) { s.seed = seed; },
                              [&](auto&) { throw ConfigError("model spec: \"seed\" does not apply to " + kind); }},
                   spec);
      } else if (key == "bootstrap" || key == "parallel") {
        auto* f = std::get_if<ForestSpec>(&spec);
        if (f == nullptr) throw ConfigError("model spec: \"" + key + "\" only applies to forest");
        if (key == "bootstrap") f->bootstrap = value.get<bool>();
        else f->exec = value.get<bool>() ? Exec::parallel : Exec::serial;
      } else {
        set_model_param(spec, key, value.get<double>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("model spec: bad value for \"{}\": {}", key, e.what()));
    }
  }
  validate_model_spec(spec);
  return spec;
}

std::string model_spec_to_json(const ModelSpec& spec) {
  nlohmann::json j;
  j["kind"] = model_kind(spec);
  std::visit(overloaded{[&](const KnnSpec& s) { j["k"] = s.k; },
                        [&](const TreeSpec& s) {
                          j["max_depth"] = s.max_depth;
                          j["min_leaf"] = s.min_leaf;
                        },
                        [&](const ForestSpec& s) {
                          j["n_trees"] = s.n_trees;
                          j["max_depth"] = s.max_depth;
                          j["min_leaf"] = s.min_leaf;
                          j["features_per_split"] = s.features_per_split;
                          j["seed"] = s.seed;
                          j["bootstrap"] = s.bootstrap;
                        },
                        [&](const SvmSpec& s) {
                          j["lambda"] = s.lambda;
                          j["epochs"] = s.epochs;
                          j["seed"] = s.seed;
                        },
                        [&](const MlpSpec& s) {
                          j["hidden"] = s.hidden;
                          j["epochs"] = s.epochs;
                          j["learning_rate"] = s.learning_rate;
                          j["batch_size"] = s.batch_size;
                          j["seed"] = s.seed;
                        }},
             spec);
  return j.dump();
}

void set_model_param(ModelSpec& spec, std::string_view name, double value) {
  auto as_int = [&](std::string_view key) {
    if (value != std::floor(value) || std::abs(value) > 1e9)
      throw ConfigError(fmt::format("model spec: \"{}\" must be an integer", key));
    return static_cast<int>(value);
  };
  bool known = false;
  std::visit(overloaded{[&](KnnSpec& s) {
                          if (name == "k") s.k = as_int(name), known = true;
                        },
                        [&](TreeSpec& s) {
                          if (name == "max_depth") s.max_depth = as_int(name), known = true;
                          else if (name == "min_leaf") s.min_leaf = as_int(name), known = true;
                        },
                        [&](ForestSpec& s) {
                          if (name == "n_trees") s.n_trees = as_int(name), known = true;
                          else if (name == "max_depth") s.max_depth = as_int(name), known = true;
                          else if (name == "min_leaf") s.min_leaf = as_int(name), known = true;
                          else if (name == "features_per_split") s.features_per_split = as_int(name), known = true;
                        },
                        [&](SvmSpec& s) {
                          if (name == "lambda") s.lambda = value, known = true;
                          else if (name == "epochs") s.epochs = as_int(name), known = true;
                        },
                        [&](MlpSpec& s) {
                          if (name == "epochs") s.epochs = as_int(name), known = true;
                          else if (name == "learning_rate") s.learning_rate = value, known = true;
                          else if (name == "batch_size") s.batch_size = as_int(name), known = true;
                        }},
             spec);
  if (!known) throw ConfigError(fmt::format("model spec: \"{}\" is not a parameter of {}", name, model_kind(spec)));
}

Standardizer::Standardizer(const Matrix& train) {
  if (train.rows() == 0) throw std::invalid_argument("Standardizer: empty training matrix");
  means_ = column_means(train);
  scales_.assign(train.cols(), 1.0);
  const double n = static_cast<double>(train.rows());
  for (std::size_t c = 0; c < train.cols(); ++c) {
    double ss = 0.0;
    for (std::size_t r = 0; r < train.rows(); ++r) ss += (train(r, c) - means_[c]) * (train(r, c) - means_[c]);
    const double sd = std::sqrt(ss / n);
    if (sd > 0.0) scales_[c] = sd;
  }
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != means_.size()) throw std::invalid_argument("Standardizer: feature count mismatch");
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - means_[c]) / scales_[c];
  return out;
}

KnnModel::KnnModel(Matrix train, std::vector<int> labels, int n_classes, int k)
    : train_(std::move(train)), labels_(std::move(labels)), n_classes_(n_classes), k_(k) {
  if (train_.rows() == 0) throw std::invalid_argument("knn: empty training set");
  if (k_ < 1) throw std::invalid_argument("knn: k must be at least 1");
}

std::vector<int> KnnModel::predict(const Matrix& x) const {
  const std::size_t n = train_.rows();
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_), n);
  std::vector<int> out(x.rows());
  std::vector<std::pair<double, std::size_t>> d(n);
  std::vector<std::size_t> votes(static_cast<std::size_t>(n_classes_));
  for (std::size_t q = 0; q < x.rows(); ++q) {
    const auto row = x.row(q);
    for (std::size_t i = 0; i < n; ++i) {
      const auto t = train_.row(i);
      double s = 0.0;
      for (std::size_t c = 0; c < row.size(); ++c) s += (row[c] - t[c]) * (row[c] - t[c]);
      d[i] = {s, i};
    }
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::fill(votes.begin(), votes.end(), 0);
    for (std::size_t i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(labels_[d[i].second])];
    out[q] = lowest_max(votes);
  }
  return out;
}

LinearSvm::LinearSvm(const Matrix& x, std::span<const int> y, int n_classes, const SvmSpec& spec)
    : n_classes_(n_classes) {
  const std::size_t n = x.rows(), p = x.cols();
  if (n == 0) throw std::invalid_argument("linear_svm: empty training set");
  const std::size_t separators = n_classes <= 2 ? 1 : static_cast<std::size_t>(n_classes);
  w_ = Matrix(separators, p, 0.0);
  b_.assign(separators, 0.0);
  const std::size_t steps = static_cast<std::size_t>(spec.epochs) * n;

  for (std::size_t s = 0; s < separators; ++s) {
    const int positive = separators == 1 ? 1 : static_cast<int>(s);
    SplitMix64 rng(derive_seed(spec.seed, s));
    std::vector<double> w(p + 1, 0.0);  // last entry multiplies the constant feature
    for (std::size_t t = 1; t <= steps; ++t) {
      const std::size_t i = rng.below(n);
      const double yi = y[i] == positive ? 1.0 : -1.0;
      const auto xi = x.row(i);
      double margin = w[p];
      for (std::size_t c = 0; c < p; ++c) margin += w[c] * xi[c];
      margin *= yi;
      const double eta = 1.0 / (spec.lambda * static_cast<double>(t));
      const double shrink = 1.0 - eta * spec.lambda;
      for (double& v : w) v *= shrink;
      if (margin < 1.0) {
        for (std::size_t c = 0; c < p; ++c) w[c] += eta * yi * xi[c];
        w[p] += eta * yi;
      }
    }
    for (std::size_t c = 0; c < p; ++c) w_(s, c) = w[c];
    b_[s] = w[p];
  }
}

Matrix LinearSvm::decision_function(const Matrix& x) const {
  if (x.cols() != w_.cols()) throw std::invalid_argument("linear_svm: feature count mismatch");
  Matrix out(x.rows(), w_.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t s = 0; s < w_.rows(); ++s) out(i, s) = dot(w_.row(s), x.row(i)) + b_[s];
  return out;
}

std::vector<int> LinearSvm::predict(const Matrix& x) const {
  const Matrix d = decision_function(x);
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (d.cols() == 1) {
      out[i] = d(i, 0) > 0.0 ? 1 : 0;
    } else {
      const auto row = d.row(i);
      out[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
  }
  return out;
}

TrainedModel::TrainedModel(ModelSpec spec, Impl impl, std::optional<Standardizer> scaler, std::size_t n_features,
                           int n_classes)
    : spec_(std::move(spec)),
      impl_(std::move(impl)),
      scaler_(std::move(scaler)),
      n_features_(n_features),
      n_classes_(n_classes) {}

Matrix TrainedModel::prepared(const Matrix& x) const {
  if (x.cols() != n_features_)
    throw std::invalid_argument(fmt::format("predict: model expects {} features, got {}", n_features_, x.cols()));
  return scaler_ ? scaler_->apply(x) : x;
}

std::vector<int> TrainedModel::predict(const Matrix& x) const {
  const Matrix z = prepared(x);
  return std::visit(overloaded{[&](const KnnModel& m) { return m.predict(z); },
                               [&](const DecisionTree& m) { return m.predict(z); },
                               [&](const RandomForest& m) { return m.predict(z); },
                               [&](const LinearSvm& m) { return m.predict(z); },
                               [&](const Mlp& m) { return mlp_classify(m, z); }},
                    impl_);
}

TrainedModel fit(const ModelSpec& spec, const Matrix& x, std::span<const int> y, int n_classes) {
  if (x.rows() == 0) throw std::invalid_argument("fit: empty training set");
  if (y.size() != x.rows()) throw std::invalid_argument("fit: label count differs from rows");
  validate_model_spec(spec);
  int k = n_classes;
  for (int v : y) {
    if (v < 0) throw std::invalid_argument("fit: labels must be non-negative class ids");
    if (n_classes == 0) k = std::max(k, v + 1);
    else if (v >= n_classes) throw std::invalid_argument("fit: label exceeds class count");
  }
  k = std::max(k, 1);

  std::vector<std::size_t> all(x.rows());
  std::iota(all.begin(), all.end(), 0);
  return std::visit(
      overloaded{
          [&](const KnnSpec& s) {
            Standardizer sc(x);
            return TrainedModel(spec, KnnModel(sc.apply(x), {y.begin(), y.end()}, k, s.k), sc, x.cols(), k);
          },
          [&](const TreeSpec& s) {
            TreeParams tp{s.max_depth, s.min_leaf, 0};
            return TrainedModel(spec, build_tree(x, y, k, all, tp), std::nullopt, x.cols(), k);
          },
          [&](const ForestSpec& s) {
            ForestParams fp{s.n_trees, {s.max_depth, s.min_leaf, s.features_per_split}, s.bootstrap, s.seed, s.exec};
            return TrainedModel(spec, fit_forest(x, y, k, fp), std::nullopt, x.cols(), k);
          },
          [&](const SvmSpec& s) {
            Standardizer sc(x);
            return TrainedModel(spec, LinearSvm(sc.apply(x), y, k, s), sc, x.cols(), k);
          },
          [&](const MlpSpec& s) {
            Standardizer sc(x);
            MlpTrainParams mp{s.hidden, s.epochs, s.learning_rate, s.batch_size, s.seed};
            return TrainedModel(spec, train_mlp(sc.apply(x), y, k, mp), sc, x.cols(), k);
          }},
      spec);
}

std::vector<int> predict(const TrainedModel& model, const Matrix& x) { return model.predict(x); }

double accuracy(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size() || truth.empty())
    throw std::invalid_argument("accuracy: need equal, non-empty label lists");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == predicted[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace milkspec
