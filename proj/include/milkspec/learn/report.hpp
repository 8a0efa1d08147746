#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace milkspec {

struct ClassMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct AverageMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ClassificationReport {
  std::vector<std::string> class_names;
  std::vector<std::vector<std::size_t>> confusion;  // true × predicted
  std::vector<ClassMetrics> classes;
  double accuracy = 0.0;
  std::size_t total = 0;
  AverageMetrics macro;
  AverageMetrics weighted;

  /// Fixed-width table: GROUP, Precision, Recall, F1-score, Support, then
  /// Accuracy, Macro avg and Weighted avg rows, two decimals.
  std::string render_text() const;
  std::string render_json(int indent = 2) const;
};

/// Labels are indices into class_names. Throws std::invalid_argument for
/// empty or unequal inputs and labels outside the class set.
ClassificationReport classification_report(std::span<const int> y_true, std::span<const int> y_pred,
                                           const std::vector<std::string>& class_names);

/// Report from an existing confusion matrix (rows true, columns predicted).
ClassificationReport report_from_confusion(const std::vector<std::vector<std::size_t>>& confusion,
                                           const std::vector<std::string>& class_names);

}  // namespace milkspec
