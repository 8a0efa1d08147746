#include "milkspec/learn/report.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

namespace milkspec {

ClassificationReport report_from_confusion(const std::vector<std::vector<std::size_t>>& confusion,
                                           const std::vector<std::string>& class_names) {
  const std::size_t k = class_names.size();
  if (k == 0 || confusion.size() != k) throw std::invalid_argument("classification_report: shape mismatch");
  for (const auto& row : confusion)
    if (row.size() != k) throw std::invalid_argument("classification_report: confusion matrix must be square");

  ClassificationReport r;
  r.class_names = class_names;
  r.confusion = confusion;
  std::size_t trace = 0;
  std::vector<std::size_t> col(k, 0);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      r.total += confusion[i][j];
      col[j] += confusion[i][j];
      if (i == j) trace += confusion[i][j];
    }
  if (r.total == 0) throw std::invalid_argument("classification_report: empty input");
  r.accuracy = static_cast<double>(trace) / static_cast<double>(r.total);

  for (std::size_t c = 0; c < k; ++c) {
    ClassMetrics m;
    m.name = class_names[c];
    for (std::size_t j = 0; j < k; ++j) m.support += confusion[c][j];
    const double tp = static_cast<double>(confusion[c][c]);
    m.precision = col[c] > 0 ? tp / static_cast<double>(col[c]) : 0.0;
    m.recall = m.support > 0 ? tp / static_cast<double>(m.support) : 0.0;
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    r.macro.precision += m.precision / static_cast<double>(k);
    r.macro.recall += m.recall / static_cast<double>(k);
    r.macro.f1 += m.f1 / static_cast<double>(k);
    const double w = static_cast<double>(m.support) / static_cast<double>(r.total);
    r.weighted.precision += w * m.precision;
    r.weighted.recall += w * m.recall;
    r.weighted.f1 += w * m.f1;
    r.classes.push_back(m);
  }
  return r;
}

ClassificationReport classification_report(std::span<const int> y_true, std::span<const int> y_pred,
                                           const std::vector<std::string>& class_names) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("classification_report: length mismatch");
  if (y_true.empty()) throw std::invalid_argument("classification_report: empty input");
  const auto k = static_cast<int>(class_names.size());
  std::vector<std::vector<std::size_t>> cm(class_names.size(), std::vector<std::size_t>(class_names.size(), 0));
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] < 0 || y_true[i] >= k || y_pred[i] < 0 || y_pred[i] >= k)
      throw std::invalid_argument("classification_report: label outside the class set");
    ++cm[static_cast<std::size_t>(y_true[i])][static_cast<std::size_t>(y_pred[i])];
  }
  return report_from_confusion(cm, class_names);
}

std::string ClassificationReport::render_text() const {
  std::size_t w = std::string("Weighted avg").size();
  for (const auto& c : classes) w = std::max(w, c.name.size());
  std::string out = fmt::format("{:<{}}{:>11}{:>11}{:>11}{:>11}\n\n", "GROUP", w, "Precision", "Recall", "F1-score",
                                "Support");
  for (const auto& c : classes)
    out += fmt::format("{:<{}}{:>11.2f}{:>11.2f}{:>11.2f}{:>11}\n", c.name, w, c.precision, c.recall, c.f1, c.support);
  out += "\n";
  out += fmt::format("{:<{}}{:>11}{:>11}{:>11.2f}{:>11}\n", "Accuracy", w, "", "", accuracy, total);
  out += fmt::format("{:<{}}{:>11.2f}{:>11.2f}{:>11.2f}{:>11}\n", "Macro avg", w, macro.precision, macro.recall,
                     macro.f1, total);
  out += fmt::format("{:<{}}{:>11.2f}{:>11.2f}{:>11.2f}{:>11}\n", "Weighted avg", w, weighted.precision,
                     weighted.recall, weighted.f1, total);
  return out;
}

std::string ClassificationReport::render_json(int indent) const {
  using nlohmann::json;
  json classes_j = json::array();
  for (const auto& c : classes)
    classes_j.push_back(
        {{"name", c.name}, {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}});
  json j = {{"class_names", class_names},
            {"confusion", confusion},
            {"classes", classes_j},
            {"accuracy", accuracy},
            {"total", total},
            {"macro_avg", {{"precision", macro.precision}, {"recall", macro.recall}, {"f1", macro.f1}}},
            {"weighted_avg", {{"precision", weighted.precision}, {"recall", weighted.recall}, {"f1", weighted.f1}}}};
  return j.dump(indent);
}

}  // namespace milkspec
