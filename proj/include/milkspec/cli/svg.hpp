#pragma once

#include <span>
#include <string>
#include <vector>

#include "milkspec/learn/report.hpp"
#include "milkspec/numerics/decomposition.hpp"
#include "milkspec/numerics/qq.hpp"

namespace milkspec {

/// Heatmap of the confusion matrix, true classes down the side and
/// predicted classes along the top, each cell annotated with its count.
std::string render_confusion_svg(const ClassificationReport& report);

/// PC1 vs PC2 scatter with one glyph shape per label and explained-variance
/// percentages on the axes. Throws std::invalid_argument with fewer than 2
/// components or a label count that differs from the score rows.
std::string render_scatter_svg(const PcaResult& pca, std::span<const std::string> labels);

/// Axis label for a 1-based component index, e.g. "PC1 (51.1%)".
std::string pc_axis_label(std::size_t index, double ratio);

/// Normal Q-Q scatter with the identity diagonal. The largest vertical
/// deviation from the diagonal is stored in the <desc> element.
std::string render_qq_svg(std::span<const QqPoint> points);

double qq_max_deviation(std::span<const QqPoint> points);

/// Escapes &, <, >, " and ' for XML text and attributes.
std::string xml_escape(std::string_view s);

}  // namespace milkspec
