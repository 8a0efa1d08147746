#include "milkspec/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

namespace milkspec {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

std::string header(int w, int h) {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      w, h);
}

// Linear map of [lo, hi] onto [a, b], padding degenerate ranges.
struct Axis {
  double lo, hi, a, b;
  double operator()(double v) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

Axis make_axis(double lo, double hi, double a, double b) {
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad, a, b};
}

std::string glyph(std::size_t kind, double x, double y, const char* color) {
  const double r = 5.0;
  switch (kind % 5) {
    case 0: return fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{}\" fill=\"{}\"/>", x, y, r, color);
    case 1:
      return fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>", x - r, y - r,
                         2 * r, 2 * r, color);
    case 2:
      return fmt::format("<polygon points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" fill=\"{}\"/>", x, y - r,
                         x - r, y + r, x + r, y + r, color);
    case 3:
      return fmt::format("<polygon points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" fill=\"{}\"/>", x,
                         y - r, x + r, y, x, y + r, x - r, y, color);
    default:
      return fmt::format(
          "<path d=\"M{:.2f},{:.2f} L{:.2f},{:.2f} M{:.2f},{:.2f} L{:.2f},{:.2f}\" stroke=\"{}\" stroke-width=\"2\"/>",
          x - r, y - r, x + r, y + r, x - r, y + r, x + r, y - r, color);
  }
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string render_confusion_svg(const ClassificationReport& report) {
  const std::size_t k = report.class_names.size();
  const int cell = 60, left = 110, top = 80;
  const int w = left + static_cast<int>(k) * cell + 30, h = top + static_cast<int>(k) * cell + 40;
  std::size_t peak = 0;
  for (const auto& row : report.confusion)
    for (std::size_t v : row) peak = std::max(peak, v);

  std::string out = header(w, h);
  out += fmt::format("<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">Confusion matrix</text>\n", w / 2);
  out += fmt::format("<text x=\"{}\" y=\"48\" font-size=\"12\" text-anchor=\"middle\">Predicted</text>\n",
                     left + static_cast<int>(k) * cell / 2);
  out += fmt::format(
      "<text x=\"16\" y=\"{0}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">True</text>\n",
      top + static_cast<int>(k) * cell / 2);
  for (std::size_t j = 0; j < k; ++j)
    out += fmt::format("<text class=\"tick-x\" x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                       left + static_cast<int>(j) * cell + cell / 2, top - 8, xml_escape(report.class_names[j]));
  for (std::size_t i = 0; i < k; ++i) {
    out += fmt::format("<text class=\"tick-y\" x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
                       left - 8, top + static_cast<int>(i) * cell + cell / 2 + 4, xml_escape(report.class_names[i]));
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t v = report.confusion[i][j];
      const double t = peak > 0 ? static_cast<double>(v) / static_cast<double>(peak) : 0.0;
      const int shade = static_cast<int>(std::lround(255.0 - 200.0 * t));
      const int x = left + static_cast<int>(j) * cell, y = top + static_cast<int>(i) * cell;
      out += fmt::format(
          "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"rgb({},{},255)\" stroke=\"#444\"/>\n", x, y, cell,
          cell, shade, shade);
      out += fmt::format(
          "<text class=\"count\" x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" fill=\"{}\">{}</text>\n",
          x + cell / 2, y + cell / 2 + 5, t > 0.6 ? "white" : "black", v);
    }
  }
  out += "</svg>\n";
  return out;
}

std::string pc_axis_label(std::size_t index, double ratio) {
  return fmt::format("PC{} ({:.1f}%)", index, 100.0 * ratio);
}

std::string render_scatter_svg(const PcaResult& pca, std::span<const std::string> labels) {
  if (pca.scores.cols() < 2 || pca.explained_variance_ratio.size() < 2)
    throw std::invalid_argument("render_scatter_svg: need at least 2 components");
  if (labels.size() != pca.scores.rows()) throw std::invalid_argument("render_scatter_svg: one label per row");
  const int w = 520, h = 440, left = 70, right = 130, top = 40, bottom = 60;

  std::map<std::string, std::size_t> kinds;
  for (const auto& l : labels) kinds.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [_, v] : kinds) v = next++;

  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (std::size_t i = 0; i < pca.scores.rows(); ++i) {
    xlo = std::min(xlo, pca.scores(i, 0));
    xhi = std::max(xhi, pca.scores(i, 0));
    ylo = std::min(ylo, pca.scores(i, 1));
    yhi = std::max(yhi, pca.scores(i, 1));
  }
  const Axis ax = make_axis(xlo, xhi, left, w - right);
  const Axis ay = make_axis(ylo, yhi, h - bottom, top);

  std::string out = header(w, h);
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n", left, top,
                     w - left - right, h - top - bottom);
  if (ax.lo < 0 && ax.hi > 0)
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#bbb\"/>\n", ax(0.0), top,
                       h - bottom);
  if (ay.lo < 0 && ay.hi > 0)
    out += fmt::format("<line x1=\"{1}\" y1=\"{0:.2f}\" x2=\"{2}\" y2=\"{0:.2f}\" stroke=\"#bbb\"/>\n", ay(0.0), left,
                       w - right);
  for (std::size_t i = 0; i < pca.scores.rows(); ++i) {
    const std::size_t kind = kinds.at(labels[i]);
    out += glyph(kind, ax(pca.scores(i, 0)), ay(pca.scores(i, 1)), kPalette[kind % 6]) + "\n";
  }
  out += fmt::format("<text class=\"axis-x\" x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
                     (left + w - right) / 2, h - 20, pc_axis_label(1, pca.explained_variance_ratio[0]));
  out += fmt::format(
      "<text class=\"axis-y\" x=\"20\" y=\"{0}\" font-size=\"13\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 20 {0})\">{1}</text>\n",
      (top + h - bottom) / 2, pc_axis_label(2, pca.explained_variance_ratio[1]));
  int ly = top + 10;
  for (const auto& [name, kind] : kinds) {
    out += glyph(kind, w - right + 20, ly, kPalette[kind % 6]) + "\n";
    out += fmt::format("<text class=\"legend\" x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n", w - right + 32, ly + 4,
                       xml_escape(name));
    ly += 22;
  }
  out += "</svg>\n";
  return out;
}

double qq_max_deviation(std::span<const QqPoint> points) {
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, std::abs(p.sample - p.theoretical));
  return m;
}

std::string render_qq_svg(std::span<const QqPoint> points) {
  const int w = 440, h = 440, margin = 60;
  double lo = 0.0, hi = 0.0;
  for (const auto& p : points) {
    lo = std::min({lo, p.theoretical, p.sample});
    hi = std::max({hi, p.theoretical, p.sample});
  }
  const Axis ax = make_axis(lo, hi, margin, w - 20);
  const Axis ay = make_axis(lo, hi, h - margin, 20);
  std::string out = header(w, h);
  out += fmt::format("<desc>max_abs_deviation={:.6f} n={}</desc>\n", qq_max_deviation(points), points.size());
  out += fmt::format("<rect x=\"{}\" y=\"20\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n", margin,
                     w - 20 - margin, h - margin - 20);
  out += fmt::format(
      "<line class=\"diagonal\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#d62728\"/>\n",
      ax(ax.lo), ay(ax.lo), ax(ax.hi), ay(ax.hi));
  for (const auto& p : points)
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"#1f77b4\"/>\n", ax(p.theoretical),
                       ay(p.sample));
  out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">Theoretical quantiles</text>\n",
                     (margin + w - 20) / 2, h - 20);
  out += fmt::format(
      "<text x=\"18\" y=\"{0}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">Sample "
      "quantiles</text>\n",
      (20 + h - margin) / 2);
  out += "</svg>\n";
  return out;
}

}  // namespace milkspec
