#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "botspot/corpus.hpp"
#include "botspot/eval.hpp"
#include "botspot/explain.hpp"

namespace botspot {
namespace svg {

inline std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
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

inline std::string fmt(double value, int decimals) {
  char buf[64];
  // flush tiny negatives to zero so we never print "-0.000"
  if (std::abs(value) < 0.5 * std::pow(10.0, -decimals)) value = 0.0;
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

inline std::string header(int width, int height) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
       std::to_string(width) + "\" height=\"" + std::to_string(height) +
       "\" viewBox=\"0 0 " + std::to_string(width) + " " +
       std::to_string(height) + "\">\n";
  return s;
}

inline std::string rect(double x, double y, double w, double h,
                        const std::string& fill) {
  return "  <rect x=\"" + fmt(x, 2) + "\" y=\"" + fmt(y, 2) + "\" width=\"" +
         fmt(w, 2) + "\" height=\"" + fmt(h, 2) + "\" fill=\"" + fill +
         "\"/>\n";
}

inline std::string line(double x1, double y1, double x2, double y2,
                        const std::string& stroke, double width = 1.0) {
  return "  <line x1=\"" + fmt(x1, 2) + "\" y1=\"" + fmt(y1, 2) + "\" x2=\"" +
         fmt(x2, 2) + "\" y2=\"" + fmt(y2, 2) + "\" stroke=\"" + stroke +
         "\" stroke-width=\"" + fmt(width, 2) + "\"/>\n";
  }

inline std::string text(double x, double y, const std::string& content,
                        int size = 12, const std::string& anchor = "start",
                        const std::string& fill = "#000000") {
  return "  <text x=\"" + fmt(x, 2) + "\" y=\"" + fmt(y, 2) +
         "\" font-family=\"sans-serif\" font-size=\"" + std::to_string(size) +
         "\" text-anchor=\"" + anchor + "\" fill=\"" + fill + "\">" +
         escape(content) + "</text>\n";
}

}  // namespace svg

// Horizontal bar chart of an explanation: largest |phi| on top, bars pushing
// toward the AI side drawn right of the zero line, the rest to the left.
inline std::string explanation_svg(const Explanation& e,
                                   std::size_t max_bars = 15) {
  const auto top = top_features(e, max_bars);
  const int row_h = 24;
  const int top_margin = 48;
  const int bottom_margin = 20;
  const int width = 640;
  const int height =
      top_margin + row_h * static_cast<int>(top.size()) + bottom_margin;
  const double label_w = 150.0;
  const double plot_w = width - label_w - 90.0;
  const double x0 = label_w + plot_w / 2.0;

  double max_abs = 0.0;
  for (const auto& t : top) max_abs = std::max(max_abs, std::abs(t.phi));
  const double scale = max_abs > 0.0 ? (plot_w / 2.0 - 4.0) / max_abs : 0.0;

  std::string s = svg::header(width, height);
  s += svg::text(8, 18, "token attribution: " + e.id, 13);
  s += svg::text(8, 36,
                 "f(x)=" + svg::fmt(e.fx, 3) +
                     "  base=" + svg::fmt(e.base_value, 3) + "  [" + e.method +
                     "]",
                 11, "start", "#555555");
  s += svg::line(x0, top_margin - 6, x0,
                 height - bottom_margin + 2, "#888888");
  for (std::size_t i = 0; i < top.size(); ++i) {
    const double y = top_margin + row_h * static_cast<double>(i);
    const double w = std::abs(top[i].phi) * scale;
    const bool positive = top[i].phi >= 0.0;
    const double bar_x = positive ? x0 : x0 - w;
    s += svg::rect(bar_x, y + 4, w, row_h - 10,
                   positive ? "#d62728" : "#1f77b4");
    s += svg::text(label_w - 6, y + row_h / 2.0 + 4, top[i].token, 12, "end");
    const std::string value = svg::fmt(top[i].phi, 3);
    if (positive) {
      s += svg::text(x0 + w + 5, y + row_h / 2.0 + 4, value, 11);
    } else {
      s += svg::text(x0 - w - 5, y + row_h / 2.0 + 4, value, 11, "end");
    }
  }
  s += "</svg>\n";
  return s;
}

// Side-by-side box plots (whiskers at observed extremes, line at the median).
inline std::string box_plot_svg(
    const std::vector<std::pair<std::string, BoxStats>>& groups,
    const std::string& title = "") {
  if (groups.empty()) throw EmptyInputError("no box plot groups");
  const int width = 160 + 140 * static_cast<int>(groups.size());
  const int height = 360;
  const double plot_top = 50.0;
  const double plot_bottom = height - 50.0;

  double lo = groups.front().second.min;
  double hi = groups.front().second.max;
  for (const auto& [name, st] : groups) {
    lo = std::min(lo, st.min);
    hi = std::max(hi, st.max);
  }
  if (hi == lo) hi = lo + 1.0;
  const auto y_of = [&](double v) {
    return plot_bottom - (v - lo) / (hi - lo) * (plot_bottom - plot_top);
  };

  std::string s = svg::header(width, height);
  if (!title.empty()) s += svg::text(8, 22, title, 14);
  s += svg::line(70, plot_top, 70, plot_bottom, "#000000");
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    const double y = y_of(v);
    s += svg::line(66, y, 70, y, "#000000");
    s += svg::text(62, y + 4, svg::fmt(v, 1), 10, "end");
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& st = groups[g].second;
    const double cx = 140.0 + 140.0 * static_cast<double>(g);
    const double half = 40.0;
    s += svg::line(cx, y_of(st.min), cx, y_of(st.q1), "#333333");
    s += svg::line(cx, y_of(st.q3), cx, y_of(st.max), "#333333");
    s += svg::line(cx - half / 2, y_of(st.min), cx + half / 2, y_of(st.min),
                   "#333333");
    s += svg::line(cx - half / 2, y_of(st.max), cx + half / 2, y_of(st.max),
                   "#333333");
    s += svg::rect(cx - half, y_of(st.q3), 2 * half,
                   y_of(st.q1) - y_of(st.q3), "#9ecae1");
    s += svg::line(cx - half, y_of(st.median), cx + half, y_of(st.median),
                   "#d62728", 2.0);
    s += svg::text(cx, plot_bottom + 18, groups[g].first, 12, "middle");
    s += svg::text(cx, plot_bottom + 34,
                   "med " + svg::fmt(st.median, 2) + " / mean " +
                       svg::fmt(st.mean, 2),
                   10, "middle", "#555555");
  }
  s += "</svg>\n";
  return s;
}

// Vertical bars of a length histogram.
inline std::string histogram_svg(const Histogram& h,
                                 const std::string& title = "") {
  if (h.counts.empty() || h.edges.size() != h.counts.size() + 1) {
    throw EmptyInputError("histogram has no bins");
  }
  const int width = 560;
  const int height = 320;
  const double plot_left = 60.0;
  const double plot_right = width - 20.0;
  const double plot_top = 44.0;
  const double plot_bottom = height - 40.0;

  std::uint64_t max_count = 1;
  for (const auto c : h.counts) max_count = std::max(max_count, c);
  const double bar_w = (plot_right - plot_left) / static_cast<double>(h.counts.size());

  std::string s = svg::header(width, height);
  if (!title.empty()) s += svg::text(8, 22, title, 14);
  s += svg::line(plot_left, plot_bottom, plot_right, plot_bottom, "#000000");
  s += svg::line(plot_left, plot_top, plot_left, plot_bottom, "#000000");
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double frac =
        static_cast<double>(h.counts[i]) / static_cast<double>(max_count);
    const double bh = frac * (plot_bottom - plot_top);
    s += svg::rect(plot_left + bar_w * static_cast<double>(i) + 1,
                   plot_bottom - bh, bar_w - 2, bh, "#1f77b4");
  }
  s += svg::text(plot_left, plot_bottom + 16, svg::fmt(h.edges.front(), 1), 10,
                 "middle");
  s += svg::text(plot_right, plot_bottom + 16, svg::fmt(h.edges.back(), 1), 10,
                 "middle");
  s += svg::text(plot_left - 6, plot_top + 4, std::to_string(max_count), 10,
                 "end");
  s += svg::text(plot_left - 6, plot_bottom + 4, "0", 10, "end");
  s += "</svg>\n";
  return s;
}

}  // namespace botspot
