#include "tagsight/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace tagsight::plot {
namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(int w, int h) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      w, h);
}

const char* category_colour(TagCategory c) {
  switch (c) {
    case TagCategory::concrete_food: return "#d62728";
    case TagCategory::food_related: return "#1f77b4";
    case TagCategory::non_food: return "#2ca02c";
    case TagCategory::unlabeled: return "#7f7f7f";
  }
  return "#7f7f7f";
}

}  // namespace

std::string visualness_svg(const VisualnessReport& report) {
  const int w = 800, h = 400, left = 50, right = 20, top = 20, bottom = 40;
  const double pw = w - left - right, ph = h - top - bottom;
  std::string svg = header(w, h);
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", left, top, top + ph);
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", left, top + ph, left + pw);
  for (double v : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const double y = top + ph * (1.0 - v);
    svg += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:.2f}</text>\n", left - 4, y + 4, v);
    svg += fmt::format("<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"#eee\"/>\n", left, y, left + pw, y);
  }
  const std::size_t n = report.ranked.size();
  const double bar = n ? pw / static_cast<double>(n) : pw;
  for (std::size_t i = 0; i < n; ++i) {
    const TagVisualness& t = report.ranked[i];
    const double bh = ph * std::clamp(t.balanced_accuracy, 0.0, 1.0);
    svg += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"><title>{} {:.3f}</title></rect>\n",
        left + bar * static_cast<double>(i), top + ph - bh, std::max(bar * 0.9, 0.5), bh,
        category_colour(t.category), escape(t.tag), t.balanced_accuracy);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">tags ranked by balanced accuracy</text>\n",
                     left + pw / 2, h - 10);
  return svg + "</svg>\n";
}

std::string geo_scatter_svg(const CountryAtlas& atlas, const GeoStats& stats) {
  const int w = 1080, h = 540;
  auto x = [&](double lon) { return (std::remainder(lon, 360.0) + 180.0) * w / 360.0; };
  auto y = [&](double lat) { return (90.0 - lat) * h / 180.0; };
  std::string svg = header(w, h);
  for (const Ring& ring : atlas.rings()) {
    std::string pts;
    for (const Vertex& v : ring.vertices) pts += fmt::format("{:.1f},{:.1f} ", (v.lon + 180.0) * w / 360.0, y(v.lat));
    svg += fmt::format("<polygon points=\"{}\" fill=\"#f0f0f0\" stroke=\"#999\" stroke-width=\"0.5\"/>\n", pts);
  }
  for (const auto& r : stats.records) {
    if (!r) continue;
    svg += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"1.5\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
                       x(r->lon), y(r->lat), r->country ? "#2ca02c" : "#d62728");
  }
  return svg + "</svg>\n";
}

std::string correlation_heatmap_svg(const CorrelationMatrix& m) {
  const int cell = 18, label = 110;
  const int n = static_cast<int>(m.tags.size());
  const int w = label + n * cell + 10, h = label + n * cell + 10;
  std::string svg = header(w, h);
  for (int i = 0; i < n; ++i) {
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", label - 4,
                       label + i * cell + cell * 0.7, escape(m.tags[i]));
    svg += fmt::format("<text transform=\"translate({},{}) rotate(-60)\">{}</text>\n",
                       label + i * cell + cell / 2, label - 4, escape(m.tags[i]));
    for (int j = 0; j < n; ++j) {
      std::string fill = "#cccccc";
      if (m.defined(i, j)) {
        const double v = std::clamp(m.values(i, j), -1.0, 1.0);
        const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(v))));
        fill = v >= 0 ? fmt::format("#ff{:02x}{:02x}", fade, fade) : fmt::format("#{:02x}{:02x}ff", fade, fade);
      }
      svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", label + j * cell,
                         label + i * cell, cell, cell, fill);
    }
  }
  return svg + "</svg>\n";
}

}  // namespace tagsight::plot
