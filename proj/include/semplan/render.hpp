#pragma once

#include <cstdio>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

#include "semplan/executor.hpp"
#include "semplan/io.hpp"

namespace semplan {

namespace detail {

inline constexpr double kCellPx = 40.0;
inline constexpr const char* kPalette[] = {"#e6b800", "#1f77b4", "#2ca02c", "#d62728",
                                           "#9467bd", "#8c564b", "#e377c2", "#17becf"};

template <typename... Args>
std::string svg_fmt(const char* pattern, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

}  // namespace detail

/// SVG picture of an episode on a grid map: candidate-label shading from the
/// initial belief (one stripe per observation, opacity = probability mass),
/// blocked cells, the realized path as one segment per action, and circles
/// where the planner replanned. Output depends only on the inputs.
inline std::string render_trace_svg(const EpisodeTrace& trace, const Scene& scene) {
  using detail::kCellPx;
  using detail::svg_fmt;
  if (!scene.model.grid()) throw ModelError("rendering needs a grid model");
  const GridLayout& g = *scene.model.grid();
  const std::size_t nobs = scene.model.alphabet().size();
  const double width = g.width * kCellPx;
  const double height = g.height * kCellPx;
  auto sx = [&](int x) { return x * kCellPx; };
  auto sy = [&](int y) { return (g.height - 1 - y) * kCellPx; };

  std::string out = svg_fmt(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n", width,
      height, width, height);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (nobs > 0) {
    const double stripe = kCellPx / static_cast<double>(nobs);
    for (StateId x = 0; x < g.cells.size(); ++x) {
      const Cell c = g.cells[x];
      for (ObservationId o = 0; o < nobs; ++o) {
        double mass = 0.0;
        for (const auto& e : scene.belief.support(x)) {
          if (e.letter.contains(o)) mass += e.p;
        }
        if (mass <= 0.0) continue;
        out += svg_fmt(
            "<rect class=\"belief\" x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"%s\" "
            "fill-opacity=\"%.3f\"/>\n",
            sx(c.x) + o * stripe, sy(c.y), stripe, kCellPx, detail::kPalette[o % std::size(detail::kPalette)],
            0.6 * mass);
      }
    }
  }
  for (const Cell& c : scene.spec.blocked) {
    out += svg_fmt("<rect class=\"blocked\" x=\"%.0f\" y=\"%.0f\" width=\"%.0f\" height=\"%.0f\" fill=\"#333\"/>\n",
                   sx(c.x), sy(c.y), kCellPx, kCellPx);
  }
  for (int x = 0; x <= g.width; ++x) {
    out += svg_fmt("<line class=\"grid\" x1=\"%.0f\" y1=\"0\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"#999\"/>\n", sx(x),
                   sx(x), height);
  }
  for (int y = 0; y <= g.height; ++y) {
    out += svg_fmt("<line class=\"grid\" x1=\"0\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"#999\"/>\n",
                   y * kCellPx, width, y * kCellPx);
  }

  auto center = [&](StateId x) {
    const Cell c = g.cells.at(x);
    return std::pair{sx(c.x) + kCellPx / 2.0, sy(c.y) + kCellPx / 2.0};
  };
  for (std::size_t i = 0; i + 1 < trace.states.size(); ++i) {
    const auto [x1, y1] = center(trace.states[i]);
    const auto [x2, y2] = center(trace.states[i + 1]);
    out += svg_fmt(
        "<line class=\"path\" x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\" stroke-width=\"3\"/>\n",
        x1, y1, x2, y2);
  }
  for (const auto& r : trace.replans) {
    if (r.t >= trace.states.size()) continue;
    const auto [cx, cy] = center(trace.states[r.t]);
    out += svg_fmt("<circle class=\"replan\" cx=\"%.1f\" cy=\"%.1f\" r=\"5\" fill=\"red\"/>\n", cx, cy);
  }
  if (!trace.states.empty()) {
    const auto [cx, cy] = center(trace.states.front());
    out += svg_fmt("<circle class=\"start\" cx=\"%.1f\" cy=\"%.1f\" r=\"9\" fill=\"none\" stroke=\"black\"/>\n", cx,
                   cy);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace semplan
