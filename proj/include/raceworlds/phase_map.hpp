#ifndef RACEWORLDS_PHASE_MAP_HPP
#define RACEWORLDS_PHASE_MAP_HPP

// (delta, C) phase maps: grid sweeps, region areas, CSV and SVG output.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <utility>
#include <vector>

#include "raceworlds/equilibrium.hpp"
#include "raceworlds/game.hpp"
#include "raceworlds/thresholds.hpp"

namespace raceworlds {

struct SweepSpec {
  double delta_min = 0.0;
  double delta_max = 1.0;
  std::size_t delta_steps = 201;
  double c_min = 0.0;
  double c_max = 15.0;
  std::size_t c_steps = 301;
  double winner_advantage = 1.0;
  double sigma = 0.1;
  double s_race = 0.85;

  double delta_width() const { return (delta_max - delta_min) / static_cast<double>(delta_steps); }
  double c_height() const { return (c_max - c_min) / static_cast<double>(c_steps); }

  // Cell centers.
  double delta_at(std::size_t i) const {
    return delta_min + (static_cast<double>(i) + 0.5) * delta_width();
  }
  double cost_at(std::size_t j) const {
    return c_min + (static_cast<double>(j) + 0.5) * c_height();
  }

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

enum class Preset { Figure1, Figure2, Figure3 };

/// Figure regimes: informed enemies (W=1, sigma=0.1), moderately informed
/// enemies (W=1, sigma=0.2), informed moderate enemies (W=0.7, sigma=0.1).
inline SweepSpec preset_spec(Preset p) {
  SweepSpec s;
  switch (p) {
    case Preset::Figure1: break;
    case Preset::Figure2: s.sigma = 0.2; break;
    case Preset::Figure3: s.winner_advantage = 0.7; break;
  }
  return s;
}

inline std::optional<Preset> parse_preset(std::string_view name) {
  if (name == "figure1") return Preset::Figure1;
  if (name == "figure2") return Preset::Figure2;
  if (name == "figure3") return Preset::Figure3;
  return std::nullopt;
}

inline void validate(const SweepSpec& s) {
  detail::require(std::isfinite(s.delta_min) && s.delta_min >= 0.0, "delta_min",
                  "finite and >= 0", s.delta_min);
  detail::require(std::isfinite(s.delta_max) && s.delta_max > s.delta_min, "delta_max",
                  "finite and > delta_min", s.delta_max);
  detail::require(std::isfinite(s.c_min) && s.c_min >= 0.0, "c_min", "finite and >= 0",
                  s.c_min);
  detail::require(std::isfinite(s.c_max) && s.c_max > s.c_min, "c_max",
                  "finite and > c_min", s.c_max);
  detail::require(s.delta_steps >= 2, "delta_steps", ">= 2",
                  static_cast<double>(s.delta_steps));
  detail::require(s.c_steps >= 2, "c_steps", ">= 2", static_cast<double>(s.c_steps));
  detail::check_winner_advantage(s.winner_advantage);
  detail::check_sigma(s.sigma);
  detail::check_s_race(s.s_race);
}

struct PhaseGrid {
  SweepSpec spec;
  std::vector<World> cells;  // row-major: index i * c_steps + j
  std::array<std::vector<ThresholdCurveSample>, 4> curves;  // by kAllThresholdKinds

  World at(std::size_t i, std::size_t j) const { return cells.at(i * spec.c_steps + j); }

  /// Indices of the cell covering (delta, cost), if inside the swept area.
  std::optional<std::pair<std::size_t, std::size_t>> cell_containing(double delta,
                                                                     double cost) const {
    if (delta < spec.delta_min || delta > spec.delta_max || cost < spec.c_min ||
        cost > spec.c_max) {
      return std::nullopt;
    }
    auto index = [](double v, double lo, double step, std::size_t n) {
      const auto k = static_cast<std::size_t>(std::floor((v - lo) / step));
      return std::min(k, n - 1);
    };
    return std::pair{index(delta, spec.delta_min, spec.delta_width(), spec.delta_steps),
                     index(cost, spec.c_min, spec.c_height(), spec.c_steps)};
  }
};

/// Classifies every cell center. Rows are split across `threads` workers
/// (0 = hardware concurrency); the result does not depend on the count.
inline PhaseGrid sweep(const SweepSpec& spec, unsigned threads = 0) {
  validate(spec);
  PhaseGrid grid{spec, std::vector<World>(spec.delta_steps * spec.c_steps), {}};

  std::vector<double> deltas(spec.delta_steps);
  for (std::size_t i = 0; i < spec.delta_steps; ++i) deltas[i] = spec.delta_at(i);

  auto classify_rows = [&](std::size_t first, std::size_t stride) {
    GameParams p{0.0, spec.winner_advantage, 0.0, spec.sigma, spec.s_race};
    for (std::size_t i = first; i < spec.delta_steps; i += stride) {
      p.delta = deltas[i];
      for (std::size_t j = 0; j < spec.c_steps; ++j) {
        p.cost = spec.cost_at(j);
        grid.cells[i * spec.c_steps + j] = classify_world(p);
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, spec.delta_steps));
  if (threads <= 1) {
    classify_rows(0, 1);
  } else {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) workers.emplace_back(classify_rows, t, threads);
  }

  for (std::size_t k = 0; k < kAllThresholdKinds.size(); ++k) {
    grid.curves[k] = threshold_curve(kAllThresholdKinds[k], deltas, spec.winner_advantage,
                                     spec.sigma, spec.s_race);
  }
  return grid;
}

struct RegionAreas {
  std::array<double, kAllWorlds.size()> fractions{};

  double of(World w) const { return fractions[world_index(w)]; }
};

inline RegionAreas region_areas(const PhaseGrid& grid) {
  if (grid.cells.empty()) throw std::invalid_argument("region_areas: empty grid");
  std::array<std::size_t, kAllWorlds.size()> counts{};
  for (World w : grid.cells) ++counts[world_index(w)];
  RegionAreas areas;
  const auto n = static_cast<double>(grid.cells.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    areas.fractions[k] = static_cast<double>(counts[k]) / n;
  }
  return areas;
}

namespace detail {

// Shortest form with at most 9 significant digits; locale independent.
inline std::string format_g9(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return {buf, end};
}

inline std::string format_fixed(double v, int precision) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return {buf, end};
}

inline void check_sink(const std::ostream& out, std::string_view what) {
  if (!out) throw std::runtime_error(std::string(what) + ": write to output failed");
}

}  // namespace detail

/// `delta,cost,world` followed by one row per cell, row-major.
inline void emit_csv(const PhaseGrid& grid, std::ostream& out) {
  const auto& s = grid.spec;
  std::string buffer = "delta,cost,world\n";
  buffer.reserve(grid.cells.size() * 40);
  for (std::size_t i = 0; i < s.delta_steps; ++i) {
    const std::string d = detail::format_g9(s.delta_at(i));
    for (std::size_t j = 0; j < s.c_steps; ++j) {
      buffer += d;
      buffer += ',';
      buffer += detail::format_g9(s.cost_at(j));
      buffer += ',';
      buffer += to_string(grid.at(i, j));
      buffer += '\n';
    }
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  out.flush();
  detail::check_sink(out, "emit_csv");
}

/// Region fill colors: 20% tints of green, yellow, orange and red; gray for
/// the labels that never appear in the standard maps.
constexpr std::string_view fill_color(World w) {
  switch (w) {
    case World::SafeHarmony: return "#ccffcc";
    case World::Trust: return "#ffffcc";
    case World::Subversion: return "#ffe6cc";
    case World::Preemption: return "#ffcccc";
    default: return "#cccccc";
  }
}

struct CurveStyle {
  std::string_view stroke;
  std::string_view dash;  // empty for solid
};

constexpr CurveStyle curve_style(ThresholdKind k) {
  switch (k) {
    case ThresholdKind::LaggardCooperation: return {"#ff0000", ""};
    case ThresholdKind::FrontrunnerUnilateralBreak: return {"#0000ff", ""};
    case ThresholdKind::LaggardUnilateralBreak: return {"#ff8000", "6,4"};
    case ThresholdKind::FrontrunnerCooperation: return {"#009900", "2,3"};
  }
  return {"#000000", ""};
}

namespace detail {

struct Point {
  double x;
  double y;
};

// Splits a polyline into the runs that lie inside [y_lo, y_hi], cutting
// segments at the boundary.
inline std::vector<std::vector<Point>> clip_polyline(const std::vector<Point>& pts,
                                                     double y_lo, double y_hi) {
  std::vector<std::vector<Point>> runs;
  std::vector<Point> run;
  auto flush = [&] {
    if (run.size() >= 2) runs.push_back(run);
    run.clear();
  };
  auto cut = [](Point a, Point b, double y) {
    const double t = (y - a.y) / (b.y - a.y);
    return Point{a.x + t * (b.x - a.x), y};
  };
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    Point a = pts[k];
    Point b = pts[k + 1];
    if (!std::isfinite(a.y) || !std::isfinite(b.y) || (a.y < y_lo && b.y < y_lo) ||
        (a.y > y_hi && b.y > y_hi)) {
      flush();
      continue;
    }
    const bool a_cut = a.y < y_lo || a.y > y_hi;
    const bool b_cut = b.y < y_lo || b.y > y_hi;
    if (a_cut) a = cut(a, b, a.y < y_lo ? y_lo : y_hi);
    if (b_cut) b = cut(a, b, b.y < y_lo ? y_lo : y_hi);
    if (a_cut || run.empty()) {
      flush();
      run.push_back(a);
    }
    run.push_back(b);
    if (b_cut) flush();
  }
  flush();
  return runs;
}

}  // namespace detail

/// Standalone SVG 1.1: one rect per cell, the four threshold curves as
/// polylines, axes, tick labels and a legend.
inline void render_svg(const PhaseGrid& grid, std::ostream& out) {
  using detail::format_fixed;
  using detail::format_g9;
  const auto& s = grid.spec;

  constexpr double kLeft = 80.0, kTop = 40.0, kPlotW = 600.0, kPlotH = 420.0;
  constexpr double kWidth = 900.0, kHeight = 530.0;
  const double cw = kPlotW / static_cast<double>(s.delta_steps);
  const double ch = kPlotH / static_cast<double>(s.c_steps);
  auto px = [&](double delta) { return kLeft + (delta - s.delta_min) / (s.delta_max - s.delta_min) * kPlotW; };
  auto py = [&](double c) { return kTop + kPlotH - (c - s.c_min) / (s.c_max - s.c_min) * kPlotH; };

  std::string svg;
  svg.reserve(grid.cells.size() * 80 + 4096);
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         format_fixed(kWidth, 0) + "\" height=\"" + format_fixed(kHeight, 0) +
         "\" viewBox=\"0 0 " + format_fixed(kWidth, 0) + " " + format_fixed(kHeight, 0) +
         "\" font-family=\"sans-serif\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + format_fixed(kWidth, 0) + "\" height=\"" +
         format_fixed(kHeight, 0) + "\" fill=\"#ffffff\"/>\n";
  svg += "<title>Strategic worlds (W=" + format_g9(s.winner_advantage) +
         ", σ=" + format_g9(s.sigma) + ", s=" + format_g9(s.s_race) + ")</title>\n";

  svg += "<g shape-rendering=\"crispEdges\">\n";
  const std::string w_str = format_fixed(cw, 4);
  const std::string h_str = format_fixed(ch, 4);
  for (std::size_t i = 0; i < s.delta_steps; ++i) {
    const std::string x_str = format_fixed(kLeft + static_cast<double>(i) * cw, 4);
    for (std::size_t j = 0; j < s.c_steps; ++j) {
      const double y = kTop + static_cast<double>(s.c_steps - 1 - j) * ch;
      svg += "<rect x=\"" + x_str + "\" y=\"" + format_fixed(y, 4) + "\" width=\"" + w_str +
             "\" height=\"" + h_str + "\" fill=\"" + std::string(fill_color(grid.at(i, j))) +
             "\"/>\n";
    }
  }
  svg += "</g>\n";

  for (std::size_t k = 0; k < kAllThresholdKinds.size(); ++k) {
    std::vector<detail::Point> pts;
    pts.reserve(grid.curves[k].size());
    for (const auto& sample : grid.curves[k]) pts.push_back({sample.delta, sample.c_star});
    const CurveStyle style = curve_style(kAllThresholdKinds[k]);
    for (const auto& run : detail::clip_polyline(pts, s.c_min, s.c_max)) {
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(style.stroke) +
             "\" stroke-width=\"2\"";
      if (!style.dash.empty()) svg += " stroke-dasharray=\"" + std::string(style.dash) + "\"";
      svg += " points=\"";
      for (std::size_t n = 0; n < run.size(); ++n) {
        if (n) svg += ' ';
        svg += format_fixed(px(run[n].x), 2) + "," + format_fixed(py(run[n].y), 2);
      }
      svg += "\"><title>" + std::string(short_name(kAllThresholdKinds[k])) +
             "</title></polyline>\n";
    }
  }

  // Axes and ticks.
  svg += "<polyline fill=\"none\" stroke=\"#000000\" stroke-width=\"1\" points=\"" +
         format_fixed(kLeft, 2) + "," + format_fixed(kTop, 2) + " " + format_fixed(kLeft, 2) +
         "," + format_fixed(kTop + kPlotH, 2) + " " + format_fixed(kLeft + kPlotW, 2) + "," +
         format_fixed(kTop + kPlotH, 2) + "\"/>\n";
  constexpr int kTicks = 5;
  for (int t = 0; t <= kTicks; ++t) {
    const double d = s.delta_min + (s.delta_max - s.delta_min) * t / kTicks;
    const double c = s.c_min + (s.c_max - s.c_min) * t / kTicks;
    svg += "<text x=\"" + format_fixed(px(d), 2) + "\" y=\"" + format_fixed(kTop + kPlotH + 18, 2) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + format_g9(d) + "</text>\n";
    svg += "<text x=\"" + format_fixed(kLeft - 8, 2) + "\" y=\"" + format_fixed(py(c) + 4, 2) +
           "\" font-size=\"12\" text-anchor=\"end\">" + format_g9(c) + "</text>\n";
  }
  svg += "<text x=\"" + format_fixed(kLeft + kPlotW / 2, 2) + "\" y=\"" +
         format_fixed(kTop + kPlotH + 42, 2) +
         "\" font-size=\"14\" text-anchor=\"middle\">Relative Capability Lead (Δ)</text>\n";
  svg += "<text x=\"24\" y=\"" + format_fixed(kTop + kPlotH / 2, 2) +
         "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 24 " +
         format_fixed(kTop + kPlotH / 2, 2) + ")\">Catastrophic Cost (C)</text>\n";
  svg += "<text x=\"" + format_fixed(kLeft + kPlotW / 2, 2) +
         "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">W=" + format_g9(s.winner_advantage) +
         ", σ=" + format_g9(s.sigma) + ", s=" + format_g9(s.s_race) + "</text>\n";

  // Legend.
  double ly = kTop + 10;
  const double lx = kLeft + kPlotW + 24;
  for (World w : {World::SafeHarmony, World::Trust, World::Subversion, World::Preemption}) {
    svg += "<rect x=\"" + format_fixed(lx, 2) + "\" y=\"" + format_fixed(ly, 2) +
           "\" width=\"16\" height=\"12\" fill=\"" + std::string(fill_color(w)) +
           "\" stroke=\"#666666\"/>\n";
    svg += "<text x=\"" + format_fixed(lx + 24, 2) + "\" y=\"" + format_fixed(ly + 11, 2) +
           "\" font-size=\"12\">" + std::string(to_string(w)) + "</text>\n";
    ly += 22;
  }
  ly += 10;
  for (ThresholdKind k : kAllThresholdKinds) {
    const CurveStyle style = curve_style(k);
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(style.stroke) +
           "\" stroke-width=\"2\"";
    if (!style.dash.empty()) svg += " stroke-dasharray=\"" + std::string(style.dash) + "\"";
    svg += " points=\"" + format_fixed(lx, 2) + "," + format_fixed(ly + 6, 2) + " " +
           format_fixed(lx + 16, 2) + "," + format_fixed(ly + 6, 2) + "\"/>\n";
    svg += "<text x=\"" + format_fixed(lx + 24, 2) + "\" y=\"" + format_fixed(ly + 11, 2) +
           "\" font-size=\"12\">" + std::string(short_name(k)) + "</text>\n";
    ly += 22;
  }
  svg += "</svg>\n";

  out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
  out.flush();
  detail::check_sink(out, "render_svg");
}

}  // namespace raceworlds

#endif  // RACEWORLDS_PHASE_MAP_HPP
