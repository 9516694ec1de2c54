#ifndef FRACTOOL_EXPORT_HPP
#define FRACTOOL_EXPORT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fractool/curve.hpp"
#include "fractool/dimension.hpp"
#include "fractool/model.hpp"

namespace fractool {

/// Fixed-point with `decimals` digits; never prints a negative zero.
inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

// ---------------------------------------------------------------- CSV

inline void write_csv_header(std::ostream& os) { os << "index,x0,y0,x1,y1,type\n"; }

inline void write_csv_row(std::ostream& os, std::size_t index, Vec2 a, Vec2 b, std::size_t type) {
  os << index << ',' << fixed(a.x, 9) << ',' << fixed(a.y, 9) << ',' << fixed(b.x, 9) << ',' << fixed(b.y, 9)
     << ',' << type << '\n';
}

inline std::string csv_export(const Polyline& line) {
  std::ostringstream os;
  write_csv_header(os);
  for (std::size_t i = 0; i < line.segment_count(); ++i)
    write_csv_row(os, i, line.vertices[i], line.vertices[i + 1], line.segment_types[i]);
  return os.str();
}

/// Streams the CSV for iteration k without materializing the polyline.
inline CensusVector stream_csv(std::ostream& os, const FractalSystem& system, std::uint64_t iterations,
                               const ExpandOptions& options = {}) {
  write_csv_header(os);
  std::size_t index = 0;
  return expand(
      system, iterations,
      [&](const PlacedSegment& s) { write_csv_row(os, index++, s.start, s.end, s.type_index); }, options);
}

// ---------------------------------------------------------------- SVG

struct RenderStyle {
  // Green, blue, black, then the fallback colours, cycling.
  std::vector<std::string> palette{"#007F00", "#0000BF", "#000000", "#BF0000",
                                   "#BF7F00", "#7F00BF", "#007F7F", "#7F7F7F"};
  double stroke_width = 0.0015;  // fraction of the bounding-box diagonal
  double margin = 0.02;          // fraction of the larger bounding-box side
  bool show_orientation = false;

  const std::string& colour(std::size_t type) const { return palette[type % palette.size()]; }
};

namespace detail {

struct Bounds {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(Vec2 p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
};

// SVG's y axis points down; flip so the curve reads like the math frame.
inline std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline Vec2 to_svg(Vec2 p) { return {p.x, -p.y}; }

inline std::array<Vec2, 3> orientation_marker(const PlacedSegment& s) {
  // Intrinsic direction and the side given by handedness.
  const double intrinsic = s.intrinsic_reversed ? s.angle + std::numbers::pi : s.angle;
  const Vec2 u = unit_vector(intrinsic);
  const Vec2 n{-u.y * s.handedness, u.x * s.handedness};
  const Vec2 mid = 0.5 * (s.start + s.end);
  const double l = s.length;
  return {mid + (0.15 * l) * u, mid - (0.15 * l) * u, mid - (0.15 * l) * u + (0.2 * l) * n};
}

}  // namespace detail

/// Writes an SVG 1.1 document with one <path class="seg-i"> per segment type.
/// The curve is expanded once for the bounds and once per type, so nothing
/// proportional to the segment count is held in memory.
inline CensusVector render_svg(std::ostream& os, const FractalSystem& system, std::uint64_t iterations,
                               const RenderStyle& style = {}, const ExpandOptions& options = {}) {
  detail::Bounds b;
  CensusVector census = expand(
      system, iterations,
      [&](const PlacedSegment& s) {
        b.add(detail::to_svg(s.start));
        b.add(detail::to_svg(s.end));
        if (style.show_orientation)
          for (Vec2 p : detail::orientation_marker(s)) b.add(detail::to_svg(p));
      },
      options);

  const double w = b.max_x - b.min_x, h = b.max_y - b.min_y;
  const double pad = style.margin * std::max(w, h);
  const double vx0 = std::floor((b.min_x - pad) * 1e6) / 1e6;
  const double vy0 = std::floor((b.min_y - pad) * 1e6) / 1e6;
  const double vx1 = std::ceil((b.max_x + pad) * 1e6) / 1e6;
  const double vy1 = std::ceil((b.max_y + pad) * 1e6) / 1e6;
  const double stroke = style.stroke_width * std::hypot(w, h);

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" << fixed(vx0, 6) << ' '
     << fixed(vy0, 6) << ' ' << fixed(vx1 - vx0, 6) << ' ' << fixed(vy1 - vy0, 6) << "\">\n"
     << "<title>" << detail::xml_escape(system.name) << "</title>\n"
     << "<g fill=\"none\" stroke-linecap=\"round\" stroke-linejoin=\"round\" stroke-width=\"" << fixed(stroke, 6)
     << "\">\n";

  for (std::size_t type = 0; type < system.size(); ++type) {
    if (census.counts[type] == 0) continue;
    os << "<path class=\"seg-" << type << "\" stroke=\"" << style.colour(type) << "\" d=\"";
    bool have_last = false;
    std::string last_x, last_y;
    expand(
        system, iterations,
        [&](const PlacedSegment& s) {
          if (s.type_index != type) return;
          const Vec2 a = detail::to_svg(s.start), e = detail::to_svg(s.end);
          std::string ax = fixed(a.x, 6), ay = fixed(a.y, 6);
          if (!have_last || ax != last_x || ay != last_y) os << (have_last ? " M" : "M") << ax << ' ' << ay;
          last_x = fixed(e.x, 6);
          last_y = fixed(e.y, 6);
          os << " L" << last_x << ' ' << last_y;
          have_last = true;
        },
        options);
    os << "\"/>\n";
  }

  if (style.show_orientation) {
    os << "<g class=\"orientation\" stroke=\"none\">\n";
    for (std::size_t type = 0; type < system.size(); ++type) {
      if (census.counts[type] == 0) continue;
      os << "<path class=\"orient-" << type << "\" fill=\"" << style.colour(type) << "\" d=\"";
      bool first = true;
      expand(
          system, iterations,
          [&](const PlacedSegment& s) {
            if (s.type_index != type) return;
            const auto tri = detail::orientation_marker(s);
            for (std::size_t i = 0; i < 3; ++i) {
              const Vec2 p = detail::to_svg(tri[i]);
              os << (i == 0 ? (first ? "M" : " M") : " L") << fixed(p.x, 6) << ' ' << fixed(p.y, 6);
            }
            os << " Z";
            first = false;
          },
          options);
      os << "\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</g>\n</svg>\n";
  return census;
}

// ---------------------------------------------------------------- JSON report

struct CensusRow {
  std::uint64_t k = 0;
  CensusVector census;
};

/// Everything `fractool analyze --json` reports.
struct AnalysisDocument {
  std::string system;
  std::vector<std::string> types;
  SubstitutionMatrix matrix;
  std::optional<std::uint64_t> primitive_exponent;
  double lambda = 0.0;
  std::vector<double> freq;
  std::vector<double> left;
  std::vector<double> scales;
  double dimension = 0.0;
  double residual = 0.0;
  SolveMethod method = SolveMethod::closed_form;
  std::vector<std::string> warnings;
  std::vector<CensusRow> census;
};

inline AnalysisDocument make_analysis_document(const FractalSystem& system, const Analysis& analysis,
                                               std::uint64_t census_kmax) {
  AnalysisDocument doc;
  doc.system = system.name;
  for (const auto& t : system.types) doc.types.push_back(t.name);
  doc.matrix = analysis.spectral.matrix;
  doc.primitive_exponent = analysis.spectral.primitive_exponent;
  doc.lambda = analysis.spectral.lambda_pf;
  doc.freq = analysis.spectral.freq;
  doc.left = analysis.spectral.left;
  doc.scales = analysis.report.problem.scales;
  doc.dimension = analysis.report.dimension;
  doc.residual = analysis.report.residual;
  doc.method = analysis.report.method;
  doc.warnings = analysis.report.warnings;
  for (std::uint64_t k = 0; k <= census_kmax; ++k) doc.census.push_back({k, segment_census(system, k)});
  return doc;
}

inline nlohmann::ordered_json to_json(const AnalysisDocument& doc) {
  nlohmann::ordered_json j;
  j["system"] = doc.system;
  j["types"] = doc.types;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < doc.matrix.size(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < doc.matrix.size(); ++c) row.push_back(doc.matrix(r, c));
    rows.push_back(row);
  }
  j["matrix"] = rows;
  j["primitive_exponent"] = doc.primitive_exponent ? nlohmann::ordered_json(*doc.primitive_exponent) : nullptr;
  j["lambda"] = doc.lambda;
  j["freq"] = doc.freq;
  j["left"] = doc.left;
  j["scales"] = doc.scales;
  j["dimension"] = doc.dimension;
  j["residual"] = doc.residual;
  j["method"] = std::string(to_string(doc.method));
  j["warnings"] = doc.warnings;
  auto census = nlohmann::ordered_json::array();
  for (const auto& row : doc.census) {
    auto counts = nlohmann::ordered_json::array();
    // Counts are decimal strings so arbitrarily large values survive.
    for (const auto& c : row.census.counts) counts.push_back(c.str());
    census.push_back({{"k", row.k}, {"counts", counts}});
  }
  j["census"] = census;
  return j;
}

}  // namespace fractool

#endif  // FRACTOOL_EXPORT_HPP
