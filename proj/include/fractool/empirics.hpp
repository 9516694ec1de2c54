#ifndef FRACTOOL_EMPIRICS_HPP
#define FRACTOOL_EMPIRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_set>
#include <vector>

#include "fractool/curve.hpp"
#include "fractool/error.hpp"
#include "fractool/spectral.hpp"

namespace fractool {

struct ConvergenceEntry {
  std::uint64_t k = 0;
  CensusVector census;
  std::vector<double> normalized;
  double distance = 0.0;
};

struct ConvergenceSeries {
  std::vector<double> freq;
  std::vector<ConvergenceEntry> entries;
};

/// counts / sum(counts) as doubles, exact up to rounding even when the
/// integers exceed the double range.
inline std::vector<double> normalize_counts(const std::vector<BigInt>& counts) {
  BigInt total = 0;
  for (const auto& c : counts) total += c;
  std::vector<double> out(counts.size(), 0.0);
  if (total == 0) return out;
  const std::size_t bits = boost::multiprecision::msb(total) + 1;
  const std::size_t shift = bits > 60 ? bits - 60 : 0;
  const double denom = static_cast<double>(total >> shift);
  for (std::size_t i = 0; i < counts.size(); ++i)
    out[i] = static_cast<double>(counts[i] >> shift) / denom;
  return out;
}

inline double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

/// Distance between the normalized census M^k e_init and the PF frequencies
/// for k = 1..k_max, from exact integer products.
inline ConvergenceSeries frequency_convergence(const FractalSystem& system, std::uint64_t k_max) {
  if (k_max < 1) throw Error(ErrorCode::structural, "k_max must be at least 1");
  const SpectralData spectral = spectral_analysis(system);
  const BigMatrix m = to_big(spectral.matrix);
  const std::size_t n = m.size();
  ConvergenceSeries out;
  out.freq = spectral.freq;
  std::vector<BigInt> v(n, 0);
  v[system.initiator_type] = 1;
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    std::vector<BigInt> next(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (m(i, j) != 0) next[i] += m(i, j) * v[j];
    v = std::move(next);
    ConvergenceEntry e;
    e.k = k;
    e.census.counts = v;
    e.normalized = normalize_counts(v);
    e.distance = l1_distance(e.normalized, spectral.freq);
    out.entries.push_back(std::move(e));
  }
  return out;
}

struct BoxCountFit {
  std::vector<double> scales;          // box sizes, decreasing
  std::vector<std::uint64_t> counts;   // occupied boxes per scale
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  bool poor_fit = false;               // r_squared < 0.98
};

struct BoxCountOptions {
  // Finest box size is kept at or above this multiple of the shortest edge.
  double floor_multiple = 4.0;
};

namespace detail {

struct CellKey {
  static std::uint64_t pack(std::int64_t ix, std::int64_t iy) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
           static_cast<std::uint32_t>(iy);
  }
};

/// Adds every half-open grid cell the edge a->b passes through
/// (Amanatides-Woo walk). A cell only touched at b is not entered.
inline void rasterize_edge(Vec2 a, Vec2 b, Vec2 origin, double eps,
                           std::unordered_set<std::uint64_t>& occupied) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const int sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
  const int sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
  auto first = [&](double v, double o) { return static_cast<std::int64_t>(std::floor((v - o) / eps)); };
  // Last cell reached while moving in direction s: approach b from inside.
  auto last = [&](double v, double o, int s, std::int64_t start) {
    const double c = (v - o) / eps;
    if (s > 0) return std::max(start, static_cast<std::int64_t>(std::ceil(c)) - 1);
    if (s < 0) return std::min(start, static_cast<std::int64_t>(std::floor(c)));
    return start;
  };
  std::int64_t ix = first(a.x, origin.x), iy = first(a.y, origin.y);
  const std::int64_t ex = last(b.x, origin.x, sx, ix);
  const std::int64_t ey = last(b.y, origin.y, sy, iy);
  constexpr double inf = std::numeric_limits<double>::infinity();
  double tmax_x = sx == 0 ? inf : (origin.x + static_cast<double>(ix + (sx > 0)) * eps - a.x) / dx;
  double tmax_y = sy == 0 ? inf : (origin.y + static_cast<double>(iy + (sy > 0)) * eps - a.y) / dy;
  const double tdelta_x = sx == 0 ? inf : eps / std::abs(dx);
  const double tdelta_y = sy == 0 ? inf : eps / std::abs(dy);
  occupied.insert(CellKey::pack(ix, iy));
  while (ix != ex || iy != ey) {
    const bool step_x = iy == ey || (ix != ex && tmax_x < tmax_y);
    if (step_x) {
      ix += sx;
      tmax_x += tdelta_x;
    } else {
      iy += sy;
      tmax_y += tdelta_y;
    }
    occupied.insert(CellKey::pack(ix, iy));
  }
}

}  // namespace detail

/// Box-counting estimate over a dyadic ladder eps_s = diameter / 2^(s+1),
/// s = 1..num_scales, where diameter is the bounding-box diagonal.
inline BoxCountFit box_count_dimension(const Polyline& line, int num_scales,
                                       const BoxCountOptions& options = {}) {
  if (line.vertices.size() < 2) throw Error(ErrorCode::geometry, "polyline needs at least two vertices");
  if (num_scales < 4) throw Error(ErrorCode::geometry, "at least 4 scales are required");
  Vec2 lo = line.vertices.front(), hi = lo;
  double shortest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < line.vertices.size(); ++i) {
    const Vec2 v = line.vertices[i];
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    if (i > 0) shortest = std::min(shortest, norm(v - line.vertices[i - 1]));
  }
  const double diameter = norm(hi - lo);
  if (!(diameter > 0.0)) throw Error(ErrorCode::geometry, "polyline has zero diameter");

  // A single edge has no finer structure to protect.
  const double floor = line.vertices.size() > 2 ? options.floor_multiple * shortest : 0.0;

  BoxCountFit fit;
  std::unordered_set<std::uint64_t> occupied;
  for (int s = 1; s <= num_scales; ++s) {
    const double eps = diameter / std::ldexp(1.0, s + 1);
    if (eps < floor) break;
    occupied.clear();
    for (std::size_t i = 1; i < line.vertices.size(); ++i)
      detail::rasterize_edge(line.vertices[i - 1], line.vertices[i], lo, eps, occupied);
    fit.scales.push_back(eps);
    fit.counts.push_back(occupied.size());
  }
  if (fit.scales.size() < 4)
    throw Error(ErrorCode::geometry, "only " + std::to_string(fit.scales.size()) +
                                         " scales lie above the resolution floor; iterate further");

  const std::size_t m = fit.scales.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = std::log(1.0 / fit.scales[i]);
    ys[i] = std::log(static_cast<double>(fit.counts[i]));
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double dm = static_cast<double>(m);
  fit.slope = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / dm;
  const double mean = sy / dm;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double pred = fit.intercept + fit.slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  fit.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
  fit.poor_fit = fit.r_squared < 0.98;
  return fit;
}

}  // namespace fractool

#endif  // FRACTOOL_EMPIRICS_HPP
