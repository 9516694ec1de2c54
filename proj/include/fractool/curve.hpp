#ifndef FRACTOOL_CURVE_HPP
#define FRACTOOL_CURVE_HPP

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include "fractool/error.hpp"
#include "fractool/geometry.hpp"
#include "fractool/model.hpp"
#include "fractool/spectral.hpp"

namespace fractool {

inline constexpr std::uint64_t kDefaultMaxSegments = 10'000'000;

/// A leaf segment of the expanded curve. start/end are in traversal order.
struct PlacedSegment {
  std::size_t type_index = 0;
  Vec2 start;
  Vec2 end;
  double angle = 0.0;   // direction of traversal, radians
  double length = 0.0;
  int handedness = 1;
  bool intrinsic_reversed = false;
};

struct Polyline {
  std::vector<Vec2> vertices;
  std::vector<std::size_t> segment_types;

  std::size_t segment_count() const noexcept { return segment_types.size(); }
};

/// One exact count per segment type.
struct CensusVector {
  std::vector<BigInt> counts;

  BigInt total() const {
    BigInt s = 0;
    for (const auto& c : counts) s += c;
    return s;
  }
  friend bool operator==(const CensusVector&, const CensusVector&) = default;
};

struct ExpandOptions {
  std::uint64_t max_segments = kDefaultMaxSegments;
  // Place the initiator like a reversed step: intrinsic start at (l, 0).
  bool initiator_reversed = false;
};

/// Exact per-type counts after `iterations` rewrites of the initiator, by
/// tallying generator steps level by level.
inline CensusVector segment_census(const FractalSystem& system, std::uint64_t iterations) {
  const std::size_t n = system.size();
  std::vector<BigInt> current(n, 0);
  current.at(system.initiator_type) = 1;
  for (std::uint64_t k = 0; k < iterations; ++k) {
    std::vector<BigInt> next(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (current[i] == 0) continue;
      for (const auto& step : system.generators[i].steps) next[step.type_index()] += current[i];
    }
    current = std::move(next);
  }
  return {std::move(current)};
}

namespace detail {

using Complex = std::complex<double>;

inline Complex to_complex(Vec2 v) { return {v.x, v.y}; }
inline Vec2 to_vec(Complex c) { return {c.real(), c.imag()}; }
inline Complex hand(Complex w, int h) { return h > 0 ? w : std::conj(w); }

struct GeneratorFrame {
  std::vector<Complex> joints;  // chain vertices in the target's intrinsic frame
  std::vector<Complex> steps;   // r_i * e^{i theta_m}
};

template <typename Sink>
class Expander {
 public:
  Expander(const FractalSystem& system, std::uint64_t iterations, Sink& sink)
      : system_(system), iterations_(iterations), sink_(sink), census_(system.size(), 0) {
    frames_.reserve(system.size());
    std::size_t max_steps = 0;
    for (const auto& g : system.generators) {
      GeneratorFrame f;
      const double r = g.scale;
      Complex p = 0.0;
      f.joints.push_back(p);
      for (const auto& s : g.steps) {
        const Complex e = r * std::polar(1.0, s.angle());
        f.steps.push_back(e);
        p += e * system.types[s.type_index()].length;
        f.joints.push_back(p);
      }
      max_steps = std::max(max_steps, g.steps.size());
      frames_.push_back(std::move(f));
    }
    scratch_.assign(static_cast<std::size_t>(iterations), std::vector<Complex>(max_steps + 1));
  }

  std::vector<std::uint64_t> run(bool initiator_reversed) {
    const double l = system_.types.at(system_.initiator_type).length;
    const Complex origin = 0.0;
    const Complex far{l, 0.0};
    if (initiator_reversed)
      node(system_.initiator_type, far, origin, Complex(-1.0, 0.0), 1, false, iterations_);
    else
      node(system_.initiator_type, origin, far, Complex(1.0, 0.0), 1, true, iterations_);
    return census_;
  }

 private:
  // start/end are the world positions of the segment's intrinsic endpoints;
  // z maps the intrinsic frame (length l_type along +x) into the world.
  void node(std::size_t type, Complex start, Complex end, Complex z, int h, bool forward,
            std::uint64_t depth) {
    if (depth == 0) {
      ++census_[type];
      PlacedSegment seg;
      seg.type_index = type;
      seg.start = to_vec(forward ? start : end);
      seg.end = to_vec(forward ? end : start);
      seg.angle = canonical_angle(std::arg(z) + (forward ? 0.0 : std::numbers::pi));
      seg.length = std::abs(z) * system_.types[type].length;
      seg.handedness = h;
      seg.intrinsic_reversed = !forward;
      sink_(static_cast<const PlacedSegment&>(seg));
      return;
    }
    const GeneratorFrame& f = frames_[type];
    const auto& steps = system_.generators[type].steps;
    const std::size_t k = steps.size();
    std::vector<Complex>& joints = scratch_[static_cast<std::size_t>(depth - 1)];
    joints[0] = start;
    for (std::size_t m = 1; m < k; ++m) joints[m] = start + z * hand(f.joints[m], h);
    joints[k] = end;

    for (std::size_t idx = 0; idx < k; ++idx) {
      const std::size_t m = forward ? idx : k - 1 - idx;
      const GeneratorStep& s = steps[m];
      const int child_h = s.mirrored() ? -h : h;
      const Complex e = z * hand(f.steps[m], h);
      if (s.reversed())
        node(s.type_index(), joints[m + 1], joints[m], -e, child_h, !forward, depth - 1);
      else
        node(s.type_index(), joints[m], joints[m + 1], e, child_h, forward, depth - 1);
    }
  }

  const FractalSystem& system_;
  std::uint64_t iterations_;
  Sink& sink_;
  std::vector<std::uint64_t> census_;
  std::vector<GeneratorFrame> frames_;
  std::vector<std::vector<Complex>> scratch_;
};

}  // namespace detail

/// Depth-first rewriting of the initiator, feeding every leaf segment to
/// `sink` in traversal order. The initiator runs from (0,0) to (l_init, 0).
template <typename Sink>
CensusVector expand(const FractalSystem& system, std::uint64_t iterations, Sink&& sink,
                    const ExpandOptions& options = {}) {
  if (system.initiator_type >= system.size())
    throw Error(ErrorCode::structural, "initiator references an unknown segment type");
  for (const auto& g : system.generators)
    if (!(g.scale > 0.0 && g.scale < 1.0))
      throw Error(ErrorCode::structural, "system has not been validated (missing scaling factors)");
  const BigInt total = segment_census(system, iterations).total();
  if (total > options.max_segments)
    throw Error(ErrorCode::resource_limit, "iteration " + std::to_string(iterations) + " produces " +
                                               total.str() + " segments, above the cap of " +
                                               std::to_string(options.max_segments));
  detail::Expander<std::remove_reference_t<Sink>> expander(system, iterations, sink);
  const auto counts = expander.run(options.initiator_reversed);
  CensusVector out;
  for (auto c : counts) out.counts.emplace_back(c);
  return out;
}

inline Polyline polyline(const FractalSystem& system, std::uint64_t iterations,
                         const ExpandOptions& options = {}) {
  Polyline out;
  expand(
      system, iterations,
      [&](const PlacedSegment& s) {
        if (out.vertices.empty()) out.vertices.push_back(s.start);
        out.vertices.push_back(s.end);
        out.segment_types.push_back(s.type_index);
      },
      options);
  return out;
}

}  // namespace fractool

#endif  // FRACTOOL_CURVE_HPP
