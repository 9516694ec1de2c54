#ifndef FRACTOOL_MODEL_HPP
#define FRACTOOL_MODEL_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fractool/error.hpp"
#include "fractool/geometry.hpp"

namespace fractool {

inline constexpr double kDefaultClosureTolerance = 1e-9;

struct SegmentType {
  std::string name;
  double length = 1.0;

  friend bool operator==(const SegmentType&, const SegmentType&) = default;
};

/// One element of a generator chain. The angle is the direction of travel in
/// the generator's local frame, where the replaced segment runs from (0,0) to
/// (length, 0). It is canonicalized to (-pi, pi] on construction.
class GeneratorStep {
 public:
  GeneratorStep() = default;
  GeneratorStep(std::size_t type_index, double angle, bool reversed = false,
                bool mirrored = false)
      : type_index_(type_index),
        angle_(canonical_angle(angle)),
        reversed_(reversed),
        mirrored_(mirrored) {}

  std::size_t type_index() const noexcept { return type_index_; }
  double angle() const noexcept { return angle_; }
  bool reversed() const noexcept { return reversed_; }
  bool mirrored() const noexcept { return mirrored_; }

  friend bool operator==(const GeneratorStep&, const GeneratorStep&) = default;

 private:
  std::size_t type_index_ = 0;
  double angle_ = 0.0;
  bool reversed_ = false;
  bool mirrored_ = false;
};

struct Generator {
  std::size_t target_type = 0;
  std::vector<GeneratorStep> steps;
  // Derived contraction r_i; zero until derive_scales() has run.
  double scale = 0.0;

  friend bool operator==(const Generator&, const Generator&) = default;
};

struct FractalSystem {
  std::string name;
  std::vector<SegmentType> types;
  std::vector<Generator> generators;
  std::size_t initiator_type = 0;

  std::size_t size() const noexcept { return types.size(); }
  const Generator& generator_for(std::size_t type) const { return generators.at(type); }
  std::vector<double> scales() const {
    std::vector<double> out;
    out.reserve(generators.size());
    for (const auto& g : generators) out.push_back(g.scale);
    return out;
  }

  friend bool operator==(const FractalSystem&, const FractalSystem&) = default;
};

enum class Severity { warning, error };

/// Points at the construct a finding refers to. Absent fields mean "whole
/// system" or "whole generator".
struct Location {
  std::optional<std::size_t> type = std::nullopt;
  std::optional<std::size_t> generator = std::nullopt;
  std::optional<std::size_t> step = std::nullopt;
  bool initiator = false;

  std::string describe(const FractalSystem& system) const {
    auto type_name = [&](std::size_t i) {
      return i < system.types.size() ? system.types[i].name : "#" + std::to_string(i);
    };
    std::ostringstream os;
    if (initiator) {
      os << "initiator";
    } else if (generator) {
      std::size_t target = *generator < system.generators.size()
                               ? system.generators[*generator].target_type
                               : *generator;
      os << "generator " << type_name(target);
      if (step) os << " step " << (*step + 1);
    } else if (type) {
      os << "segment " << type_name(*type);
    } else {
      os << "system";
    }
    return os.str();
  }
};

struct Finding {
  Severity severity = Severity::error;
  std::string code;
  std::string message;
  Location location;
};

struct ValidationReport {
  bool valid = true;
  std::vector<Finding> findings;

  void add(Severity severity, std::string code, std::string message, Location where) {
    if (severity == Severity::error) valid = false;
    findings.push_back({severity, std::move(code), std::move(message), where});
  }

  const Finding* first_error() const {
    for (const auto& f : findings)
      if (f.severity == Severity::error) return &f;
    return nullptr;
  }
};

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report)
      : Error(ErrorCode::structural, summary(report)), report_(std::move(report)) {}

  const ValidationReport& report() const noexcept { return report_; }

 private:
  static std::string summary(const ValidationReport& report) {
    const Finding* f = report.first_error();
    return f ? f->code + ": " + f->message : std::string("invalid system");
  }

  ValidationReport report_;
};

/// Sum of l_j * (cos theta, sin theta) over the chain, before scaling.
inline Vec2 chain_displacement(const Generator& generator, const FractalSystem& system) {
  Vec2 sum;
  for (const auto& step : generator.steps) {
    if (step.type_index() >= system.types.size())
      throw Error(ErrorCode::structural,
                  "step references segment type " + std::to_string(step.type_index()) +
                      " but the system has " + std::to_string(system.types.size()));
    sum = sum + system.types[step.type_index()].length * unit_vector(step.angle());
  }
  return sum;
}

/// Start points of every step plus the chain end, at unit scale.
inline std::vector<Vec2> chain_vertices(const Generator& generator, const FractalSystem& system) {
  std::vector<Vec2> out;
  out.reserve(generator.steps.size() + 1);
  Vec2 p;
  out.push_back(p);
  for (const auto& step : generator.steps) {
    p = p + system.types.at(step.type_index()).length * unit_vector(step.angle());
    out.push_back(p);
  }
  return out;
}

/// Displacements this small relative to the chain's path length count as zero.
inline constexpr double kDegenerateRatio = 1e-12;

inline double chain_path_length(const Generator& generator, const FractalSystem& system) {
  double sum = 0.0;
  for (const auto& step : generator.steps) sum += system.types.at(step.type_index()).length;
  return sum;
}

inline double derive_scale(const Generator& generator, const FractalSystem& system) {
  if (generator.target_type >= system.types.size())
    throw Error(ErrorCode::structural, "generator targets an unknown segment type");
  const double distance = norm(chain_displacement(generator, system));
  const auto& target = system.types[generator.target_type];
  if (!(distance > kDegenerateRatio * chain_path_length(generator, system)) ||
      !std::isfinite(distance))
    throw Error(ErrorCode::degenerate_generator,
                "generator " + target.name + " has a zero-length chain displacement");
  const double r = target.length / distance;
  if (!(r < 1.0))
    throw Error(ErrorCode::non_contracting_generator,
                "generator " + target.name + " has scaling factor " + std::to_string(r) +
                    " (must be < 1)");
  return r;
}

inline ValidationReport validate_system(const FractalSystem& system,
                                        double tolerance = kDefaultClosureTolerance) {
  ValidationReport report;
  const std::size_t n = system.types.size();
  if (n == 0) {
    report.add(Severity::error, "no-segments", "system declares no segment types", {});
    return report;
  }

  std::set<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = system.types[i];
    Location where{.type = i};
    if (t.name.empty()) report.add(Severity::error, "empty-name", "segment type has no name", where);
    if (!names.insert(t.name).second)
      report.add(Severity::error, "duplicate-name", "segment name '" + t.name + "' is used twice",
                 where);
    if (!(t.length > 0.0) || !std::isfinite(t.length))
      report.add(Severity::error, "non-positive-length",
                 "segment " + t.name + " must have a positive finite length", where);
  }

  if (system.initiator_type >= n)
    report.add(Severity::error, "bad-index", "initiator references an unknown segment type",
               {.initiator = true});

  std::vector<int> seen(n, 0);
  for (std::size_t g = 0; g < system.generators.size(); ++g) {
    const auto& gen = system.generators[g];
    if (gen.target_type >= n) {
      report.add(Severity::error, "bad-index", "generator targets an unknown segment type",
                 {.generator = g});
      continue;
    }
    if (++seen[gen.target_type] > 1)
      report.add(Severity::error, "duplicate-generator",
                 "segment " + system.types[gen.target_type].name + " has more than one generator",
                 {.generator = g});
    else if (gen.target_type != g)
      report.add(Severity::error, "generator-order",
                 "generator for " + system.types[gen.target_type].name +
                     " is not stored at its segment's index",
                 {.generator = g});
  }
  for (std::size_t i = 0; i < n; ++i)
    if (seen[i] == 0)
      report.add(Severity::error, "missing-generator",
                 "segment " + system.types[i].name + " has no generator", {.type = i});

  for (std::size_t g = 0; g < system.generators.size(); ++g) {
    const auto& gen = system.generators[g];
    if (gen.target_type >= n) continue;
    if (gen.steps.empty()) {
      report.add(Severity::error, "empty-generator", "generator has no steps", {.generator = g});
      continue;
    }
    bool indices_ok = true;
    for (std::size_t m = 0; m < gen.steps.size(); ++m) {
      const auto& s = gen.steps[m];
      if (s.type_index() >= n) {
        report.add(Severity::error, "bad-index", "step references an unknown segment type",
                   {.generator = g, .step = m});
        indices_ok = false;
      } else if (!std::isfinite(s.angle())) {
        report.add(Severity::error, "bad-angle", "step angle is not finite",
                   {.generator = g, .step = m});
        indices_ok = false;
      }
    }
    if (!indices_ok) continue;

    const double target_length = system.types[gen.target_type].length;
    const Vec2 d = chain_displacement(gen, system);
    const double distance = norm(d);
    if (!(distance > kDegenerateRatio * chain_path_length(gen, system))) {
      report.add(Severity::error, "degenerate-generator",
                 "chain start and end coincide", {.generator = g});
      continue;
    }
    const double r = target_length / distance;
    if (!(r > 0.0 && r < 1.0)) {
      std::ostringstream msg;
      msg << "scaling factor " << r << " is outside (0, 1)";
      report.add(Severity::error, "non-contracting-generator", msg.str(), {.generator = g});
    }
    const Vec2 scaled = r * d;
    const double residual = norm(scaled - Vec2{target_length, 0.0}) / target_length;
    if (residual > tolerance) {
      std::ostringstream msg;
      msg << "scaled chain misses the segment end by " << residual << " (relative, tolerance "
          << tolerance << ")";
      report.add(Severity::error, "closure-error", msg.str(), {.generator = g});
    }
    const double direction = std::atan2(d.y, d.x);
    if (std::abs(direction) > tolerance) {
      std::ostringstream msg;
      msg << "chain displacement points " << radians_to_degrees(direction)
          << " degrees off the baseline";
      report.add(Severity::error, "direction-error", msg.str(), {.generator = g});
    }
    if (gen.scale != 0.0 && std::abs(gen.scale - r) > tolerance)
      report.add(Severity::error, "scale-mismatch", "stored scaling factor disagrees with geometry",
                 {.generator = g});
  }
  return report;
}

/// Fills every Generator::scale from chain geometry.
inline void derive_scales(FractalSystem& system) {
  for (auto& g : system.generators) g.scale = derive_scale(g, system);
}

/// Validates, derives scales, and returns the finished model. Throws
/// ValidationError carrying the full report when the system is rejected.
inline FractalSystem build_system(FractalSystem system,
                                  double tolerance = kDefaultClosureTolerance) {
  for (auto& g : system.generators) g.scale = 0.0;
  ValidationReport report = validate_system(system, tolerance);
  if (!report.valid) throw ValidationError(std::move(report));
  derive_scales(system);
  return system;
}

}  // namespace fractool

#endif  // FRACTOOL_MODEL_HPP
