#ifndef FRACTOOL_DIMENSION_HPP
#define FRACTOOL_DIMENSION_HPP

#include <cmath>
#include <string>
#include <vector>

#include "fractool/error.hpp"
#include "fractool/model.hpp"
#include "fractool/spectral.hpp"

namespace fractool {

inline constexpr double kDefaultDimensionTolerance = 1e-12;

/// Inputs of 1 = lambda * sum_i f_i * r_i^D.
struct DimensionProblem {
  double lambda = 0.0;
  std::vector<double> freq;
  std::vector<double> scales;

  void check() const {
    if (freq.size() != scales.size() || freq.empty())
      throw Error(ErrorCode::structural, "frequency and scale vectors must be non-empty and of equal length");
    double sum = 0.0;
    for (double f : freq) {
      if (!(f > 0.0)) throw Error(ErrorCode::structural, "frequencies must be positive");
      sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorCode::structural, "frequencies must sum to 1");
    for (double r : scales)
      if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::non_contracting_generator, "scales must lie in (0, 1)");
    if (!(lambda > 1.0))
      throw Error(ErrorCode::non_expanding, "Perron-Frobenius eigenvalue must exceed 1 (got " +
                                                std::to_string(lambda) + ")");
  }
};

enum class SolveMethod { closed_form, bisection_newton };

inline std::string_view to_string(SolveMethod m) {
  return m == SolveMethod::closed_form ? "closed-form" : "bisection-newton";
}

struct DimensionReport {
  DimensionProblem problem;
  double dimension = 0.0;
  double residual = 0.0;
  int iterations = 0;
  SolveMethod method = SolveMethod::closed_form;
  std::vector<std::string> warnings;
};

/// g(d) = lambda * sum_i f_i * r_i^d.
inline double dimension_residual(const DimensionProblem& problem, double d) {
  double sum = 0.0;
  for (std::size_t i = 0; i < problem.freq.size(); ++i) sum += problem.freq[i] * std::pow(problem.scales[i], d);
  return problem.lambda * sum;
}

inline double dimension_residual_derivative(const DimensionProblem& problem, double d) {
  double sum = 0.0;
  for (std::size_t i = 0; i < problem.freq.size(); ++i)
    sum += problem.freq[i] * std::pow(problem.scales[i], d) * std::log(problem.scales[i]);
  return problem.lambda * sum;
}

struct SolveOptions {
  double tolerance = kDefaultDimensionTolerance;
  // Skip the equal-scales shortcut; used to cross-check the numerical path.
  bool force_numeric = false;
  int max_iterations = 200;
  int max_doublings = 64;
};

namespace detail {

inline DimensionReport finish_report(const DimensionProblem& problem, double d, int iterations,
                                     SolveMethod method) {
  DimensionReport out{problem, d, std::abs(dimension_residual(problem, d) - 1.0), iterations, method, {}};
  if (d > 2.0) out.warnings.push_back("dimension exceeds 2 for a planar curve");
  return out;
}

}  // namespace detail

/// Unique D > 0 with g(D) = 1. g is strictly decreasing from g(0) = lambda > 1
/// towards 0, so a bracket [lo, hi] with g(lo) > 1 > g(hi) always exists.
inline DimensionReport solve_dimension(const DimensionProblem& problem, const SolveOptions& options = {}) {
  problem.check();
  if (!(options.tolerance > 0.0)) throw Error(ErrorCode::numerical, "tolerance must be positive");

  const double r0 = problem.scales.front();
  bool equal = true;
  for (double r : problem.scales) equal = equal && r == r0;
  if (equal && !options.force_numeric) {
    const double d = std::log(problem.lambda) / std::log(1.0 / r0);
    auto report = detail::finish_report(problem, d, 0, SolveMethod::closed_form);
    if (report.residual <= options.tolerance) return report;
    // Rounding in the closed form can miss a very tight tolerance; refine numerically.
  }

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (dimension_residual(problem, hi) >= 1.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > options.max_doublings)
      throw Error(ErrorCode::numerical, "could not bracket the dimension");
  }

  double d = 0.5 * (lo + hi);
  for (int it = 1; it <= options.max_iterations; ++it) {
    const double g = dimension_residual(problem, d) - 1.0;
    if (std::abs(g) <= options.tolerance) return detail::finish_report(problem, d, it, SolveMethod::bisection_newton);
    if (g > 0.0) lo = d;
    else hi = d;
    const double slope = dimension_residual_derivative(problem, d);
    double next = slope != 0.0 ? d - g / slope : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == d) {
      // Bracket collapsed to adjacent doubles; take whichever end is closer.
      const double glo = std::abs(dimension_residual(problem, lo) - 1.0);
      const double ghi = std::abs(dimension_residual(problem, hi) - 1.0);
      d = glo < ghi ? lo : hi;
      break;
    }
    d = next;
  }
  auto report = detail::finish_report(problem, d, options.max_iterations, SolveMethod::bisection_newton);
  if (report.residual <= options.tolerance) return report;
  throw Error(ErrorCode::numerical, "dimension solver did not reach tolerance (residual " +
                                        std::to_string(report.residual) + ")");
}

inline DimensionProblem dimension_problem(const SpectralData& spectral, const FractalSystem& system) {
  return {spectral.lambda_pf, spectral.freq, system.scales()};
}

struct Analysis {
  SpectralData spectral;
  DimensionReport report;
};

/// Substitution matrix, PF data, and D for a validated system.
inline Analysis analyze_full(const FractalSystem& system, const SolveOptions& options = {}) {
  Analysis out;
  out.spectral = spectral_analysis(system);
  out.report = solve_dimension(dimension_problem(out.spectral, system), options);
  return out;
}

inline DimensionReport analyze(const FractalSystem& system, const SolveOptions& options = {}) {
  return analyze_full(system, options).report;
}

}  // namespace fractool

#endif  // FRACTOOL_DIMENSION_HPP
