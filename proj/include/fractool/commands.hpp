#ifndef FRACTOOL_COMMANDS_HPP
#define FRACTOOL_COMMANDS_HPP

// Subcommand bodies for the fractool executable. Each returns the process
// exit status: 0 success, 1 domain/validation/analysis failure, 2 I/O.

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "fractool/curve.hpp"
#include "fractool/dimension.hpp"
#include "fractool/empirics.hpp"
#include "fractool/export.hpp"
#include "fractool/parser.hpp"

namespace fractool::cli {

enum Exit : int { kOk = 0, kFailure = 1, kIoError = 2 };

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

inline std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

inline std::string where(const std::string& path, SourceSpan span) {
  return path + ":" + std::to_string(span.line) + ":" + std::to_string(span.column);
}

/// Loads and validates a system, reporting problems on `io.err`. On failure
/// returns the exit status through `status`.
inline std::optional<FractalSystem> load(const std::string& path, Streams io, int& status,
                                         double tolerance = kDefaultClosureTolerance) {
  const auto text = read_file(path);
  if (!text) {
    io.err << "fractool: cannot read '" << path << "'\n";
    status = kIoError;
    return std::nullopt;
  }
  try {
    return parse_system(*text, tolerance);
  } catch (const ParseError& e) {
    io.err << where(path, e.span()) << ": error: " << to_string(e.code()) << ": " << e.what() << "\n";
  } catch (const Error& e) {
    io.err << path << ": error: " << to_string(e.code()) << ": " << e.what() << "\n";
  }
  status = kFailure;
  return std::nullopt;
}

/// Cap precedence: explicit flag, then FRACTOOL_MAX_SEGMENTS, then the default.
inline std::optional<std::uint64_t> resolve_max_segments(std::optional<std::uint64_t> flag, std::ostream& err) {
  if (flag) return flag;
  if (const char* env = std::getenv("FRACTOOL_MAX_SEGMENTS"); env && *env) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || *end != '\0' || *env == '-') {
      err << "fractool: FRACTOOL_MAX_SEGMENTS must be a non-negative integer\n";
      return std::nullopt;
    }
    return static_cast<std::uint64_t>(v);
  }
  return kDefaultMaxSegments;
}

inline int cmd_validate(const std::string& path, double tolerance, Streams io) {
  const auto text = read_file(path);
  if (!text) {
    io.err << "fractool: cannot read '" << path << "'\n";
    return kIoError;
  }
  const auto diagnostics = check_document(*text, tolerance);
  bool ok = true;
  for (const auto& d : diagnostics) {
    ok = ok && d.severity != Severity::error;
    io.out << where(path, d.span) << ": " << (d.severity == Severity::error ? "error" : "warning") << ": "
           << d.code << ": " << d.message << "\n";
  }
  if (ok) io.out << path << ": valid\n";
  return ok ? kOk : kFailure;
}

inline int cmd_analyze(const std::string& path, bool json, std::uint64_t census_kmax, Streams io) {
  int status = kOk;
  const auto system = load(path, io, status);
  if (!system) return status;
  try {
    const Analysis analysis = analyze_full(*system);
    const AnalysisDocument doc = make_analysis_document(*system, analysis, census_kmax);
    if (json) {
      io.out << to_json(doc).dump(2) << "\n";
      return kOk;
    }
    auto num = [](double v) { return fixed(v, 6); };
    io.out << "system              " << doc.system << "\n";
    io.out << "substitution matrix (rows: produced type, columns: generator)\n";
    for (std::size_t r = 0; r < doc.matrix.size(); ++r) {
      io.out << "  " << std::left << std::setw(8) << doc.types[r];
      for (std::size_t c = 0; c < doc.matrix.size(); ++c) io.out << " " << std::right << std::setw(4) << doc.matrix(r, c);
      io.out << "\n";
    }
    io.out << std::left;
    io.out << "primitive exponent  " << *doc.primitive_exponent << "\n";
    io.out << "lambda_pf           " << num(doc.lambda) << "\n";
    io.out << "  type      length     scale      freq\n";
    for (std::size_t i = 0; i < doc.types.size(); ++i)
      io.out << "  " << std::setw(8) << doc.types[i] << "  " << num(system->types[i].length) << "  "
             << num(doc.scales[i]) << "  " << num(doc.freq[i]) << "\n";
    io.out << "dimension           " << num(doc.dimension) << "\n";
    char res[32];
    std::snprintf(res, sizeof res, "%.6e", doc.residual);
    io.out << "residual            " << res << "\n";
    io.out << "method              " << to_string(doc.method) << "\n";
    for (const auto& w : doc.warnings) io.out << "warning: " << w << "\n";
    if (!doc.census.empty()) {
      io.out << "census\n";
      for (const auto& row : doc.census) {
        io.out << "  k=" << row.k;
        for (const auto& c : row.census.counts) io.out << " " << c.str();
        io.out << "  total " << row.census.total().str() << "\n";
      }
    }
    return kOk;
  } catch (const Error& e) {
    io.err << path << ": error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kFailure;
  }
}

struct RenderRequest {
  std::uint64_t iterations = 0;
  std::string out_path;
  RenderStyle style;
  std::optional<std::uint64_t> max_segments;
  bool csv = false;
};

inline int cmd_render(const std::string& path, const RenderRequest& req, Streams io) {
  int status = kOk;
  const auto system = load(path, io, status);
  if (!system) return status;
  const auto cap = resolve_max_segments(req.max_segments, io.err);
  if (!cap) return kFailure;
  const BigInt total = segment_census(*system, req.iterations).total();
  if (total > *cap) {
    io.err << path << ": error: resource-limit: iteration " << req.iterations << " has " << total.str()
           << " segments, above the cap of " << *cap << "\n";
    return kFailure;
  }
  std::ofstream out(req.out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    io.err << "fractool: cannot write '" << req.out_path << "'\n";
    return kIoError;
  }
  try {
    ExpandOptions options;
    options.max_segments = *cap;
    if (req.csv) stream_csv(out, *system, req.iterations, options);
    else render_svg(out, *system, req.iterations, req.style, options);
  } catch (const Error& e) {
    io.err << path << ": error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kFailure;
  }
  out.flush();
  if (!out) {
    io.err << "fractool: write to '" << req.out_path << "' failed\n";
    return kIoError;
  }
  io.out << "wrote " << req.out_path << " (" << total.str() << " segments)\n";
  return kOk;
}

inline int cmd_freq(const std::string& path, std::uint64_t k_max, Streams io) {
  int status = kOk;
  const auto system = load(path, io, status);
  if (!system) return status;
  try {
    const ConvergenceSeries series = frequency_convergence(*system, k_max);
    io.out << "freq";
    for (double f : series.freq) io.out << " " << fixed(f, 6);
    io.out << "\n";
    io.out << "k\tcensus\tnormalized\tl1_distance\n";
    for (const auto& e : series.entries) {
      io.out << e.k << "\t";
      for (std::size_t i = 0; i < e.census.counts.size(); ++i) io.out << (i ? "," : "") << e.census.counts[i].str();
      io.out << "\t";
      for (std::size_t i = 0; i < e.normalized.size(); ++i) io.out << (i ? "," : "") << fixed(e.normalized[i], 6);
      io.out << "\t" << fixed(e.distance, 6) << "\n";
    }
    return kOk;
  } catch (const Error& e) {
    io.err << path << ": error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kFailure;
  }
}

inline int cmd_boxdim(const std::string& path, std::uint64_t iterations, int scales, Streams io) {
  int status = kOk;
  const auto system = load(path, io, status);
  if (!system) return status;
  try {
    const Polyline line = polyline(*system, iterations);
    const BoxCountFit fit = box_count_dimension(line, scales);
    io.out << "iterations " << iterations << ", " << line.segment_count() << " segments\n";
    io.out << "box_size\tcount\n";
    for (std::size_t i = 0; i < fit.scales.size(); ++i)
      io.out << fixed(fit.scales[i], 6) << "\t" << fit.counts[i] << "\n";
    io.out << "slope      " << fixed(fit.slope, 6) << "\n";
    io.out << "r_squared  " << fixed(fit.r_squared, 6) << "\n";
    if (fit.poor_fit) io.out << "warning: r_squared below 0.98, estimate unreliable\n";
    try {
      io.out << "similarity " << fixed(analyze(*system).dimension, 6) << "\n";
    } catch (const Error& e) {
      io.out << "similarity unavailable (" << e.what() << ")\n";
    }
    return kOk;
  } catch (const Error& e) {
    io.err << path << ": error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace fractool::cli

#endif  // FRACTOOL_COMMANDS_HPP
