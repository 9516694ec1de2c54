#ifndef FRACTOOL_PARSER_HPP
#define FRACTOOL_PARSER_HPP

// Line-oriented reader and writer for .fcs fractal curve system documents.
//
//   document  = header { segment } { generator } initiator
//   header    = "system" NAME [ "angle_unit" ("degrees" | "radians") ]
//               [ "angle_unit" ("degrees" | "radians") ]      (own line)
//   segment   = "segment" NAME "length" EXPR
//   generator = "generator" NAME [ "scale" EXPR ] { step } "end"
//   step      = "step" NAME "angle" EXPR [ "reversed" ] [ "mirrored" ]
//   initiator = "initiator" NAME
//
// "#" starts a comment that runs to the end of the line. The optional scale
// clause is checked against the scaling factor derived from the chain.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fractool/expr.hpp"
#include "fractool/model.hpp"

namespace fractool {

enum class AngleUnit { degrees, radians };

/// Source positions of every construct, indexed like the system's vectors.
struct SpanTable {
  SourceSpan header;
  SourceSpan initiator;
  SourceSpan document_end;
  std::vector<SourceSpan> segments;
  std::vector<SourceSpan> generators;               // by segment index
  std::vector<std::vector<SourceSpan>> steps;       // by segment index, then step

  SourceSpan locate(const Location& where) const {
    if (where.initiator) return initiator;
    if (where.generator && *where.generator < generators.size()) {
      const std::size_t g = *where.generator;
      if (where.step && *where.step < steps[g].size()) return steps[g][*where.step];
      return generators[g];
    }
    if (where.type && *where.type < segments.size()) return segments[*where.type];
    return header;
  }
};

/// Result of the syntactic pass. The system is not validated yet and its
/// scales are zero.
struct ParsedDocument {
  FractalSystem system;
  AngleUnit unit = AngleUnit::degrees;
  SpanTable spans;
  std::vector<std::optional<double>> declared_scales;  // by segment index
};

struct Diagnostic {
  SourceSpan span;
  Severity severity = Severity::error;
  std::string code;
  std::string message;
};

namespace detail {

struct Token {
  std::string_view text;
  std::size_t offset = 0;  // 0-based byte offset in the line
};

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

class DocumentReader {
 public:
  explicit DocumentReader(std::string_view text) : text_(text) {}

  ParsedDocument read() {
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text_.size()) {
      std::size_t eol = text_.find('\n', pos);
      if (eol == std::string_view::npos) eol = text_.size();
      std::string_view line = text_.substr(pos, eol - pos);
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      const std::size_t hash = line.find('#');
      if (hash != std::string_view::npos) line = line.substr(0, hash);
      line_ = line;
      line_no_ = line_no;
      tokens_ = tokenize(line);
      if (!tokens_.empty()) {
        last_content_line_ = line_no;
        dispatch();
      }
      if (eol == text_.size()) break;
      pos = eol + 1;
    }
    finish();
    return std::move(doc_);
  }

 private:
  enum class Stage { start, header, segments, generators, in_generator, done };

  static std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      out.push_back({line.substr(i, j - i), i});
      i = j;
    }
    return out;
  }

  SourceSpan span_at(std::size_t offset) const {
    return {line_no_, static_cast<int>(offset) + 1};
  }
  SourceSpan span_of(std::size_t token) const {
    return span_at(token < tokens_.size() ? tokens_[token].offset : line_.size());
  }

  [[noreturn]] void fail(std::size_t token, ParseErrorCode code, const std::string& msg) const {
    throw ParseError(span_of(token), code, msg);
  }

  std::string_view keyword() const { return tokens_[0].text; }

  void expect_count(std::size_t n, const char* usage) const {
    if (tokens_.size() < n) fail(tokens_.size(), ParseErrorCode::syntax, std::string("expected ") + usage);
    if (tokens_.size() > n) fail(n, ParseErrorCode::syntax, "unexpected '" + std::string(tokens_[n].text) + "'");
  }

  std::string name_at(std::size_t token) const {
    if (token >= tokens_.size()) fail(token, ParseErrorCode::syntax, "expected a name");
    if (!is_identifier(tokens_[token].text))
      fail(token, ParseErrorCode::syntax, "'" + std::string(tokens_[token].text) + "' is not a valid name");
    return std::string(tokens_[token].text);
  }

  void expect_word(std::size_t token, std::string_view word) const {
    if (token >= tokens_.size() || tokens_[token].text != word)
      fail(token, ParseErrorCode::syntax, "expected '" + std::string(word) + "'");
  }

  /// Evaluates the text from `first` up to token `last` (exclusive).
  double expression(std::size_t first, std::size_t last) const {
    if (first >= last) fail(first, ParseErrorCode::syntax, "expected an expression");
    const std::size_t begin = tokens_[first].offset;
    const std::size_t end = tokens_[last - 1].offset + tokens_[last - 1].text.size();
    return eval_expr(line_.substr(begin, end - begin), span_at(begin));
  }

  std::size_t lookup_segment(std::size_t token) const {
    const std::string name = name_at(token);
    auto it = segment_index_.find(name);
    if (it == segment_index_.end())
      fail(token, ParseErrorCode::unknown_segment, "unknown segment '" + name + "'");
    return it->second;
  }

  void set_unit(std::size_t token) {
    if (token >= tokens_.size()) fail(token, ParseErrorCode::syntax, "expected 'degrees' or 'radians'");
    const auto u = tokens_[token].text;
    if (u == "degrees") doc_.unit = AngleUnit::degrees;
    else if (u == "radians") doc_.unit = AngleUnit::radians;
    else fail(token, ParseErrorCode::syntax, "expected 'degrees' or 'radians'");
    unit_set_ = true;
  }

  void dispatch() {
    const auto kw = keyword();
    if (stage_ == Stage::start) {
      if (kw != "system") fail(0, ParseErrorCode::missing_header, "document must start with 'system NAME'");
      doc_.system.name = name_at(1);
      doc_.spans.header = span_of(0);
      if (tokens_.size() > 2) {
        expect_word(2, "angle_unit");
        expect_count(4, "angle unit");
        set_unit(3);
      }
      stage_ = Stage::header;
      return;
    }
    if (stage_ == Stage::in_generator) {
      if (kw == "step") return step_line();
      if (kw == "end") {
        expect_count(1, "'end'");
        if (doc_.system.generators.back().steps.empty())
          throw ParseError(generator_span_, ParseErrorCode::empty_generator, "generator has no steps");
        stage_ = Stage::generators;
        return;
      }
      fail(0, ParseErrorCode::unterminated_generator,
           "expected 'step' or 'end' inside generator, found '" + std::string(kw) + "'");
    }
    if (stage_ == Stage::done)
      fail(0, ParseErrorCode::syntax, "nothing may follow the initiator");

    if (kw == "angle_unit") {
      if (stage_ != Stage::header || unit_set_)
        fail(0, ParseErrorCode::syntax, "angle_unit must directly follow the system line");
      expect_count(2, "angle unit");
      set_unit(1);
      return;
    }
    if (kw == "segment") {
      if (stage_ == Stage::generators) fail(0, ParseErrorCode::syntax, "segments must be declared before generators");
      stage_ = Stage::segments;
      return segment_line();
    }
    if (kw == "generator") {
      if (doc_.system.types.empty()) fail(0, ParseErrorCode::syntax, "generator before any segment");
      stage_ = Stage::generators;
      return generator_line();
    }
    if (kw == "initiator") {
      expect_count(2, "initiator NAME");
      doc_.system.initiator_type = lookup_segment(1);
      doc_.spans.initiator = span_of(0);
      stage_ = Stage::done;
      return;
    }
    if (kw == "step") fail(0, ParseErrorCode::syntax, "'step' outside of a generator block");
    if (kw == "end") fail(0, ParseErrorCode::syntax, "'end' without a generator");
    if (kw == "system") fail(0, ParseErrorCode::syntax, "duplicate system header");
    fail(0, ParseErrorCode::syntax, "unknown keyword '" + std::string(kw) + "'");
  }

  void segment_line() {
    const std::string name = name_at(1);
    expect_word(2, "length");
    const double length = expression(3, tokens_.size());
    if (!(length > 0.0))
      fail(3, ParseErrorCode::non_positive_length, "segment length must be positive");
    if (segment_index_.count(name))
      fail(1, ParseErrorCode::duplicate_segment, "segment '" + name + "' is already declared");
    segment_index_[name] = doc_.system.types.size();
    doc_.system.types.push_back({name, length});
    doc_.spans.segments.push_back(span_of(0));
  }

  void generator_line() {
    const std::size_t target = lookup_segment(1);
    if (std::find(seen_generators_.begin(), seen_generators_.end(), target) != seen_generators_.end())
      fail(1, ParseErrorCode::duplicate_generator,
           "segment '" + doc_.system.types[target].name + "' already has a generator");
    std::optional<double> declared;
    if (tokens_.size() > 2) {
      expect_word(2, "scale");
      declared = expression(3, tokens_.size());
    }
    seen_generators_.push_back(target);
    generator_span_ = span_of(0);
    pending_declared_.push_back({target, declared});
    doc_.system.generators.push_back({target, {}, 0.0});
    pending_step_spans_.emplace_back();
    pending_generator_spans_.push_back(generator_span_);
    stage_ = Stage::in_generator;
  }

  void step_line() {
    const std::size_t type = lookup_segment(1);
    expect_word(2, "angle");
    std::size_t last = tokens_.size();
    bool reversed = false;
    bool mirrored = false;
    while (last > 3) {
      const auto t = tokens_[last - 1].text;
      if (t == "reversed" && !reversed) reversed = true;
      else if (t == "mirrored" && !mirrored) mirrored = true;
      else break;
      --last;
    }
    double angle = expression(3, last);
    if (doc_.unit == AngleUnit::degrees) angle = degrees_to_radians(angle);
    doc_.system.generators.back().steps.emplace_back(type, angle, reversed, mirrored);
    pending_step_spans_.back().push_back(span_of(0));
  }

  void finish() {
    const SourceSpan end_span{std::max(last_content_line_, 1), 1};
    doc_.spans.document_end = end_span;
    if (stage_ == Stage::start)
      throw ParseError(end_span, ParseErrorCode::missing_header, "document is empty");
    if (stage_ == Stage::in_generator)
      throw ParseError(generator_span_, ParseErrorCode::unterminated_generator,
                       "generator is missing its 'end'");
    if (doc_.system.types.empty())
      throw ParseError(end_span, ParseErrorCode::syntax, "no segments declared");
    for (std::size_t i = 0; i < doc_.system.types.size(); ++i)
      if (std::find(seen_generators_.begin(), seen_generators_.end(), i) == seen_generators_.end())
        throw ParseError(doc_.spans.segments[i], ParseErrorCode::missing_generator,
                         "segment '" + doc_.system.types[i].name + "' has no generator");
    if (stage_ != Stage::done)
      throw ParseError(end_span, ParseErrorCode::missing_initiator, "document has no 'initiator' line");

    // Store generators at their segment's index.
    const std::size_t n = doc_.system.types.size();
    std::vector<Generator> ordered(n);
    doc_.spans.generators.assign(n, {});
    doc_.spans.steps.assign(n, {});
    doc_.declared_scales.assign(n, std::nullopt);
    for (std::size_t k = 0; k < doc_.system.generators.size(); ++k) {
      const std::size_t t = doc_.system.generators[k].target_type;
      ordered[t] = std::move(doc_.system.generators[k]);
      doc_.spans.generators[t] = pending_generator_spans_[k];
      doc_.spans.steps[t] = std::move(pending_step_spans_[k]);
      doc_.declared_scales[t] = pending_declared_[k].value;
    }
    doc_.system.generators = std::move(ordered);
  }

  struct Declared {
    std::size_t target;
    std::optional<double> value;
  };

  std::string_view text_;
  std::string_view line_;
  int line_no_ = 0;
  int last_content_line_ = 0;
  std::vector<Token> tokens_;
  Stage stage_ = Stage::start;
  bool unit_set_ = false;
  ParsedDocument doc_;
  std::map<std::string, std::size_t> segment_index_;
  std::vector<std::size_t> seen_generators_;
  SourceSpan generator_span_;
  std::vector<Declared> pending_declared_;
  std::vector<std::vector<SourceSpan>> pending_step_spans_;
  std::vector<SourceSpan> pending_generator_spans_;
};

}  // namespace detail

/// Syntactic and name-resolution pass. Throws ParseError.
inline ParsedDocument parse_document(std::string_view text) {
  return detail::DocumentReader(text).read();
}

/// All problems with a document: the first syntax error, or every
/// validation finding mapped back to source positions.
inline std::vector<Diagnostic> check_document(std::string_view text,
                                              double tolerance = kDefaultClosureTolerance) {
  std::vector<Diagnostic> out;
  ParsedDocument doc;
  try {
    doc = parse_document(text);
  } catch (const ParseError& e) {
    out.push_back({e.span(), Severity::error, std::string(to_string(e.code())), e.what()});
    return out;
  }
  const ValidationReport report = validate_system(doc.system, tolerance);
  for (const auto& f : report.findings)
    out.push_back({doc.spans.locate(f.location), f.severity, f.code,
                   f.location.describe(doc.system) + ": " + f.message});
  if (report.valid) {
    for (std::size_t i = 0; i < doc.declared_scales.size(); ++i) {
      if (!doc.declared_scales[i]) continue;
      const double derived = derive_scale(doc.system.generators[i], doc.system);
      if (std::abs(*doc.declared_scales[i] - derived) > kDefaultClosureTolerance) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "declared scale %.12g differs from derived %.12g",
                      *doc.declared_scales[i], derived);
        out.push_back({doc.spans.generators[i], Severity::error, "scale-mismatch", buf});
      }
    }
  }
  return out;
}

inline ParseErrorCode parse_code_for_finding(const std::string& code) {
  if (code == "scale-mismatch") return ParseErrorCode::scale_mismatch;
  if (code == "non-positive-length") return ParseErrorCode::non_positive_length;
  if (code == "empty-generator") return ParseErrorCode::empty_generator;
  return ParseErrorCode::invalid_system;
}

/// Parses and validates a document; the returned system has derived scales.
inline FractalSystem parse_system(std::string_view text,
                                  double tolerance = kDefaultClosureTolerance) {
  ParsedDocument doc = parse_document(text);
  const ValidationReport report = validate_system(doc.system, tolerance);
  if (const Finding* f = report.first_error())
    throw ParseError(doc.spans.locate(f->location), parse_code_for_finding(f->code),
                     f->code + ": " + f->location.describe(doc.system) + ": " + f->message);
  derive_scales(doc.system);
  for (std::size_t i = 0; i < doc.declared_scales.size(); ++i) {
    if (doc.declared_scales[i] &&
        std::abs(*doc.declared_scales[i] - doc.system.generators[i].scale) > kDefaultClosureTolerance)
      throw ParseError(doc.spans.generators[i], ParseErrorCode::scale_mismatch,
                       "declared scale for '" + doc.system.types[i].name +
                           "' does not match the chain geometry");
  }
  return doc.system;
}

namespace detail {

inline std::string shortest(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

/// Degrees with at most 12 significant digits when that reproduces the
/// radian value to 1e-13; otherwise the shortest exact form.
inline std::string format_degrees(double radians) {
  const double deg = radians_to_degrees(radians);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", deg);
  double back = 0.0;
  std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
  if (std::abs(canonical_angle(degrees_to_radians(back)) - radians) <= 1e-13) {
    if (std::string_view(buf) == "-0") return "0";
    return buf;
  }
  return shortest(deg);
}

}  // namespace detail

/// Canonical document text: header, segments, generators, initiator.
inline std::string serialize_system(const FractalSystem& system) {
  std::string out;
  out += "system " + system.name + "\n";
  out += "angle_unit degrees\n";
  for (const auto& t : system.types)
    out += "segment " + t.name + " length " + detail::shortest(t.length) + "\n";
  for (const auto& g : system.generators) {
    out += "generator " + system.types.at(g.target_type).name + "\n";
    for (const auto& s : g.steps) {
      out += "  step " + system.types.at(s.type_index()).name + " angle " +
             detail::format_degrees(s.angle());
      if (s.reversed()) out += " reversed";
      if (s.mirrored()) out += " mirrored";
      out += "\n";
    }
    out += "end\n";
  }
  out += "initiator " + system.types.at(system.initiator_type).name + "\n";
  return out;
}

}  // namespace fractool

#endif  // FRACTOOL_PARSER_HPP
