#ifndef FRACTOOL_EXPR_HPP
#define FRACTOOL_EXPR_HPP

// Arithmetic expressions for lengths and angles:
//
//   expr    = term { ("+" | "-") term }
//   term    = unary { ("*" | "/") unary }
//   unary   = "-" unary | power
//   power   = primary [ "^" unary ]          (right-associative, binds tighter than unary minus)
//   primary = NUMBER | "pi" | "phi" | FUNC "(" expr ")" | "(" expr ")"
//   FUNC    = "sqrt" | "sin" | "cos"         (radians)

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fractool {

struct SourceSpan {
  int line = 1;
  int column = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class ParseErrorCode {
  lexical,
  syntax,
  division_by_zero,
  domain,
  non_finite,
  missing_header,
  unknown_segment,
  duplicate_segment,
  duplicate_generator,
  missing_generator,
  missing_initiator,
  duplicate_initiator,
  unterminated_generator,
  empty_generator,
  non_positive_length,
  scale_mismatch,
  invalid_system,
};

inline std::string_view to_string(ParseErrorCode code) {
  switch (code) {
    case ParseErrorCode::lexical: return "lexical";
    case ParseErrorCode::syntax: return "syntax";
    case ParseErrorCode::division_by_zero: return "division-by-zero";
    case ParseErrorCode::domain: return "domain";
    case ParseErrorCode::non_finite: return "non-finite";
    case ParseErrorCode::missing_header: return "missing-header";
    case ParseErrorCode::unknown_segment: return "unknown-segment";
    case ParseErrorCode::duplicate_segment: return "duplicate-segment";
    case ParseErrorCode::duplicate_generator: return "duplicate-generator";
    case ParseErrorCode::missing_generator: return "missing-generator";
    case ParseErrorCode::missing_initiator: return "missing-initiator";
    case ParseErrorCode::duplicate_initiator: return "duplicate-initiator";
    case ParseErrorCode::unterminated_generator: return "unterminated-generator";
    case ParseErrorCode::empty_generator: return "empty-generator";
    case ParseErrorCode::non_positive_length: return "non-positive-length";
    case ParseErrorCode::scale_mismatch: return "scale-mismatch";
    case ParseErrorCode::invalid_system: return "invalid-system";
  }
  return "unknown";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceSpan span, ParseErrorCode code, const std::string& message)
      : std::runtime_error(message.empty() ? std::string(to_string(code)) : message),
        span_(span),
        code_(code) {}

  SourceSpan span() const noexcept { return span_; }
  ParseErrorCode code() const noexcept { return code_; }

 private:
  SourceSpan span_;
  ParseErrorCode code_;
};

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view text, SourceSpan origin) : text_(text), origin_(origin) {}

  double parse() {
    skip_space();
    if (pos_ >= text_.size()) fail(ParseErrorCode::syntax, "expected an expression");
    double v = expr();
    skip_space();
    if (pos_ < text_.size()) fail(ParseErrorCode::syntax, "unexpected '" + std::string(1, text_[pos_]) + "'");
    if (!std::isfinite(v)) fail_at(0, ParseErrorCode::non_finite, "expression does not evaluate to a finite number");
    return v;
  }

 private:
  [[noreturn]] void fail_at(std::size_t at, ParseErrorCode code, const std::string& msg) const {
    throw ParseError({origin_.line, origin_.column + static_cast<int>(at)}, code, msg);
  }
  [[noreturn]] void fail(ParseErrorCode code, const std::string& msg) const { fail_at(pos_, code, msg); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (accept('+')) v += term();
      else if (accept('-')) v -= term();
      else return v;
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (accept('*')) {
        v *= unary();
      } else {
        skip_space();
        std::size_t at = pos_;
        if (!accept('/')) return v;
        double d = unary();
        if (d == 0.0) fail_at(at, ParseErrorCode::division_by_zero, "division by zero");
        v /= d;
      }
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    return power();
  }

  double power() {
    double base = primary();
    skip_space();
    std::size_t at = pos_;
    if (accept('^')) {
      double exponent = unary();
      double v = std::pow(base, exponent);
      if (std::isnan(v)) fail_at(at, ParseErrorCode::domain, "power is undefined for these operands");
      return v;
    }
    return base;
  }

  double primary() {
    skip_space();
    if (pos_ >= text_.size()) fail(ParseErrorCode::syntax, "unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      double v = expr();
      if (!accept(')')) fail(ParseErrorCode::syntax, "expected ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view id = text_.substr(start, pos_ - start);
      if (id == "pi") return std::numbers::pi;
      if (id == "phi") return std::numbers::phi;
      if (id == "sqrt" || id == "sin" || id == "cos") {
        if (!accept('(')) fail(ParseErrorCode::syntax, "expected '(' after " + std::string(id));
        double arg = expr();
        if (!accept(')')) fail(ParseErrorCode::syntax, "expected ')'");
        if (id == "sqrt") {
          if (arg < 0.0) fail_at(start, ParseErrorCode::domain, "sqrt of a negative number");
          return std::sqrt(arg);
        }
        return id == "sin" ? std::sin(arg) : std::cos(arg);
      }
      fail_at(start, ParseErrorCode::syntax, "unknown identifier '" + std::string(id) + "'");
    }
    fail(ParseErrorCode::lexical, "unexpected character '" + std::string(1, c) + "'");
  }

  double number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) fail_at(start, ParseErrorCode::lexical, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail_at(mark, ParseErrorCode::lexical, "malformed exponent");
    }
    double v = 0.0;
    const char* first = text_.data() + start;
    auto [ptr, ec] = std::from_chars(first, text_.data() + pos_, v);
    if (ec != std::errc{} || ptr != text_.data() + pos_)
      fail_at(start, ParseErrorCode::lexical, "number out of range");
    return v;
  }

  std::string_view text_;
  SourceSpan origin_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Evaluates an arithmetic expression. `origin` is the span of the first
/// character, used to position errors inside a larger document.
inline double eval_expr(std::string_view text, SourceSpan origin = {}) {
  return detail::ExprParser(text, origin).parse();
}

}  // namespace fractool

#endif  // FRACTOOL_EXPR_HPP
