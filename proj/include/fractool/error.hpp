#ifndef FRACTOOL_ERROR_HPP
#define FRACTOOL_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace fractool {

enum class ErrorCode {
  structural,
  degenerate_generator,
  non_contracting_generator,
  non_primitive,
  non_expanding,
  numerical,
  resource_limit,
  geometry,
  io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::structural: return "structural";
    case ErrorCode::degenerate_generator: return "degenerate-generator";
    case ErrorCode::non_contracting_generator: return "non-contracting-generator";
    case ErrorCode::non_primitive: return "non-primitive";
    case ErrorCode::non_expanding: return "non-expanding";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::resource_limit: return "resource-limit";
    case ErrorCode::geometry: return "geometry";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

/// Domain failure raised by the analysis and generation routines.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fractool

#endif  // FRACTOOL_ERROR_HPP
