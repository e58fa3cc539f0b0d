#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace modgame {

enum class ErrorKind {
  kInvalidArgument,
  kInvalidInterval,
  kResolutionOverflow,
  // Malformed input to a decoder: missing/extra transcripts, wrong lengths.
  kProtocolViolation,
  // An internal guarantee of the protocol failed (e.g. alignment of the finer
  // interval). Never recoverable; indicates a bug.
  kProtocolInvariantViolation,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return "invalid-argument";
    case ErrorKind::kInvalidInterval:
      return "invalid-interval";
    case ErrorKind::kResolutionOverflow:
      return "resolution-overflow";
    case ErrorKind::kProtocolViolation:
      return "protocol-violation";
    case ErrorKind::kProtocolInvariantViolation:
      return "protocol-invariant-violation";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const char* message) {
  if (!condition) fail(kind, message);
}

// Prefer `if (!ok) fail(...)` where building the message is costly.
inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace modgame
