#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace metgeo {

enum class ErrorKind {
  InvalidInput,
  NotPositiveDefinite,
  OutOfDomain,
  NotInExpImage,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::NotInExpImage: return "NotInExpImage";
  }
  return "Unknown";
}

/// Exception carrying one of the library's error categories.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const char* what) {
  if (!condition) fail(kind, what);
}

}  // namespace detail
}  // namespace metgeo
