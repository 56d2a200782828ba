#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sheetaudit {

enum class ErrorKind {
  kFileNotFound,
  kNotAWorkbook,
  kUnsupportedFeature,
  kParseError,
  kDomainError,
  kUnknownSheet,
  kUnknownName,
  kTypeMismatch,
  kLengthError,
  kLengthMismatch,
  kDivisionByZero,
  kInvalidInput,
  kNotAnInteger,
  kOverlapError,
  kSpecError,
};

std::string_view error_kind_name(ErrorKind kind);

// The single exception type thrown by the library. what() renders as
// "<Kind>: <message>" so diagnostics stay one line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace sheetaudit
