#include "sheetaudit/errors.hpp"

namespace sheetaudit {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kFileNotFound: return "FileNotFound";
    case ErrorKind::kNotAWorkbook: return "NotAWorkbook";
    case ErrorKind::kUnsupportedFeature: return "UnsupportedFeature";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kDomainError: return "DomainError";
    case ErrorKind::kUnknownSheet: return "UnknownSheet";
    case ErrorKind::kUnknownName: return "UnknownName";
    case ErrorKind::kTypeMismatch: return "TypeMismatch";
    case ErrorKind::kLengthError: return "LengthError";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kDivisionByZero: return "DivisionByZero";
    case ErrorKind::kInvalidInput: return "InvalidInput";
    case ErrorKind::kNotAnInteger: return "NotAnInteger";
    case ErrorKind::kOverlapError: return "OverlapError";
    case ErrorKind::kSpecError: return "SpecError";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
      kind_(kind),
      message_(message) {}

}  // namespace sheetaudit
