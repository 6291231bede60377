#include "evoarch/error.hpp"

#include <cstdio>

namespace evoarch {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidIdentifierComponent: return "InvalidIdentifierComponent";
    case ErrorCode::kValueSyntaxError: return "ValueSyntaxError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kVersionNotFound: return "VersionNotFound";
    case ErrorCode::kAlreadyInitialized: return "AlreadyInitialized";
    case ErrorCode::kDatasetExists: return "DatasetExists";
    case ErrorCode::kDatasetNotFound: return "DatasetNotFound";
    case ErrorCode::kTemporalOrderViolation: return "TemporalOrderViolation";
    case ErrorCode::kCorruptArchive: return "CorruptArchive";
    case ErrorCode::kNoVersionAtTime: return "NoVersionAtTime";
    case ErrorCode::kDatasetMismatch: return "DatasetMismatch";
    case ErrorCode::kInapplicableDelta: return "InapplicableDelta";
    case ErrorCode::kRuleSyntaxError: return "RuleSyntaxError";
    case ErrorCode::kResourceExists: return "ResourceExists";
    case ErrorCode::kResourceNotFound: return "ResourceNotFound";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kVersionOrderError: return "VersionOrderError";
    case ErrorCode::kArchiveLocked: return "ArchiveLocked";
    case ErrorCode::kNotAnArchive: return "NotAnArchive";
    case ErrorCode::kIoError: return "IoError";
  }
  return "UnknownError";
}

namespace {

std::string with_line(const std::string& message, std::optional<std::size_t> line) {
  if (!line) return message;
  return "line " + std::to_string(*line) + ": " + message;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(with_line(message, line)), code_(code), line_(line) {}

std::string Error::formatted() const {
  char prefix[8];
  std::snprintf(prefix, sizeof(prefix), "E%03d", static_cast<int>(code_));
  return std::string(prefix) + ": " + std::string(error_name(code_)) + ": " + what();
}

}  // namespace evoarch
