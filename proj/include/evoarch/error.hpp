#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace evoarch {

// Stable error codes. The numeric value is printed by the CLI as E<nnn>, so
// never renumber an existing entry.
enum class ErrorCode : int {
  kInvalidIdentifierComponent = 1,
  kValueSyntaxError = 2,
  kParseError = 3,
  kUnsupportedConstruct = 4,
  kConfigMismatch = 5,
  kDuplicateKey = 6,
  kVersionNotFound = 7,
  kAlreadyInitialized = 8,
  kDatasetExists = 9,
  kDatasetNotFound = 10,
  kTemporalOrderViolation = 11,
  kCorruptArchive = 12,
  kNoVersionAtTime = 13,
  kDatasetMismatch = 14,
  kInapplicableDelta = 15,
  kRuleSyntaxError = 16,
  kResourceExists = 17,
  kResourceNotFound = 18,
  kValidationError = 19,
  kVersionOrderError = 20,
  kArchiveLocked = 21,
  kNotAnArchive = 22,
  kIoError = 23,
};

std::string_view error_name(ErrorCode code);

// Every domain failure in the library is reported as an Error. Parse-type
// errors carry the 1-based line number of the offending input line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

  // "E012: CorruptArchive: <message>"
  std::string formatted() const;

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
};

}  // namespace evoarch
