#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace evoarch {

enum class Datatype { kInteger, kDecimal, kBoolean, kString, kDateTime, kUriRef };

std::string_view datatype_name(Datatype dt);
// Throws kValueSyntaxError for an unknown tag.
Datatype parse_datatype(std::string_view name);
std::optional<Datatype> try_parse_datatype(std::string_view name);

// Normalized lexical form of a literal:
//   integer   "+007" -> "7", "-0" -> "0"
//   decimal   "2.50" -> "2.5", "3.0" -> "3", ".5" -> "0.5"
//   boolean   "1"/"TRUE" -> "true"
//   datetime  any ISO-8601 offset -> UTC with trailing "Z"
//   string    unchanged
//   uri-ref   unchanged, must be non-empty with no whitespace
// Throws kValueSyntaxError when the lexical form does not parse.
std::string canonicalize_value(std::string_view lexical, Datatype dt);

using Timestamp = std::chrono::sys_seconds;

// ISO-8601 date-time with optional offset (no offset means UTC). Fractional
// seconds are truncated. Throws kValueSyntaxError.
Timestamp parse_timestamp(std::string_view text);
// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);

// Numeric-aware comparison of canonical lexical forms, used for export order.
int compare_canonical(std::string_view a, std::string_view b, Datatype dt);

}  // namespace evoarch
