#pragma once

#include <string>
#include <string_view>

#include "evoarch/model.hpp"

namespace evoarch {

// Facts file: one fact per line,
//   subject TAB predicate TAB (lit|ref) TAB lexical TAB datatype
// with lines sorted bytewise and each terminated by '\n'. Refs carry the
// identifier value as lexical and "uri-ref" as datatype. Backslash, tab, CR
// and LF inside a lexical are written as \\ \t \r \n.
std::string fact_line(const Fact& fact);
std::string serialize_facts(const FactSet& facts);
// Strict inverse of serialize_facts: rejects unsorted or duplicate lines,
// non-canonical literals and unknown escapes with kParseError.
FactSet parse_facts(std::string_view text);

// Schema file: one object per line,
//   id TAB (class|property) TAB construct TAB (domain|-) TAB (range|-)
// where a datatype range is written "@<tag>" and a class range as its id.
std::string schema_object_line(const SchemaObject& object);
std::string serialize_schema(const SchemaVersion& schema);
SchemaVersion parse_schema(std::string_view text);

std::string serialize_range(const Range& range);
Range parse_range(std::string_view text);

std::string escape_field(std::string_view raw);
// Throws kParseError on a dangling or unknown escape.
std::string unescape_field(std::string_view escaped);

std::vector<std::string_view> split(std::string_view text, char sep);

}  // namespace evoarch
