#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "evoarch/model.hpp"

namespace evoarch {

struct Triple {
  Identifier subject;
  Identifier predicate;
  ObjectValue object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

// Parses the supported N-Triples subset:
//   <iri> <iri> (<iri> | _:label | "lexical" | "lexical"^^<datatype>) .
// plus '#' comments and blank lines. Blank nodes anywhere become opaque
// identifiers "_:<dataset_slug>.<label>" (or "_:<label>" for an empty slug).
// Literals are canonicalized; only the xsd datatypes string, integer,
// decimal, boolean, dateTime and anyURI are accepted.
// Errors: kParseError for malformed lines, kUnsupportedConstruct for
// language tags, quads and other datatypes, kValueSyntaxError for literals
// that do not parse under their datatype. All carry the line number.
std::vector<Triple> parse_ntriples(std::string_view text, std::string_view dataset_slug = "");

// One N-Triples line (without newline). Skolemized blank nodes of
// `dataset_slug` are written back with their original label.
std::string ntriples_line(const Triple& t, std::string_view dataset_slug = "");

// Sorted, newline-terminated lines.
std::string serialize_ntriples(const std::vector<Triple>& triples,
                               std::string_view dataset_slug = "");

}  // namespace evoarch
