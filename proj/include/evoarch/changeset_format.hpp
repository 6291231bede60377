#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "evoarch/delta.hpp"

namespace evoarch {

// Change-set file (.cs):
//
//   <from-version> TAB <to-version>
//   <op> TAB <subject> TAB <predicate> TAB <lit|ref> TAB <lexical> TAB <datatype>
//   ...
//   ==HL==
//   <name> TAB <context ids, space separated> TAB <constituent line numbers, comma separated> [TAB <annotation>]
//
// Record ops span one line per attribute, consecutive and with the same op
// and subject. Schema-object ops use the schema line layout after the op
// (id, kind, construct, domain, range). Constituent line numbers are the
// 1-based file line of the constituent's first line (the header is line 1).
// The .cs lines of one low-level change, without terminators.
std::vector<std::string> change_lines(const LowLevelChange& c);

std::string serialize_changeset(const ChangeSet& cs);

// Throws kParseError.
ChangeSet parse_changeset(std::string_view text);

// evoarch:ds/<slug>/v/<label> -> evoarch:ds/<slug>
Identifier dataset_of_version(const Identifier& version);

}  // namespace evoarch
