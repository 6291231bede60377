#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evoarch/delta.hpp"

namespace evoarch {

// Rule language, one rule per line:
//
//   rule value-update: delete-attribute(?s,?p,?o1) & add-attribute(?s,?p,?o2) & ?o1 != ?o2 => context(?s,?p)
//
// Atom arity depends on the op: attribute ops take (subject, predicate,
// object), record ops (subject), schema-object ops (id, range). A term is a
// variable ?name, an IRI constant <...> or a literal constant "..." (matched
// on the lexical form). Context variables must be bound in a subject or
// predicate position. '#' starts a comment line.
struct RuleTerm {
  enum class Kind { kVariable, kIri, kLiteral };
  Kind kind = Kind::kVariable;
  std::string text;
};

struct RuleAtom {
  ChangeOp op = ChangeOp::kAddAttribute;
  std::vector<RuleTerm> args;
};

struct ChangeRule {
  std::string name;
  std::vector<RuleAtom> pattern;
  std::vector<std::pair<std::string, std::string>> distinct;  // ?a != ?b
  std::vector<std::string> context_vars;
};

// Throws kRuleSyntaxError with the offending line number.
std::vector<ChangeRule> parse_rules(std::string_view text);

// value-update, record-replaced, property-retyped.
const std::vector<ChangeRule>& builtin_rules();

// Appends one HighLevelChange per rule instance. Rules run in order; within a
// rule every low-level change joins at most one instance, and instances are
// taken greedily: the first pattern atom walks low_level in sorted order and
// each later atom takes the first compatible unused change.
ChangeSet derive_high_level(ChangeSet cs, std::span<const ChangeRule> rules);

}  // namespace evoarch
