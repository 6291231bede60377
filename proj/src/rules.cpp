#include "evoarch/rules.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>

#include "evoarch/error.hpp"
#include "evoarch/facts_format.hpp"

namespace evoarch {

namespace {

struct Token {
  enum class Kind { kWord, kVar, kIri, kString, kPunct, kEnd };
  Kind kind;
  std::string text;
};

class RuleLexer {
 public:
  RuleLexer(std::string_view s, std::size_t line) : s_(s), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kRuleSyntaxError, msg, line_);
  }

  Token next() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ >= s_.size()) return {Token::Kind::kEnd, ""};
    char c = s_[pos_];
    if (c == '?') {
      ++pos_;
      std::string name = word();
      if (name.empty()) fail("empty variable name");
      return {Token::Kind::kVar, name};
    }
    if (c == '<') {
      auto end = s_.find('>', pos_);
      if (end == std::string_view::npos) fail("unterminated IRI");
      std::string iri(s_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return {Token::Kind::kIri, iri};
    }
    if (c == '"') {
      std::string lit;
      ++pos_;
      while (true) {
        if (pos_ >= s_.size()) fail("unterminated literal");
        char d = s_[pos_++];
        if (d == '"') break;
        if (d == '\\' && pos_ < s_.size()) d = s_[pos_++];
        lit += d;
      }
      return {Token::Kind::kString, lit};
    }
    if (s_.substr(pos_, 2) == "!=" || s_.substr(pos_, 2) == "=>") {
      pos_ += 2;
      return {Token::Kind::kPunct, std::string(s_.substr(pos_ - 2, 2))};
    }
    if (c == '(' || c == ')' || c == ',' || c == '&' || c == ':') {
      ++pos_;
      return {Token::Kind::kPunct, std::string(1, c)};
    }
    std::string w = word();
    if (w.empty()) fail(std::string("unexpected character '") + c + "'");
    return {Token::Kind::kWord, w};
  }

 private:
  std::string word() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '-'))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

std::size_t op_arity(ChangeOp op) {
  switch (op) {
    case ChangeOp::kAddAttribute:
    case ChangeOp::kDeleteAttribute: return 3;
    case ChangeOp::kAddRecord:
    case ChangeOp::kDeleteRecord: return 1;
    case ChangeOp::kAddSchemaObject:
    case ChangeOp::kDeleteSchemaObject: return 2;
  }
  return 0;
}

ChangeRule parse_rule_line(std::string_view line, std::size_t line_no) {
  RuleLexer lex(line, line_no);
  auto expect = [&](Token::Kind kind, std::string_view text, const char* what) {
    Token t = lex.next();
    if (t.kind != kind || (!text.empty() && t.text != text)) lex.fail(std::string("expected ") + what);
    return t;
  };

  ChangeRule rule;
  expect(Token::Kind::kWord, "rule", "'rule'");
  rule.name = expect(Token::Kind::kWord, "", "rule name").text;
  expect(Token::Kind::kPunct, ":", "':' after rule name");

  std::set<std::string> bound;
  std::set<std::string> context_capable;
  while (true) {
    Token t = lex.next();
    if (t.kind == Token::Kind::kVar) {
      expect(Token::Kind::kPunct, "!=", "'!='");
      Token rhs = expect(Token::Kind::kVar, "", "variable after '!='");
      rule.distinct.emplace_back(t.text, rhs.text);
    } else if (t.kind == Token::Kind::kWord) {
      auto op = try_parse_change_op(t.text);
      if (!op) lex.fail("unknown change op '" + t.text + "'");
      RuleAtom atom{*op, {}};
      expect(Token::Kind::kPunct, "(", "'('");
      while (true) {
        Token a = lex.next();
        if (a.kind == Token::Kind::kVar) atom.args.push_back({RuleTerm::Kind::kVariable, a.text});
        else if (a.kind == Token::Kind::kIri) atom.args.push_back({RuleTerm::Kind::kIri, a.text});
        else if (a.kind == Token::Kind::kString) atom.args.push_back({RuleTerm::Kind::kLiteral, a.text});
        else lex.fail("expected a term");
        Token sep = lex.next();
        if (sep.kind == Token::Kind::kPunct && sep.text == ")") break;
        if (sep.kind != Token::Kind::kPunct || sep.text != ",") lex.fail("expected ',' or ')'");
      }
      if (atom.args.size() != op_arity(*op)) {
        lex.fail(t.text + " takes " + std::to_string(op_arity(*op)) + " arguments");
      }
      for (std::size_t i = 0; i < atom.args.size(); ++i) {
        if (atom.args[i].kind != RuleTerm::Kind::kVariable) continue;
        bound.insert(atom.args[i].text);
        const bool id_position = i == 0 || (i == 1 && op_arity(*op) == 3);
        if (id_position) context_capable.insert(atom.args[i].text);
      }
      rule.pattern.push_back(std::move(atom));
    } else {
      lex.fail("expected an op template or constraint");
    }
    Token sep = lex.next();
    if (sep.kind == Token::Kind::kPunct && sep.text == "&") continue;
    if (sep.kind == Token::Kind::kPunct && sep.text == "=>") break;
    lex.fail("expected '&' or '=>'");
  }
  if (rule.pattern.empty()) lex.fail("rule needs at least one op template");
  for (const auto& [a, b] : rule.distinct) {
    if (!bound.contains(a) || !bound.contains(b)) lex.fail("constraint uses an unbound variable");
  }

  expect(Token::Kind::kWord, "context", "'context'");
  expect(Token::Kind::kPunct, "(", "'('");
  Token t = lex.next();
  if (!(t.kind == Token::Kind::kPunct && t.text == ")")) {
    while (true) {
      if (t.kind != Token::Kind::kVar) lex.fail("context takes variables");
      if (!context_capable.contains(t.text)) {
        lex.fail("context variable ?" + t.text + " is not bound to a subject or predicate");
      }
      rule.context_vars.push_back(t.text);
      Token sep = lex.next();
      if (sep.kind == Token::Kind::kPunct && sep.text == ")") break;
      if (sep.kind != Token::Kind::kPunct || sep.text != ",") lex.fail("expected ',' or ')'");
      t = lex.next();
    }
  }
  if (lex.next().kind != Token::Kind::kEnd) lex.fail("trailing content after context(...)");
  return rule;
}

// A value bound to a rule variable.
struct Bound {
  enum class Kind { kId, kLiteral, kDatatype, kNone } kind;
  std::string value;
  std::string datatype;  // literals only
  friend bool operator==(const Bound&, const Bound&) = default;
};

Bound bound_object(const ObjectValue& o) {
  if (const auto* lit = std::get_if<Literal>(&o)) {
    return {Bound::Kind::kLiteral, lit->lexical, std::string(datatype_name(lit->datatype))};
  }
  return {Bound::Kind::kId, std::get<Identifier>(o).value, ""};
}

Bound position_value(const LowLevelChange& c, std::size_t i) {
  if (i == 0) return {Bound::Kind::kId, c.subject.value, ""};
  if (const auto* attr = std::get_if<RecordAttribute>(&c.payload)) {
    if (i == 1) return {Bound::Kind::kId, attr->predicate.value, ""};
    return bound_object(attr->object);
  }
  const auto& obj = std::get<SchemaObject>(c.payload);
  if (!obj.range) return {Bound::Kind::kNone, "", ""};
  if (const auto* dt = std::get_if<Datatype>(&*obj.range)) {
    return {Bound::Kind::kDatatype, std::string(datatype_name(*dt)), ""};
  }
  return {Bound::Kind::kId, std::get<Identifier>(*obj.range).value, ""};
}

class RuleMatcher {
 public:
  RuleMatcher(const ChangeRule& rule, const std::vector<LowLevelChange>& changes)
      : rule_(rule), changes_(changes), used_(changes.size(), false) {
    for (std::size_t i = 0; i < changes.size(); ++i) {
      by_op_[changes[i].op].push_back(i);
      by_op_subject_[{changes[i].op, changes[i].subject.value}].push_back(i);
    }
  }

  std::vector<HighLevelChange> run() {
    std::vector<HighLevelChange> out;
    const auto& first = rule_.pattern.front();
    auto it = by_op_.find(first.op);
    if (it == by_op_.end()) return out;
    for (std::size_t idx : it->second) {
      if (used_[idx]) continue;
      std::map<std::string, Bound> bindings;
      std::vector<std::size_t> chosen;
      if (!try_bind(0, idx, bindings, chosen)) continue;
      if (!extend(1, bindings, chosen)) continue;
      HighLevelChange h{rule_.name, {}, {}, std::nullopt};
      for (auto c : chosen) {
        used_[c] = true;
        h.constituents.push_back(changes_[c]);
      }
      for (const auto& v : rule_.context_vars) h.context.push_back(parse_identifier(bindings.at(v).value));
      out.push_back(std::move(h));
    }
    return out;
  }

 private:
  bool extend(std::size_t atom, std::map<std::string, Bound>& bindings, std::vector<std::size_t>& chosen) {
    if (atom == rule_.pattern.size()) return true;
    const auto& a = rule_.pattern[atom];
    const std::vector<std::size_t>* candidates = nullptr;
    std::optional<std::string> subject;
    if (a.args[0].kind == RuleTerm::Kind::kIri) subject = a.args[0].text;
    if (a.args[0].kind == RuleTerm::Kind::kVariable) {
      if (auto b = bindings.find(a.args[0].text); b != bindings.end()) {
        if (b->second.kind != Bound::Kind::kId) return false;
        subject = b->second.value;
      }
    }
    if (subject) {
      auto it = by_op_subject_.find({a.op, *subject});
      if (it == by_op_subject_.end()) return false;
      candidates = &it->second;
    } else {
      auto it = by_op_.find(a.op);
      if (it == by_op_.end()) return false;
      candidates = &it->second;
    }
    for (std::size_t idx : *candidates) {
      if (used_[idx] || std::find(chosen.begin(), chosen.end(), idx) != chosen.end()) continue;
      auto saved = bindings;
      if (try_bind(atom, idx, bindings, chosen) && extend(atom + 1, bindings, chosen)) return true;
      bindings = std::move(saved);
      if (!chosen.empty() && chosen.back() == idx) chosen.pop_back();
    }
    return false;
  }

  bool try_bind(std::size_t atom, std::size_t idx, std::map<std::string, Bound>& bindings,
                std::vector<std::size_t>& chosen) {
    const auto& a = rule_.pattern[atom];
    const auto& change = changes_[idx];
    if (change.op != a.op) return false;
    std::map<std::string, Bound> local = bindings;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      Bound v = position_value(change, i);
      const auto& term = a.args[i];
      switch (term.kind) {
        case RuleTerm::Kind::kIri:
          if (v.kind != Bound::Kind::kId || v.value != term.text) return false;
          break;
        case RuleTerm::Kind::kLiteral:
          if (v.kind != Bound::Kind::kLiteral || v.value != term.text) return false;
          break;
        case RuleTerm::Kind::kVariable: {
          auto [it, inserted] = local.emplace(term.text, v);
          if (!inserted && !(it->second == v)) return false;
          break;
        }
      }
    }
    for (const auto& [x, y] : rule_.distinct) {
      auto ix = local.find(x);
      auto iy = local.find(y);
      if (ix != local.end() && iy != local.end() && ix->second == iy->second) return false;
    }
    bindings = std::move(local);
    chosen.push_back(idx);
    return true;
  }

  const ChangeRule& rule_;
  const std::vector<LowLevelChange>& changes_;
  std::vector<bool> used_;
  std::map<ChangeOp, std::vector<std::size_t>> by_op_;
  std::map<std::pair<ChangeOp, std::string>, std::vector<std::size_t>> by_op_subject_;
};

}  // namespace

std::vector<ChangeRule> parse_rules(std::string_view text) {
  std::vector<ChangeRule> rules;
  std::set<std::string> names;
  auto lines = split(text, '\n');
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    ChangeRule rule = parse_rule_line(line, i + 1);
    if (!names.insert(rule.name).second) {
      throw Error(ErrorCode::kRuleSyntaxError, "duplicate rule name " + rule.name, i + 1);
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

const std::vector<ChangeRule>& builtin_rules() {
  static const std::vector<ChangeRule> rules = parse_rules(
      "rule value-update: delete-attribute(?s,?p,?o1) & add-attribute(?s,?p,?o2) & ?o1 != ?o2 => context(?s,?p)\n"
      "rule record-replaced: delete-record(?s) & add-record(?s) => context(?s)\n"
      "rule property-retyped: delete-schema-object(?s,?r1) & add-schema-object(?s,?r2) & ?r1 != ?r2 => context(?s)\n");
  return rules;
}

ChangeSet derive_high_level(ChangeSet cs, std::span<const ChangeRule> rules) {
  for (const auto& rule : rules) {
    auto found = RuleMatcher(rule, cs.low_level).run();
    for (auto& h : found) cs.high_level.push_back(std::move(h));
  }
  return cs;
}

}  // namespace evoarch
