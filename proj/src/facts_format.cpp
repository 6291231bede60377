#include "evoarch/facts_format.hpp"

#include <algorithm>

#include "evoarch/error.hpp"

namespace evoarch {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string escape_field(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_field(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] != '\\') {
      out += escaped[i];
      continue;
    }
    if (++i == escaped.size()) throw Error(ErrorCode::kParseError, "dangling escape");
    switch (escaped[i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      default: throw Error(ErrorCode::kParseError, "unknown escape");
    }
  }
  return out;
}

std::string fact_line(const Fact& fact) {
  std::string line = fact.subject.value;
  line += '\t';
  line += fact.attribute.predicate.value;
  if (const auto* lit = std::get_if<Literal>(&fact.attribute.object)) {
    line += "\tlit\t";
    line += escape_field(lit->lexical);
    line += '\t';
    line += datatype_name(lit->datatype);
  } else {
    line += "\tref\t";
    line += escape_field(std::get<Identifier>(fact.attribute.object).value);
    line += "\turi-ref";
  }
  return line;
}

namespace {

std::string join_sorted_lines(std::vector<std::string> lines) {
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

// Splits into lines, requiring a trailing newline and strictly increasing
// line order.
std::vector<std::string_view> checked_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  if (text.empty()) return lines;
  if (text.back() != '\n') throw Error(ErrorCode::kParseError, "missing final newline");
  text.remove_suffix(1);
  lines = split(text, '\n');
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (!(lines[i - 1] < lines[i])) {
      throw Error(ErrorCode::kParseError, "lines not strictly sorted", i + 1);
    }
  }
  return lines;
}

Identifier checked_identifier(std::string_view value, std::size_t line_no) {
  if (value.empty()) throw Error(ErrorCode::kParseError, "empty identifier", line_no);
  for (char c : value) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      throw Error(ErrorCode::kParseError, "whitespace in identifier", line_no);
    }
  }
  return parse_identifier(value);
}

}  // namespace

std::string serialize_facts(const FactSet& facts) {
  std::vector<std::string> lines;
  lines.reserve(facts.size());
  for (const auto& f : facts) lines.push_back(fact_line(f));
  return join_sorted_lines(std::move(lines));
}

FactSet parse_facts(std::string_view text) {
  FactSet facts;
  auto lines = checked_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    auto fields = split(lines[i], '\t');
    if (fields.size() != 5) throw Error(ErrorCode::kParseError, "expected 5 fields", line_no);
    Fact f;
    f.subject = checked_identifier(fields[0], line_no);
    f.attribute.predicate = checked_identifier(fields[1], line_no);
    std::string lexical;
    try {
      lexical = unescape_field(fields[3]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, e.what(), line_no);
    }
    if (fields[2] == "ref") {
      if (fields[4] != "uri-ref") throw Error(ErrorCode::kParseError, "ref must be uri-ref", line_no);
      f.attribute.object = checked_identifier(lexical, line_no);
    } else if (fields[2] == "lit") {
      auto dt = try_parse_datatype(fields[4]);
      if (!dt) throw Error(ErrorCode::kParseError, "unknown datatype", line_no);
      std::string canonical;
      try {
        canonical = canonicalize_value(lexical, *dt);
      } catch (const Error& e) {
        throw Error(ErrorCode::kParseError, e.what(), line_no);
      }
      if (canonical != lexical) {
        throw Error(ErrorCode::kParseError, "non-canonical literal", line_no);
      }
      f.attribute.object = Literal{std::move(lexical), *dt};
    } else {
      throw Error(ErrorCode::kParseError, "unknown object kind", line_no);
    }
    facts.insert(facts.end(), std::move(f));
  }
  return facts;
}

std::string serialize_range(const Range& range) {
  if (const auto* dt = std::get_if<Datatype>(&range)) return "@" + std::string(datatype_name(*dt));
  return std::get<Identifier>(range).value;
}

Range parse_range(std::string_view text) {
  if (text.starts_with('@')) {
    auto dt = try_parse_datatype(text.substr(1));
    if (!dt) throw Error(ErrorCode::kParseError, "unknown datatype range '" + std::string(text) + "'");
    return *dt;
  }
  return parse_identifier(text);
}

std::string schema_object_line(const SchemaObject& o) {
  std::string line = o.id.value;
  line += '\t';
  line += schema_kind_name(o.kind);
  line += '\t';
  line += source_construct_name(o.construct);
  line += '\t';
  line += o.domain_class ? o.domain_class->value : "-";
  line += '\t';
  line += o.range ? serialize_range(*o.range) : "-";
  return line;
}

std::string serialize_schema(const SchemaVersion& schema) {
  std::vector<std::string> lines;
  for (const auto& [_, o] : schema.objects()) lines.push_back(schema_object_line(o));
  return join_sorted_lines(std::move(lines));
}

SchemaVersion parse_schema(std::string_view text) {
  std::vector<SchemaObject> objects;
  auto lines = checked_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    auto fields = split(lines[i], '\t');
    if (fields.size() != 5) throw Error(ErrorCode::kParseError, "expected 5 fields", line_no);
    try {
      SchemaObject o;
      o.id = checked_identifier(fields[0], line_no);
      o.kind = parse_schema_kind(fields[1]);
      o.construct = parse_source_construct(fields[2]);
      if (fields[3] != "-") o.domain_class = checked_identifier(fields[3], line_no);
      if (fields[4] != "-") o.range = parse_range(fields[4]);
      objects.push_back(std::move(o));
    } catch (const Error& e) {
      if (e.line()) throw;
      throw Error(ErrorCode::kParseError, e.what(), line_no);
    }
  }
  try {
    return SchemaVersion(std::move(objects));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

}  // namespace evoarch
