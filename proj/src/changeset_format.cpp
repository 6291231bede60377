#include "evoarch/changeset_format.hpp"

#include <algorithm>
#include <map>

#include "evoarch/error.hpp"
#include "evoarch/facts_format.hpp"

namespace evoarch {

namespace {

constexpr std::string_view kHighLevelMarker = "==HL==";

}  // namespace

std::vector<std::string> change_lines(const LowLevelChange& c) {
  const std::string op(change_op_name(c.op));
  std::vector<std::string> lines;
  if (const auto* attr = std::get_if<RecordAttribute>(&c.payload)) {
    lines.push_back(op + "\t" + fact_line(Fact{c.subject, *attr}));
  } else if (const auto* rec = std::get_if<Record>(&c.payload)) {
    for (const auto& a : rec->attributes) lines.push_back(op + "\t" + fact_line(Fact{c.subject, a}));
  } else {
    lines.push_back(op + "\t" + schema_object_line(std::get<SchemaObject>(c.payload)));
  }
  return lines;
}

Identifier dataset_of_version(const Identifier& version) {
  auto pos = version.value.rfind("/v/");
  if (pos == std::string::npos) return version;
  return Identifier::uri(version.value.substr(0, pos), IdScope::kDiachronic);
}

std::string serialize_changeset(const ChangeSet& cs) {
  std::string out = cs.from_version.value + "\t" + cs.to_version.value + "\n";
  std::map<LowLevelChange, std::size_t> first_line;
  std::size_t line_no = 1;
  for (const auto& c : cs.low_level) {
    first_line.emplace(c, line_no + 1);
    for (const auto& l : change_lines(c)) {
      out += l;
      out += '\n';
      ++line_no;
    }
  }
  out += kHighLevelMarker;
  out += '\n';
  for (const auto& h : cs.high_level) {
    out += h.name;
    out += '\t';
    for (std::size_t i = 0; i < h.context.size(); ++i) {
      if (i) out += ' ';
      out += h.context[i].value;
    }
    out += '\t';
    for (std::size_t i = 0; i < h.constituents.size(); ++i) {
      auto it = first_line.find(h.constituents[i]);
      if (it == first_line.end()) {
        throw Error(ErrorCode::kValidationError,
                    "high-level change " + h.name + " has a constituent outside the change set");
      }
      if (i) out += ',';
      out += std::to_string(it->second);
    }
    if (h.annotation) {
      out += '\t';
      out += escape_field(*h.annotation);
    }
    out += '\n';
  }
  return out;
}

ChangeSet parse_changeset(std::string_view text) {
  if (text.empty() || text.back() != '\n') throw Error(ErrorCode::kParseError, "missing final newline");
  text.remove_suffix(1);
  auto lines = split(text, '\n');
  auto header = split(lines[0], '\t');
  if (header.size() != 2 || header[0].empty() || header[1].empty()) {
    throw Error(ErrorCode::kParseError, "bad header", 1);
  }
  ChangeSet cs;
  cs.from_version = parse_identifier(header[0]);
  cs.to_version = parse_identifier(header[1]);
  cs.dataset_id = dataset_of_version(cs.from_version);
  std::string slug = "unknown";
  if (cs.dataset_id.value.starts_with("evoarch:ds/")) slug = decode_component(cs.dataset_id.value.substr(11));

  std::map<std::size_t, std::size_t> change_at_line;  // line -> index in low_level
  std::size_t i = 1;
  for (; i < lines.size() && lines[i] != kHighLevelMarker; ++i) {
    const std::size_t line_no = i + 1;
    auto tab = lines[i].find('\t');
    if (tab == std::string_view::npos) throw Error(ErrorCode::kParseError, "missing op", line_no);
    auto op = try_parse_change_op(lines[i].substr(0, tab));
    if (!op) throw Error(ErrorCode::kParseError, "unknown op", line_no);
    std::string_view rest = lines[i].substr(tab + 1);
    try {
      if (*op == ChangeOp::kAddSchemaObject || *op == ChangeOp::kDeleteSchemaObject) {
        std::string body(rest);
        body += '\n';
        SchemaVersion one = parse_schema(body);
        if (one.size() != 1) throw Error(ErrorCode::kParseError, "bad schema object line");
        const SchemaObject& obj = one.objects().begin()->second;
        change_at_line[line_no] = cs.low_level.size();
        cs.low_level.push_back({*op, obj.id, obj});
        continue;
      }
      std::string body(rest);
      body += '\n';
      FactSet facts = parse_facts(body);
      const Fact& f = *facts.begin();
      if (*op == ChangeOp::kAddAttribute || *op == ChangeOp::kDeleteAttribute) {
        change_at_line[line_no] = cs.low_level.size();
        cs.low_level.push_back({*op, f.subject, f.attribute});
        continue;
      }
      if (!cs.low_level.empty() && cs.low_level.back().op == *op && cs.low_level.back().subject == f.subject &&
          std::holds_alternative<Record>(cs.low_level.back().payload)) {
        std::get<Record>(cs.low_level.back().payload).attributes.insert(f.attribute);
      } else {
        change_at_line[line_no] = cs.low_level.size();
        Record rec{record_identifier(slug, f.subject), f.subject, {f.attribute}};
        cs.low_level.push_back({*op, f.subject, std::move(rec)});
      }
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, e.what(), line_no);
    }
  }
  if (i == lines.size()) throw Error(ErrorCode::kParseError, "missing ==HL== section");

  std::vector<LowLevelChange> sorted = cs.low_level;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != cs.low_level) throw Error(ErrorCode::kParseError, "low-level changes not sorted");

  for (++i; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    auto fields = split(lines[i], '\t');
    if (fields.size() != 3 && fields.size() != 4) throw Error(ErrorCode::kParseError, "bad high-level line", line_no);
    HighLevelChange h;
    h.name = std::string(fields[0]);
    if (!fields[1].empty()) {
      for (auto id : split(fields[1], ' ')) h.context.push_back(parse_identifier(id));
    }
    if (!fields[2].empty()) {
      for (auto num : split(fields[2], ',')) {
        std::size_t n = 0;
        for (char c : num) {
          if (c < '0' || c > '9') throw Error(ErrorCode::kParseError, "bad constituent number", line_no);
          n = n * 10 + static_cast<std::size_t>(c - '0');
        }
        auto it = change_at_line.find(n);
        if (it == change_at_line.end()) throw Error(ErrorCode::kParseError, "dangling constituent", line_no);
        h.constituents.push_back(cs.low_level[it->second]);
      }
    }
    if (fields.size() == 4) h.annotation = unescape_field(fields[3]);
    cs.high_level.push_back(std::move(h));
  }
  return cs;
}

}  // namespace evoarch
