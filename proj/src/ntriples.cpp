#include "evoarch/ntriples.hpp"

#include <algorithm>

#include "evoarch/error.hpp"

namespace evoarch {

namespace {

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no, std::string_view slug)
      : s_(line), line_no_(line_no), slug_(slug) {}

  // Returns false for blank and comment lines.
  bool parse(Triple& out) {
    skip_ws();
    if (at_end() || peek() == '#') return false;
    out.subject = parse_subject();
    skip_ws();
    if (peek() != '<') fail("predicate must be an IRI");
    out.predicate = Identifier::uri(parse_iri());
    skip_ws();
    out.object = parse_object();
    skip_ws();
    if (!at_end() && (peek() == '<' || peek() == '_')) {
      unsupported("graph label (quads are not supported)");
    }
    if (at_end() || peek() != '.') fail("expected '.' at end of triple");
    ++pos_;
    skip_ws();
    if (!at_end() && peek() != '#') fail("trailing content after '.'");
    return true;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kParseError, msg, line_no_);
  }
  [[noreturn]] void unsupported(const std::string& msg) const {
    throw Error(ErrorCode::kUnsupportedConstruct, msg, line_no_);
  }

  unsigned long read_hex(std::size_t digits) {
    if (pos_ + digits > s_.size()) fail("truncated \\u escape");
    unsigned long cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      char c = s_[pos_++];
      int v = (c >= '0' && c <= '9')   ? c - '0'
              : (c >= 'a' && c <= 'f') ? c - 'a' + 10
              : (c >= 'A' && c <= 'F') ? c - 'A' + 10
                                       : -1;
      if (v < 0) fail("bad hex digit in escape");
      cp = cp * 16 + static_cast<unsigned long>(v);
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("invalid code point in escape");
    return cp;
  }

  std::string parse_iri() {
    ++pos_;  // '<'
    std::string iri;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      char c = s_[pos_++];
      if (c == '>') break;
      if (c == '\\') {
        if (at_end()) fail("dangling escape in IRI");
        char e = s_[pos_++];
        if (e == 'u') append_utf8(iri, read_hex(4));
        else if (e == 'U') append_utf8(iri, read_hex(8));
        else fail("invalid escape in IRI");
        continue;
      }
      if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' ||
          c == '|' || c == '^' || c == '`') {
        fail("invalid character in IRI");
      }
      iri += c;
    }
    if (iri.empty() || iri.find(':') == std::string::npos) fail("IRI must be absolute");
    for (char c : iri) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') fail("whitespace in IRI");
    }
    return iri;
  }

  Identifier parse_blank() {
    pos_ += 1;  // '_'
    if (at_end() || peek() != ':') fail("expected ':' after '_'");
    ++pos_;
    std::size_t start = pos_;
    while (!at_end()) {
      char c = peek();
      bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                c == '_' || c == '-' || c == '.' || static_cast<unsigned char>(c) >= 0x80;
      if (!ok) break;
      ++pos_;
    }
    while (pos_ > start && s_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) fail("empty blank node label");
    std::string label(s_.substr(start, pos_ - start));
    if (label.front() == '-' || label.front() == '.') fail("invalid blank node label");
    return Identifier::opaque(slug_.empty() ? "_:" + label : "_:" + std::string(slug_) + "." + label);
  }

  Identifier parse_subject() {
    if (peek() == '<') return Identifier::uri(parse_iri());
    if (peek() == '_') return parse_blank();
    if (peek() == '"') fail("literal in subject position");
    fail("expected subject");
  }

  ObjectValue parse_object() {
    if (at_end()) fail("missing object");
    if (peek() == '<') return Identifier::uri(parse_iri());
    if (peek() == '_') return parse_blank();
    if (peek() != '"') fail("expected object");
    ++pos_;
    std::string lexical;
    while (true) {
      if (at_end()) fail("unterminated literal");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (at_end()) fail("dangling escape in literal");
        char e = s_[pos_++];
        switch (e) {
          case 't': lexical += '\t'; break;
          case 'b': lexical += '\b'; break;
          case 'n': lexical += '\n'; break;
          case 'r': lexical += '\r'; break;
          case 'f': lexical += '\f'; break;
          case '"': lexical += '"'; break;
          case '\'': lexical += '\''; break;
          case '\\': lexical += '\\'; break;
          case 'u': append_utf8(lexical, read_hex(4)); break;
          case 'U': append_utf8(lexical, read_hex(8)); break;
          default: fail("invalid escape in literal");
        }
        continue;
      }
      if (c == '\n' || c == '\r') fail("raw line break in literal");
      lexical += c;
    }
    Datatype dt = Datatype::kString;
    if (!at_end() && peek() == '@') unsupported("language-tagged literal");
    if (!at_end() && peek() == '^') {
      if (pos_ + 1 >= s_.size() || s_[pos_ + 1] != '^') fail("expected '^^'");
      pos_ += 2;
      if (at_end() || peek() != '<') fail("expected datatype IRI");
      std::string dt_iri = parse_iri();
      dt = map_datatype(dt_iri);
    }
    try {
      return Literal::make(lexical, dt);
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), line_no_);
    }
  }

  Datatype map_datatype(const std::string& iri) const {
    if (iri.starts_with(kXsd)) {
      std::string_view local = std::string_view(iri).substr(kXsd.size());
      if (local == "string") return Datatype::kString;
      if (local == "integer") return Datatype::kInteger;
      if (local == "decimal") return Datatype::kDecimal;
      if (local == "boolean") return Datatype::kBoolean;
      if (local == "dateTime") return Datatype::kDateTime;
      if (local == "anyURI") return Datatype::kUriRef;
    }
    unsupported("unsupported datatype <" + iri + ">");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_no_;
  std::string_view slug_;
};

std::string write_identifier(const Identifier& id, std::string_view slug) {
  if (id.scheme == IdScheme::kOpaque && id.value.starts_with("_:")) {
    std::string_view rest = std::string_view(id.value).substr(2);
    if (!slug.empty() && rest.starts_with(slug) && rest.size() > slug.size() &&
        rest[slug.size()] == '.') {
      rest.remove_prefix(slug.size() + 1);
    }
    return "_:" + std::string(rest);
  }
  return "<" + id.value + ">";
}

std::string_view xsd_local(Datatype dt) {
  switch (dt) {
    case Datatype::kInteger: return "integer";
    case Datatype::kDecimal: return "decimal";
    case Datatype::kBoolean: return "boolean";
    case Datatype::kString: return "string";
    case Datatype::kDateTime: return "dateTime";
    case Datatype::kUriRef: return "anyURI";
  }
  return "string";
}

}  // namespace

std::vector<Triple> parse_ntriples(std::string_view text, std::string_view dataset_slug) {
  std::vector<Triple> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    Triple t;
    if (LineParser(line, line_no, dataset_slug).parse(t)) out.push_back(std::move(t));
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

std::string ntriples_line(const Triple& t, std::string_view dataset_slug) {
  std::string line = write_identifier(t.subject, dataset_slug);
  line += ' ';
  line += write_identifier(t.predicate, dataset_slug);
  line += ' ';
  if (const auto* lit = std::get_if<Literal>(&t.object)) {
    line += '"';
    for (char c : lit->lexical) {
      switch (c) {
        case '\\': line += "\\\\"; break;
        case '"': line += "\\\""; break;
        case '\n': line += "\\n"; break;
        case '\r': line += "\\r"; break;
        default: line += c;
      }
    }
    line += '"';
    if (lit->datatype != Datatype::kString) {
      line += "^^<";
      line += kXsd;
      line += xsd_local(lit->datatype);
      line += '>';
    }
  } else {
    line += write_identifier(std::get<Identifier>(t.object), dataset_slug);
  }
  line += " .";
  return line;
}

std::string serialize_ntriples(const std::vector<Triple>& triples, std::string_view dataset_slug) {
  std::vector<std::string> lines;
  lines.reserve(triples.size());
  for (const auto& t : triples) lines.push_back(ntriples_line(t, dataset_slug));
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace evoarch
