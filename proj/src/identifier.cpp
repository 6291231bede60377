#include "evoarch/identifier.hpp"

#include <cctype>
#include <cstdio>

#include "evoarch/error.hpp"

namespace evoarch {

Identifier Identifier::uri(std::string value, IdScope scope) {
  return Identifier{IdScheme::kUri, std::move(value), scope, {}};
}

Identifier Identifier::opaque(std::string value) {
  return Identifier{IdScheme::kOpaque, std::move(value), IdScope::kVersionSpecific, {}};
}

std::string encode_component(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '/': out += "%2F"; break;
      case '%': out += "%25"; break;
      case '|': out += "%7C"; break;
      case ' ': out += "%20"; break;
      case '\t': out += "%09"; break;
      case '\n': out += "%0A"; break;
      case '\r': out += "%0D"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

void check_components(std::span<const std::string> components, std::size_t min_count,
                      std::size_t max_count, std::string_view what) {
  if (components.size() < min_count || components.size() > max_count) {
    throw Error(ErrorCode::kInvalidIdentifierComponent,
                std::string(what) + " identifiers take " + std::to_string(min_count) +
                    (min_count == max_count ? "" : "-" + std::to_string(max_count)) +
                    " components, got " + std::to_string(components.size()));
  }
  for (const auto& c : components) {
    if (c.empty()) {
      throw Error(ErrorCode::kInvalidIdentifierComponent,
                  std::string("empty component in ") + std::string(what) + " identifier");
    }
  }
}

}  // namespace

std::string decode_component(std::string_view encoded) {
  std::string out;
  out.reserve(encoded.size());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded[i] == '%' && i + 2 < encoded.size()) {
      int hi = hex_digit(encoded[i + 1]);
      int lo = hex_digit(encoded[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += encoded[i];
  }
  return out;
}

Identifier mint_identifier(MintKind kind, std::span<const std::string> components) {
  switch (kind) {
    case MintKind::kDiachronicDataset:
      check_components(components, 1, 1, "dataset");
      return Identifier::uri("evoarch:ds/" + encode_component(components[0]),
                             IdScope::kDiachronic);
    case MintKind::kVersion:
      check_components(components, 2, 2, "version");
      return Identifier::uri("evoarch:ds/" + encode_component(components[0]) + "/v/" +
                             encode_component(components[1]));
    case MintKind::kRecord: {
      check_components(components, 3, 3, "record");
      std::string v = "evoarch:ds/" + encode_component(components[0]) + "/rec/";
      if (components[1] != "pk") v += encode_component(components[1]) + "/";
      v += encode_component(components[2]);
      return Identifier::uri(std::move(v));
    }
    case MintKind::kSchemaObject: {
      check_components(components, 2, 3, "schema-object");
      std::string v = "evoarch:ds/" + encode_component(components[0]) + "/schema";
      for (std::size_t i = 1; i < components.size(); ++i) v += "/" + encode_component(components[i]);
      return Identifier::uri(std::move(v));
    }
    case MintKind::kResource:
      check_components(components, 1, 1, "resource");
      return Identifier::uri("evoarch:res/" + encode_component(components[0]),
                             IdScope::kDiachronic);
  }
  throw Error(ErrorCode::kInvalidIdentifierComponent, "unknown identifier kind");
}

Identifier mint_identifier(MintKind kind, std::initializer_list<std::string> components) {
  return mint_identifier(kind, std::span<const std::string>(components.begin(), components.size()));
}

std::string join_key(std::span<const std::string> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += '|';
    for (char c : values[i]) {
      if (c == '\\' || c == '|') out += '\\';
      out += c;
    }
  }
  return out;
}

Identifier composite_key(std::span<const std::string> columns,
                         std::span<const std::string> values) {
  Identifier id{IdScheme::kCompositeKey, join_key(values), IdScope::kVersionSpecific, {}};
  id.functional_meta["columns"] = join_key(columns);
  return id;
}

std::string slugify(std::string_view title) {
  std::string out;
  bool pending_hyphen = false;
  for (unsigned char c : title) {
    if (std::isalnum(c) && c < 0x80) {
      if (pending_hyphen && !out.empty()) out += '-';
      pending_hyphen = false;
      out += static_cast<char>(std::tolower(c));
    } else {
      pending_hyphen = true;
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::kInvalidIdentifierComponent,
                "title '" + std::string(title) + "' has no alphanumeric characters");
  }
  return out;
}

Identifier parse_identifier(std::string_view value) {
  if (value.starts_with("_:")) return Identifier::opaque(std::string(value));
  return Identifier::uri(std::string(value));
}

Identifier record_identifier(std::string_view dataset_slug, const Identifier& subject) {
  const std::string prefix = "evoarch:ds/" + encode_component(dataset_slug) + "/rec/";
  if (subject.scheme == IdScheme::kUri && subject.value.starts_with(prefix)) return subject;
  return mint_identifier(MintKind::kRecord, {std::string(dataset_slug), "s", subject.value});
}

std::string version_label(std::size_t sequence) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "v%04zu", sequence);
  return buf;
}

}  // namespace evoarch
