#pragma once

#include <compare>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evoarch {

enum class IdScheme { kUri, kCompositeKey, kOpaque };
enum class IdScope { kDiachronic, kVersionSpecific };

// A reified identifier. URIs, primary-key tuples and skolemized blank nodes
// all become Identifiers so that every layer compares them the same way.
// Equality and ordering look at (scheme, value) only; scope and functional
// metadata describe the identifier but do not distinguish it.
struct Identifier {
  IdScheme scheme = IdScheme::kUri;
  std::string value;
  IdScope scope = IdScope::kVersionSpecific;
  std::map<std::string, std::string> functional_meta;

  static Identifier uri(std::string value, IdScope scope = IdScope::kVersionSpecific);
  static Identifier opaque(std::string value);

  friend bool operator==(const Identifier& a, const Identifier& b) {
    return a.scheme == b.scheme && a.value == b.value;
  }
  friend std::strong_ordering operator<=>(const Identifier& a, const Identifier& b) {
    if (auto c = a.scheme <=> b.scheme; c != 0) return c;
    return a.value <=> b.value;
  }
};

enum class MintKind { kDiachronicDataset, kVersion, kRecord, kSchemaObject, kResource };

// Deterministic archive URIs:
//   kDiachronicDataset [dataset]                  evoarch:ds/<dataset>
//   kVersion           [dataset, version]         evoarch:ds/<dataset>/v/<version>
//   kRecord            [dataset, key-kind, key]   evoarch:ds/<dataset>/rec/<key>          (key-kind "pk")
//                                                 evoarch:ds/<dataset>/rec/<key-kind>/<key>  (otherwise)
//   kSchemaObject      [dataset, name...]         evoarch:ds/<dataset>/schema/<name>[/<name>]
//   kResource          [name]                     evoarch:res/<name>
// Throws kInvalidIdentifierComponent on an empty component or a wrong
// component count.
Identifier mint_identifier(MintKind kind, std::span<const std::string> components);
Identifier mint_identifier(MintKind kind, std::initializer_list<std::string> components);

// Percent-encodes '/', '%', '|', space, tab, newline (and CR).
std::string encode_component(std::string_view raw);
std::string decode_component(std::string_view encoded);

// Joins key values with '|', escaping '\' and '|' inside values so that the
// joined form is injective.
std::string join_key(std::span<const std::string> values);

// Composite-key identifier for a primary key or dimension tuple. The ordered
// column list is recorded under functional_meta["columns"].
Identifier composite_key(std::span<const std::string> columns,
                         std::span<const std::string> values);

// Lowercase ASCII, every run of non-alphanumerics becomes one '-', no leading
// or trailing '-'.
std::string slugify(std::string_view title);

// Recovers an Identifier from its serialized value: "_:" prefixed values are
// skolemized blank nodes (opaque), everything else is a URI.
Identifier parse_identifier(std::string_view value);

// Identifier of the record holding `subject` in dataset `dataset_slug`.
// Subjects that already are archive record URIs are their own record id.
Identifier record_identifier(std::string_view dataset_slug, const Identifier& subject);

// Sequence label for the n-th version (1-based): v0001, v0002, ...
std::string version_label(std::size_t sequence);

}  // namespace evoarch
