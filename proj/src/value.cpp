#include "evoarch/value.hpp"

#include <cctype>
#include <cstdio>

#include "evoarch/error.hpp"

namespace evoarch {

namespace {

[[noreturn]] void syntax_error(std::string_view lexical, Datatype dt) {
  throw Error(ErrorCode::kValueSyntaxError, "'" + std::string(lexical) + "' is not a valid " +
                                                std::string(datatype_name(dt)));
}

bool all_digits(std::string_view s) {
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

std::string strip_leading_zeros(std::string_view digits) {
  std::size_t i = 0;
  while (i + 1 < digits.size() && digits[i] == '0') ++i;
  return std::string(digits.substr(i));
}

std::string canonical_integer(std::string_view lex) {
  std::string_view s = lex;
  bool negative = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  if (s.empty() || !all_digits(s)) syntax_error(lex, Datatype::kInteger);
  std::string digits = strip_leading_zeros(s);
  if (digits == "0") return digits;
  return negative ? "-" + digits : digits;
}

std::string canonical_decimal(std::string_view lex) {
  std::string_view s = lex;
  bool negative = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if ((int_part.empty() && frac_part.empty()) || !all_digits(int_part) || !all_digits(frac_part))
    syntax_error(lex, Datatype::kDecimal);
  std::string whole = int_part.empty() ? "0" : strip_leading_zeros(int_part);
  while (!frac_part.empty() && frac_part.back() == '0') frac_part.remove_suffix(1);
  std::string out = whole;
  if (!frac_part.empty()) out += "." + std::string(frac_part);
  if (negative && out != "0") out = "-" + out;
  return out;
}

std::string canonical_boolean(std::string_view lex) {
  std::string lower;
  for (char c : lex) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "true" || lower == "1") return "true";
  if (lower == "false" || lower == "0") return "false";
  syntax_error(lex, Datatype::kBoolean);
}

struct ParsedDateTime {
  Timestamp seconds;
  std::string fraction;  // digits after '.', trailing zeros removed
};

bool read_fixed(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  auto part = s.substr(pos, len);
  if (!all_digits(part)) return false;
  out = 0;
  for (char c : part) out = out * 10 + (c - '0');
  return true;
}

ParsedDateTime parse_datetime(std::string_view lex) {
  auto fail = [&]() -> ParsedDateTime { syntax_error(lex, Datatype::kDateTime); };
  int year, month, day, hour, minute, second;
  if (!read_fixed(lex, 0, 4, year) || lex.size() < 19 || lex[4] != '-' ||
      !read_fixed(lex, 5, 2, month) || lex[7] != '-' || !read_fixed(lex, 8, 2, day) ||
      lex[10] != 'T' || !read_fixed(lex, 11, 2, hour) || lex[13] != ':' ||
      !read_fixed(lex, 14, 2, minute) || lex[16] != ':' || !read_fixed(lex, 17, 2, second))
    return fail();
  std::size_t pos = 19;
  std::string fraction;
  if (pos < lex.size() && lex[pos] == '.') {
    ++pos;
    std::size_t start = pos;
    while (pos < lex.size() && lex[pos] >= '0' && lex[pos] <= '9') ++pos;
    if (pos == start) return fail();
    fraction = std::string(lex.substr(start, pos - start));
    while (!fraction.empty() && fraction.back() == '0') fraction.pop_back();
  }
  int offset_minutes = 0;
  if (pos < lex.size()) {
    if (lex[pos] == 'Z' && pos + 1 == lex.size()) {
      ++pos;
    } else if ((lex[pos] == '+' || lex[pos] == '-') && lex.size() == pos + 6 &&
               lex[pos + 3] == ':') {
      int oh, om;
      if (!read_fixed(lex, pos + 1, 2, oh) || !read_fixed(lex, pos + 4, 2, om) || om > 59 ||
          oh * 60 + om > 14 * 60)
        return fail();
      offset_minutes = (oh * 60 + om) * (lex[pos] == '-' ? -1 : 1);
      pos += 6;
    } else {
      return fail();
    }
  }
  if (pos != lex.size()) return fail();
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) return fail();
  Timestamp t = sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second} -
                minutes{offset_minutes};
  return {t, fraction};
}

}  // namespace

std::string_view datatype_name(Datatype dt) {
  switch (dt) {
    case Datatype::kInteger: return "integer";
    case Datatype::kDecimal: return "decimal";
    case Datatype::kBoolean: return "boolean";
    case Datatype::kString: return "string";
    case Datatype::kDateTime: return "datetime";
    case Datatype::kUriRef: return "uri-ref";
  }
  return "string";
}

std::optional<Datatype> try_parse_datatype(std::string_view name) {
  for (auto dt : {Datatype::kInteger, Datatype::kDecimal, Datatype::kBoolean, Datatype::kString,
                  Datatype::kDateTime, Datatype::kUriRef}) {
    if (datatype_name(dt) == name) return dt;
  }
  return std::nullopt;
}

Datatype parse_datatype(std::string_view name) {
  if (auto dt = try_parse_datatype(name)) return *dt;
  throw Error(ErrorCode::kValueSyntaxError, "unknown datatype '" + std::string(name) + "'");
}

std::string canonicalize_value(std::string_view lexical, Datatype dt) {
  switch (dt) {
    case Datatype::kInteger: return canonical_integer(lexical);
    case Datatype::kDecimal: return canonical_decimal(lexical);
    case Datatype::kBoolean: return canonical_boolean(lexical);
    case Datatype::kString: return std::string(lexical);
    case Datatype::kDateTime: {
      auto parsed = parse_datetime(lexical);
      std::string out = format_timestamp(parsed.seconds);
      if (!parsed.fraction.empty()) {
        out.pop_back();
        out += "." + parsed.fraction + "Z";
      }
      return out;
    }
    case Datatype::kUriRef: {
      if (lexical.empty()) syntax_error(lexical, dt);
      for (char c : lexical)
        if (std::isspace(static_cast<unsigned char>(c))) syntax_error(lexical, dt);
      return std::string(lexical);
    }
  }
  syntax_error(lexical, dt);
}

Timestamp parse_timestamp(std::string_view text) { return parse_datetime(text).seconds; }

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss hms{t - day_point};
  const int y = static_cast<int>(ymd.year());
  if (y < 0 || y > 9999) {
    throw Error(ErrorCode::kValueSyntaxError, "timestamp year out of range");
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ", y,
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

namespace {

int compare_magnitude(std::string_view a, std::string_view b) {
  auto split = [](std::string_view s) {
    auto dot = s.find('.');
    if (dot == std::string_view::npos) return std::pair{s, std::string_view{}};
    return std::pair{s.substr(0, dot), s.substr(dot + 1)};
  };
  auto [ai, af] = split(a);
  auto [bi, bf] = split(b);
  if (ai.size() != bi.size()) return ai.size() < bi.size() ? -1 : 1;
  if (int c = ai.compare(bi); c != 0) return c < 0 ? -1 : 1;
  if (int c = af.compare(bf); c != 0) return c < 0 ? -1 : 1;
  return 0;
}

}  // namespace

int compare_canonical(std::string_view a, std::string_view b, Datatype dt) {
  if (dt == Datatype::kInteger || dt == Datatype::kDecimal) {
    const bool an = a.starts_with('-');
    const bool bn = b.starts_with('-');
    if (an != bn) return an ? -1 : 1;
    if (an) return -compare_magnitude(a.substr(1), b.substr(1));
    return compare_magnitude(a, b);
  }
  int c = a.compare(b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

}  // namespace evoarch
