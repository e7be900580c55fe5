#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace retina {

// Exact decimal value: sign * digits * 10^exponent. Supports parsing,
// canonical formatting and comparison; no arithmetic. Used for literal
// values so that answer sets and comparatives are bit-stable (no
// floating point round-off).
class Decimal {
 public:
  Decimal() = default;

  // Accepts [+-]? digits [. digits?] | [+-]? . digits. Returns nullopt on
  // anything else (including empty string and scientific notation).
  static std::optional<Decimal> parse(std::string_view text);

  static Decimal from_int(long long v);

  // Minimal canonical form: no sign for zero, no leading/trailing zeros,
  // no trailing '.', e.g. "1900", "3.14", "-0.5".
  std::string str() const;

  // -1, 0, +1
  int compare(const Decimal& other) const;

  bool operator==(const Decimal& o) const { return compare(o) == 0; }
  bool operator!=(const Decimal& o) const { return compare(o) != 0; }
  bool operator<(const Decimal& o) const { return compare(o) < 0; }
  bool operator<=(const Decimal& o) const { return compare(o) <= 0; }
  bool operator>(const Decimal& o) const { return compare(o) > 0; }
  bool operator>=(const Decimal& o) const { return compare(o) >= 0; }

  bool is_zero() const { return digits_ == "0"; }

 private:
  bool negative_ = false;
  std::string digits_ = "0";  // most significant first, no leading/trailing zeros
  int exponent_ = 0;          // value = digits * 10^exponent
};

// True when the token parses as a decimal number.
bool is_number_token(std::string_view text);

}  // namespace retina
