#include "retina/decimal.hpp"

#include <algorithm>
#include <cstdlib>

namespace retina {

std::optional<Decimal> Decimal::parse(std::string_view text) {
  size_t i = 0;
  bool neg = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    neg = text[i] == '-';
    ++i;
  }
  std::string int_part, frac_part;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') int_part += text[i++];
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') frac_part += text[i++];
  }
  if (i != text.size()) return std::nullopt;
  if (int_part.empty() && frac_part.empty()) return std::nullopt;

  std::string digits = int_part + frac_part;
  int exponent = -static_cast<int>(frac_part.size());

  // strip leading zeros
  size_t first = digits.find_first_not_of('0');
  if (first == std::string::npos) {
    Decimal zero;
    return zero;
  }
  digits.erase(0, first);
  // strip trailing zeros into the exponent
  size_t last = digits.find_last_not_of('0');
  exponent += static_cast<int>(digits.size() - 1 - last);
  digits.erase(last + 1);

  Decimal d;
  d.negative_ = neg;
  d.digits_ = std::move(digits);
  d.exponent_ = exponent;
  return d;
}

Decimal Decimal::from_int(long long v) {
  auto d = parse(std::to_string(v));
  return *d;
}

std::string Decimal::str() const {
  if (is_zero()) return "0";
  std::string out;
  if (negative_) out += '-';
  if (exponent_ >= 0) {
    out += digits_;
    out.append(static_cast<size_t>(exponent_), '0');
  } else {
    size_t frac_len = static_cast<size_t>(-exponent_);
    if (frac_len < digits_.size()) {
      out += digits_.substr(0, digits_.size() - frac_len);
      out += '.';
      out += digits_.substr(digits_.size() - frac_len);
    } else {
      out += "0.";
      out.append(frac_len - digits_.size(), '0');
      out += digits_;
    }
  }
  return out;
}

int Decimal::compare(const Decimal& other) const {
  bool az = is_zero(), bz = other.is_zero();
  if (az && bz) return 0;
  if (az) return other.negative_ ? 1 : -1;
  if (bz) return negative_ ? -1 : 1;
  if (negative_ != other.negative_) return negative_ ? -1 : 1;

  int sign = negative_ ? -1 : 1;
  // position of the most significant digit: value in [10^(ms-1), 10^ms)
  long long ms_a = static_cast<long long>(digits_.size()) + exponent_;
  long long ms_b = static_cast<long long>(other.digits_.size()) + other.exponent_;
  if (ms_a != ms_b) return ms_a < ms_b ? -sign : sign;

  size_t n = std::max(digits_.size(), other.digits_.size());
  for (size_t i = 0; i < n; ++i) {
    char ca = i < digits_.size() ? digits_[i] : '0';
    char cb = i < other.digits_.size() ? other.digits_[i] : '0';
    if (ca != cb) return ca < cb ? -sign : sign;
  }
  return 0;
}

bool is_number_token(std::string_view text) {
  return Decimal::parse(text).has_value();
}

}  // namespace retina
