#include "platoon/decimal.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

#include "platoon/error.hpp"

namespace platoon {
namespace {

using M = Decimal::Mantissa;

M pow10(int exponent) {
  M r = 1;
  for (int i = 0; i < exponent; ++i) r *= 10;
  return r;
}

[[noreturn]] void overflow(const char* op) {
  throw Error(ErrorCode::Overflow, std::string("decimal overflow in ") + op);
}

M checked_mul(M a, M b, const char* op) {
  M r;
  if (__builtin_mul_overflow(a, b, &r)) overflow(op);
  return r;
}

M checked_add(M a, M b, const char* op) {
  M r;
  if (__builtin_add_overflow(a, b, &r)) overflow(op);
  return r;
}

// Brings both operands to the larger scale.
std::pair<M, M> align(const Decimal& a, const Decimal& b, int& scale) {
  scale = std::max(a.scale(), b.scale());
  return {checked_mul(a.mantissa(), pow10(scale - a.scale()), "align"),
          checked_mul(b.mantissa(), pow10(scale - b.scale()), "align")};
}

}  // namespace

std::string to_string(M value) {
  if (value == 0) return "0";
  bool negative = value < 0;
  std::string digits;
  while (value != 0) {
    int d = static_cast<int>(value % 10);
    digits.push_back(static_cast<char>('0' + (negative ? -d : d)));
    value /= 10;
  }
  if (negative) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

Decimal Decimal::from_parts(M mantissa, int scale) {
  if (scale < 0) {
    mantissa = checked_mul(mantissa, pow10(-scale), "from_parts");
    scale = 0;
  }
  Decimal d;
  d.mantissa_ = mantissa;
  d.scale_ = scale;
  d.normalize();
  if (d.scale_ > kMaxScale) overflow("from_parts");
  return d;
}

void Decimal::normalize() noexcept {
  if (mantissa_ == 0) {
    scale_ = 0;
    return;
  }
  while (scale_ > 0 && mantissa_ % 10 == 0) {
    mantissa_ /= 10;
    --scale_;
  }
}

std::optional<Decimal> Decimal::try_parse(std::string_view text) noexcept {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  if (text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  if (text.empty() || text.front() == '.' || text.back() == '.') return std::nullopt;
  M mantissa = 0;
  int scale = 0;
  bool seen_point = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    seen_digit = true;
    if (__builtin_mul_overflow(mantissa, M{10}, &mantissa) ||
        __builtin_add_overflow(mantissa, M{c - '0'}, &mantissa)) {
      return std::nullopt;
    }
    if (seen_point) ++scale;
  }
  if (!seen_digit) return std::nullopt;
  Decimal d;
  d.mantissa_ = negative ? -mantissa : mantissa;
  d.scale_ = scale;
  d.normalize();
  if (d.scale_ > kMaxScale) return std::nullopt;
  return d;
}

Decimal Decimal::parse(std::string_view text) {
  if (auto d = try_parse(text)) return *d;
  throw Error(ErrorCode::Parse, "not a decimal number: '" + std::string(text) + "'");
}

Decimal Decimal::from_double(double value) {
  if (!std::isfinite(value)) throw Error(ErrorCode::Parse, "non-finite number");
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
  if (ec != std::errc{}) throw Error(ErrorCode::Parse, "number out of range");
  return parse(std::string_view(buf.data(), static_cast<std::size_t>(end - buf.data())));
}

std::string Decimal::str() const {
  std::string digits = to_string(mantissa_ < 0 ? -mantissa_ : mantissa_);
  if (scale_ > 0) {
    if (static_cast<int>(digits.size()) <= scale_) {
      digits.insert(0, static_cast<std::size_t>(scale_ - static_cast<int>(digits.size()) + 1), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(scale_), 1, '.');
  }
  if (mantissa_ < 0) digits.insert(0, 1, '-');
  return digits;
}

double Decimal::to_double() const {
  double v = 0;
  std::string s = str();
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

M Decimal::round_half_even(int places) const {
  if (places >= scale_) return checked_mul(mantissa_, pow10(places - scale_), "round");
  M divisor = pow10(scale_ - places);
  M quotient = mantissa_ / divisor;
  M remainder = mantissa_ % divisor;
  M twice = (remainder < 0 ? -remainder : remainder) * 2;
  bool away = twice > divisor || (twice == divisor && quotient % 2 != 0);
  if (away) quotient += mantissa_ < 0 ? -1 : 1;
  return quotient;
}

Decimal Decimal::operator-() const {
  Decimal d = *this;
  d.mantissa_ = -d.mantissa_;
  return d;
}

Decimal operator+(const Decimal& a, const Decimal& b) {
  int scale = 0;
  auto [x, y] = align(a, b, scale);
  return Decimal::from_parts(checked_add(x, y, "add"), scale);
}

Decimal operator-(const Decimal& a, const Decimal& b) { return a + (-b); }

Decimal operator*(const Decimal& a, const Decimal& b) {
  return Decimal::from_parts(checked_mul(a.mantissa(), b.mantissa(), "multiply"), a.scale() + b.scale());
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  int scale = 0;
  auto [x, y] = align(a, b, scale);
  return x <=> y;
}

}  // namespace platoon
