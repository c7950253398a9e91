#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace platoon {

/// Exact base-10 number: an integer mantissa and a power-of-ten scale.
///
/// Addition, subtraction and multiplication are exact; anything that would
/// overflow the 128-bit mantissa throws Error{Overflow} instead of rounding.
/// Values are kept normalized (no trailing zeros in the fraction), so two
/// equal values always have identical representation and string form.
class Decimal {
 public:
  using Mantissa = __int128;

  static constexpr int kMaxScale = 30;

  constexpr Decimal() = default;

  template <std::integral T>
  constexpr Decimal(T value) : mantissa_(static_cast<Mantissa>(value)) {}  // NOLINT(google-explicit-constructor)

  /// Parses "[-]digits[.digits]". Exponents and whitespace are not accepted.
  static Decimal parse(std::string_view text);
  static std::optional<Decimal> try_parse(std::string_view text) noexcept;

  /// Converts through the shortest round-trip decimal form of `value`, so a
  /// literal such as 0.12 becomes exactly 0.12 rather than its binary neighbour.
  static Decimal from_double(double value);

  static Decimal from_parts(Mantissa mantissa, int scale);

  std::string str() const;
  double to_double() const;

  Mantissa mantissa() const noexcept { return mantissa_; }
  int scale() const noexcept { return scale_; }
  int sign() const noexcept { return mantissa_ < 0 ? -1 : (mantissa_ > 0 ? 1 : 0); }
  bool is_zero() const noexcept { return mantissa_ == 0; }
  bool is_integer() const noexcept { return scale_ == 0; }

  /// Value scaled by 10^places and rounded half-to-even.
  Mantissa round_half_even(int places) const;

  Decimal operator-() const;
  friend Decimal operator+(const Decimal& a, const Decimal& b);
  friend Decimal operator-(const Decimal& a, const Decimal& b);
  friend Decimal operator*(const Decimal& a, const Decimal& b);
  Decimal& operator+=(const Decimal& o) { return *this = *this + o; }
  Decimal& operator-=(const Decimal& o) { return *this = *this - o; }
  Decimal& operator*=(const Decimal& o) { return *this = *this * o; }

  friend bool operator==(const Decimal& a, const Decimal& b) noexcept {
    return a.mantissa_ == b.mantissa_ && a.scale_ == b.scale_;
  }
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);

 private:
  void normalize() noexcept;

  Mantissa mantissa_ = 0;
  int scale_ = 0;
};

std::string to_string(Decimal::Mantissa value);

}  // namespace platoon
