#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "platoon/decimal.hpp"

namespace platoon {

/// Driver rank assigned by the external rank-designation model; 1 (worst) to 5.
class Rank {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 5;

  explicit Rank(int value);

  int value() const noexcept { return value_; }
  friend auto operator<=>(const Rank&, const Rank&) = default;

 private:
  int value_;
};

/// Ranks below four may not lead a platoon.
bool leader_eligible(Rank rank) noexcept;

/// Tokens-per-mile for each rank. Rates must be non-negative and strictly
/// increase with rank.
class EarningRateTable {
 public:
  /// 5: 0.15, 4: 0.12, 3: 0.09, 2: 0.03, 1: 0.01
  static EarningRateTable defaults();

  /// `rates[0]` is the rate for rank 1.
  explicit EarningRateTable(const std::array<Decimal, 5>& rates);

  const Decimal& rate(Rank rank) const noexcept { return rates_[static_cast<std::size_t>(rank.value() - 1)]; }
  const std::array<Decimal, 5>& rates() const noexcept { return rates_; }

  friend bool operator==(const EarningRateTable&, const EarningRateTable&) = default;

 private:
  std::array<Decimal, 5> rates_;
};

struct DriverProfile {
  std::string driver_id;
  Rank rank{1};
  Decimal prev_day_rate;  // ER_{d-1}, tokens per mile
  std::uint64_t over_speed_count = 0;
  std::uint64_t sharp_accel_count = 0;
  std::uint64_t sharp_decel_count = 0;

  void validate() const;
};

/// Calendar date (proleptic Gregorian), printed as YYYY-MM-DD.
struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  static Date parse(std::string_view text);
  std::string str() const;
  /// Seconds since the Unix epoch at 00:00 UTC of this date.
  std::int64_t unix_seconds() const;

  friend auto operator<=>(const Date&, const Date&) = default;
};

/// Quantized token quantity: `base_units` counts 10^-decimals tokens.
struct TokenAmount {
  std::uint64_t base_units = 0;
  std::uint8_t decimals = 2;

  static constexpr std::uint8_t kDefaultDecimals = 2;

  /// Whole-or-fractional token string such as "10000" or "8.48"; must be
  /// representable exactly at `decimals` places.
  static TokenAmount from_tokens(const Decimal& tokens, std::uint8_t decimals);

  Decimal tokens() const { return Decimal::from_parts(base_units, decimals); }
  std::string str() const { return tokens().str(); }

  friend TokenAmount operator+(const TokenAmount& a, const TokenAmount& b);
  friend TokenAmount operator-(const TokenAmount& a, const TokenAmount& b);
  friend bool operator==(const TokenAmount&, const TokenAmount&) = default;
  /// Ordering across different decimals is rejected like arithmetic.
  friend std::strong_ordering operator<=>(const TokenAmount& a, const TokenAmount& b);
};

/// Quantizes a settlement to ledger units: half-to-even at `decimals` places,
/// negative values floor to zero.
TokenAmount tokens_from_earnings(const Decimal& earnings, std::uint8_t decimals);

}  // namespace platoon
