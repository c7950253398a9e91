#include "platoon/domain.hpp"

#include <chrono>
#include <cstdio>
#include <limits>

#include "platoon/error.hpp"

namespace platoon {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::InfeasibleEvent: return "InfeasibleEvent";
    case ErrorCode::IneligibleLeader: return "IneligibleLeader";
    case ErrorCode::UnknownDriver: return "UnknownDriver";
    case ErrorCode::InvalidSegment: return "InvalidSegment";
    case ErrorCode::RoleMismatch: return "RoleMismatch";
    case ErrorCode::NotAuthority: return "NotAuthority";
    case ErrorCode::AlreadyMinted: return "AlreadyMinted";
    case ErrorCode::UnknownAccount: return "UnknownAccount";
    case ErrorCode::InsufficientAllowance: return "InsufficientAllowance";
    case ErrorCode::InsufficientBalance: return "InsufficientBalance";
    case ErrorCode::DuplicateRecord: return "DuplicateRecord";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::Corrupt: return "Corrupt";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Overflow: return "Overflow";
  }
  return "Unknown";
}

Rank::Rank(int value) : value_(value) {
  if (value < kMin || value > kMax) {
    throw Error(ErrorCode::InvalidArgument, "rank " + std::to_string(value) + " outside [1, 5]");
  }
}

bool leader_eligible(Rank rank) noexcept { return rank.value() >= 4; }

EarningRateTable EarningRateTable::defaults() {
  return EarningRateTable({Decimal::parse("0.01"), Decimal::parse("0.03"), Decimal::parse("0.09"),
                           Decimal::parse("0.12"), Decimal::parse("0.15")});
}

EarningRateTable::EarningRateTable(const std::array<Decimal, 5>& rates) : rates_(rates) {
  for (std::size_t i = 0; i < rates_.size(); ++i) {
    if (rates_[i].sign() < 0) {
      throw Error(ErrorCode::Validation, "earning rate for rank " + std::to_string(i + 1) + " is negative");
    }
    if (i > 0 && !(rates_[i - 1] < rates_[i])) {
      throw Error(ErrorCode::Validation, "earning rates must strictly increase with rank (rank " +
                                             std::to_string(i) + " -> " + std::to_string(i + 1) + ")");
    }
  }
}

void DriverProfile::validate() const {
  if (driver_id.empty()) throw Error(ErrorCode::Validation, "driver_id must be non-empty");
  if (prev_day_rate.sign() < 0) {
    throw Error(ErrorCode::Validation, "prev_day_rate of '" + driver_id + "' is negative");
  }
}

Date Date::parse(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  std::string s(text);
  if (s.size() != 10 || std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3 || s[4] != '-' ||
      s[7] != '-') {
    throw Error(ErrorCode::Parse, "date must be YYYY-MM-DD, got '" + s + "'");
  }
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) throw Error(ErrorCode::Parse, "not a calendar date: '" + s + "'");
  return Date{y, m, d};
}

std::string Date::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
  return buf;
}

std::int64_t Date::unix_seconds() const {
  std::chrono::sys_days days{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
  return static_cast<std::int64_t>(days.time_since_epoch().count()) * 86400;
}

TokenAmount TokenAmount::from_tokens(const Decimal& tokens, std::uint8_t decimals) {
  if (tokens.sign() < 0) throw Error(ErrorCode::InvalidArgument, "token amount is negative");
  if (tokens.scale() > decimals) {
    throw Error(ErrorCode::InvalidArgument,
                "token amount " + tokens.str() + " has more than " + std::to_string(decimals) + " decimals");
  }
  auto units = tokens.round_half_even(decimals);
  if (units > std::numeric_limits<std::uint64_t>::max()) throw Error(ErrorCode::Overflow, "token amount too large");
  return TokenAmount{static_cast<std::uint64_t>(units), decimals};
}

namespace {
void require_same_decimals(const TokenAmount& a, const TokenAmount& b) {
  if (a.decimals != b.decimals) {
    throw Error(ErrorCode::InvalidArgument, "token amounts with different decimals (" + std::to_string(a.decimals) +
                                                " vs " + std::to_string(b.decimals) + ")");
  }
}
}  // namespace

TokenAmount operator+(const TokenAmount& a, const TokenAmount& b) {
  require_same_decimals(a, b);
  std::uint64_t sum = 0;
  if (__builtin_add_overflow(a.base_units, b.base_units, &sum)) throw Error(ErrorCode::Overflow, "token sum overflow");
  return TokenAmount{sum, a.decimals};
}

TokenAmount operator-(const TokenAmount& a, const TokenAmount& b) {
  require_same_decimals(a, b);
  if (b.base_units > a.base_units) throw Error(ErrorCode::InvalidArgument, "token amount would go negative");
  return TokenAmount{a.base_units - b.base_units, a.decimals};
}

std::strong_ordering operator<=>(const TokenAmount& a, const TokenAmount& b) {
  require_same_decimals(a, b);
  return a.base_units <=> b.base_units;
}

TokenAmount tokens_from_earnings(const Decimal& earnings, std::uint8_t decimals) {
  if (earnings.sign() <= 0) return TokenAmount{0, decimals};
  auto units = earnings.round_half_even(decimals);
  if (units > std::numeric_limits<std::uint64_t>::max()) throw Error(ErrorCode::Overflow, "earnings too large");
  return TokenAmount{static_cast<std::uint64_t>(units), decimals};
}

}  // namespace platoon
