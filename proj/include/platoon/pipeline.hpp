#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "platoon/earnings.hpp"
#include "platoon/ledger.hpp"
#include "platoon/sim.hpp"

namespace platoon {

inline const Decimal kDefaultSupply = Decimal(10'000'000);

/// Mints the fixed supply to the token authority and authorizes the
/// driver-record account to spend all of it, in one block.
ledger::Block ledger_init(ledger::Ledger& ledger, const Decimal& supply_tokens, std::uint8_t decimals,
                          std::int64_t timestamp);

/// Moves tokens from the authority to the driver-record account using the
/// driver-record allowance.
ledger::Block ledger_fund(ledger::Ledger& ledger, const Decimal& amount_tokens, std::int64_t timestamp);

struct RunReport {
  std::string trace_label;
  Date date;
  std::vector<Settlement> settlements;
  std::vector<TokenAmount> credited;  // parallel to settlements
  std::optional<std::pair<std::uint64_t, std::uint64_t>> blocks;
  ledger::VerifyResult verification;
  TokenAmount total_credited;
};

/// Settles every driver of the trace and commits one block of CreditDriver +
/// StoreRecord pairs stamped with `date`. Throws Error{InsufficientBalance}
/// naming the required top-up when the driver-record account is short, and
/// Error{DuplicateRecord} if any driver already has a record for `date`.
RunReport settle_into_ledger(const PlatoonTrace& trace, const SettlementConfig& config, ledger::Ledger& ledger,
                             const Date& date, std::string trace_label);

nlohmann::json run_report_to_json(const RunReport& report);
std::string format_run_report(const RunReport& report);

}  // namespace platoon
