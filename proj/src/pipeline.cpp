#include "platoon/pipeline.hpp"

#include <cstdio>

#include "platoon/error.hpp"
#include "platoon/json_io.hpp"

namespace platoon {

using ledger::kDriverRecord;
using ledger::kTokenAuthority;

ledger::Block ledger_init(ledger::Ledger& ledger, const Decimal& supply_tokens, std::uint8_t decimals,
                          std::int64_t timestamp) {
  TokenAmount supply = TokenAmount::from_tokens(supply_tokens, decimals);
  auto builder = ledger.builder();
  builder.mint(kTokenAuthority, supply);
  builder.approve(kTokenAuthority, kDriverRecord, supply);
  return ledger.append_block(std::move(builder).take(), timestamp);
}

ledger::Block ledger_fund(ledger::Ledger& ledger, const Decimal& amount_tokens, std::int64_t timestamp) {
  auto builder = ledger.builder();
  if (!builder.state().minted()) throw Error(ErrorCode::ValidationFailed, "ledger has not been initialized");
  TokenAmount amount = TokenAmount::from_tokens(amount_tokens, builder.state().decimals());
  builder.transfer_from(kDriverRecord, kTokenAuthority, kDriverRecord, amount);
  return ledger.append_block(std::move(builder).take(), timestamp);
}

RunReport settle_into_ledger(const PlatoonTrace& trace, const SettlementConfig& config, ledger::Ledger& ledger,
                             const Date& date, std::string trace_label) {
  RunReport report;
  report.trace_label = std::move(trace_label);
  report.date = date;
  report.settlements = settle_trace(trace, config, date);

  auto builder = ledger.builder();
  const std::uint8_t decimals = builder.state().decimals();
  report.total_credited = TokenAmount{0, decimals};
  for (const auto& s : report.settlements) {
    report.credited.push_back(tokens_from_earnings(s.er_total, decimals));
    report.total_credited = report.total_credited + report.credited.back();
    if (builder.state().has_record(s.driver_id, date)) {
      throw Error(ErrorCode::DuplicateRecord, "driver '" + s.driver_id + "' already settled for " + date.str());
    }
  }

  if (!report.settlements.empty()) {
    TokenAmount available = builder.state().balance_of(kDriverRecord);
    if (available < report.total_credited) {
      throw Error(ErrorCode::InsufficientBalance,
                  "driver-record account holds " + available.str() + " tokens, settlement needs " +
                      report.total_credited.str() + "; top up at least " + (report.total_credited - available).str());
    }
    for (const auto& s : report.settlements) {
      const DriverProfile& driver = trace.scenario.driver(s.driver_id);
      builder.credit_driver(kDriverRecord, ledger::wallet_of(s.driver_id), s, ledger::make_record(driver, s));
    }
    ledger::Block b = ledger.append_block(std::move(builder).take(), date.unix_seconds());
    report.blocks = std::make_pair(b.index, b.index);
  }
  report.verification = ledger.verify();
  return report;
}

nlohmann::json run_report_to_json(const RunReport& report) {
  nlohmann::json settlements = nlohmann::json::array();
  for (std::size_t i = 0; i < report.settlements.size(); ++i) {
    nlohmann::json s = settlement_to_json(report.settlements[i]);
    s["credited_base_units"] = report.credited[i].base_units;
    s["credited_tokens"] = report.credited[i].str();
    settlements.push_back(std::move(s));
  }
  nlohmann::json blocks = nullptr;
  if (report.blocks) blocks = {{"first", report.blocks->first}, {"last", report.blocks->second}};
  return {{"trace", report.trace_label},
          {"date", report.date.str()},
          {"settlements", settlements},
          {"blocks", blocks},
          {"decimals", report.total_credited.decimals},
          {"total_credited_base_units", report.total_credited.base_units},
          {"total_credited_tokens", report.total_credited.str()},
          {"verification", verify_result_to_json(report.verification)}};
}

std::string format_run_report(const RunReport& report) {
  std::string out = format_settlement_table(report.settlements);
  char line[160];
  for (std::size_t i = 0; i < report.settlements.size(); ++i) {
    std::snprintf(line, sizeof line, "credited %-16s %12s tokens (%llu base units)\n",
                  report.settlements[i].driver_id.c_str(), report.credited[i].str().c_str(),
                  static_cast<unsigned long long>(report.credited[i].base_units));
    out += line;
  }
  if (report.blocks) {
    std::snprintf(line, sizeof line, "committed block %llu, total %s tokens\n",
                  static_cast<unsigned long long>(report.blocks->first), report.total_credited.str().c_str());
  } else {
    std::snprintf(line, sizeof line, "nothing to settle, no block committed\n");
  }
  out += line;
  out += report.verification.ok() ? "chain verified\n" : "chain verification FAILED\n";
  return out;
}

}  // namespace platoon
