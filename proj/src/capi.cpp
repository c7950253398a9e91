#include "platoon/platoon.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include "platoon/error.hpp"
#include "platoon/json_io.hpp"
#include "platoon/ledger.hpp"
#include "platoon/pipeline.hpp"

struct pl_scenario {
  platoon::ScenarioSpec spec;
};

struct pl_trace {
  platoon::PlatoonTrace trace;
};

struct pl_ledger {
  std::unique_ptr<platoon::ledger::Ledger> ledger;
};

namespace {

thread_local std::string g_last_error;

pl_status status_of(platoon::ErrorCode code) {
  using platoon::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return PL_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return PL_ERR_PARSE;
    case ErrorCode::Validation: return PL_ERR_VALIDATION;
    case ErrorCode::InfeasibleEvent: return PL_ERR_INFEASIBLE_EVENT;
    case ErrorCode::IneligibleLeader: return PL_ERR_INELIGIBLE_LEADER;
    case ErrorCode::UnknownDriver: return PL_ERR_UNKNOWN_DRIVER;
    case ErrorCode::InvalidSegment: return PL_ERR_INVALID_SEGMENT;
    case ErrorCode::RoleMismatch: return PL_ERR_ROLE_MISMATCH;
    case ErrorCode::NotAuthority: return PL_ERR_NOT_AUTHORITY;
    case ErrorCode::AlreadyMinted: return PL_ERR_ALREADY_MINTED;
    case ErrorCode::UnknownAccount: return PL_ERR_UNKNOWN_ACCOUNT;
    case ErrorCode::InsufficientAllowance: return PL_ERR_INSUFFICIENT_ALLOWANCE;
    case ErrorCode::InsufficientBalance: return PL_ERR_INSUFFICIENT_BALANCE;
    case ErrorCode::DuplicateRecord: return PL_ERR_DUPLICATE_RECORD;
    case ErrorCode::ValidationFailed: return PL_ERR_LEDGER_VALIDATION;
    case ErrorCode::Corrupt: return PL_ERR_CORRUPT;
    case ErrorCode::Io: return PL_ERR_IO;
    case ErrorCode::Overflow: return PL_ERR_OVERFLOW;
  }
  return PL_ERR_INTERNAL;
}

pl_status fail(pl_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
pl_status guard(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const platoon::Error& e) {
    return fail(status_of(e.code()), std::string(platoon::to_string(e.code())) + ": " + e.what());
  } catch (const std::bad_alloc&) {
    return fail(PL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PL_ERR_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

pl_status emit(char** out, const std::string& text) {
  if (out) *out = dup(text);
  return PL_OK;
}

pl_status emit(char** out, pl_format format, const nlohmann::json& j, const std::string& text) {
  return emit(out, format == PL_FORMAT_JSON ? platoon::dump_json(j) : text);
}

#define PL_REQUIRE(cond, what) \
  if (!(cond)) return fail(PL_ERR_INVALID_ARGUMENT, what)

std::optional<platoon::Decimal> opt_decimal(const char* text) {
  if (!text) return std::nullopt;
  return platoon::Decimal::parse(text);
}

platoon::Date date_or_epoch(const char* date) { return date ? platoon::Date::parse(date) : platoon::Date{}; }

void set_params(platoon::ScenarioSpec& spec, const char* delta, const char* eta) {
  platoon::ScenarioSpec next = spec;
  if (auto d = opt_decimal(delta)) next.delta = *d;
  if (auto e = opt_decimal(eta)) next.eta = *e;
  next.validate();
  spec = std::move(next);
}

std::string balance_text(std::string_view account, const platoon::TokenAmount& a) {
  return std::string(account) + ": " + a.str() + " tokens (" + std::to_string(a.base_units) + " base units)\n";
}

nlohmann::json balance_json(std::string_view account, const platoon::TokenAmount& a) {
  return {{"account", account}, {"tokens", a.str()}, {"base_units", a.base_units}, {"decimals", a.decimals}};
}

pl_status emit_block(char** out, pl_format format, const platoon::ledger::Ledger& ledger,
                     const platoon::ledger::Block& block) {
  using namespace platoon::ledger;
  auto authority = ledger.balance_of(kTokenAuthority);
  auto record = ledger.balance_of(kDriverRecord);
  nlohmann::json j{{"block", platoon::block_to_json(block)},
                   {"balances", {balance_json(kTokenAuthority, authority), balance_json(kDriverRecord, record)}},
                   {"total_supply", ledger.state().total_supply().str()}};
  std::string text = "committed block " + std::to_string(block.index) + " (" + to_hex(block.hash).substr(0, 16) +
                     ")\n" + balance_text(kTokenAuthority, authority) + balance_text(kDriverRecord, record);
  return emit(out, format, j, text);
}

}  // namespace

extern "C" {

const char* pl_version(void) { return "1.0.0"; }

const char* pl_last_error(void) { return g_last_error.c_str(); }

const char* pl_status_name(pl_status status) {
  switch (status) {
    case PL_OK: return "ok";
    case PL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PL_ERR_PARSE: return "parse error";
    case PL_ERR_VALIDATION: return "validation error";
    case PL_ERR_IO: return "i/o error";
    case PL_ERR_INFEASIBLE_EVENT: return "infeasible event";
    case PL_ERR_INELIGIBLE_LEADER: return "ineligible leader";
    case PL_ERR_UNKNOWN_DRIVER: return "unknown driver";
    case PL_ERR_INVALID_SEGMENT: return "invalid segment";
    case PL_ERR_ROLE_MISMATCH: return "role mismatch";
    case PL_ERR_NOT_AUTHORITY: return "not authority";
    case PL_ERR_ALREADY_MINTED: return "already minted";
    case PL_ERR_UNKNOWN_ACCOUNT: return "unknown account";
    case PL_ERR_INSUFFICIENT_ALLOWANCE: return "insufficient allowance";
    case PL_ERR_INSUFFICIENT_BALANCE: return "insufficient balance";
    case PL_ERR_DUPLICATE_RECORD: return "duplicate record";
    case PL_ERR_LEDGER_VALIDATION: return "ledger validation failed";
    case PL_ERR_CORRUPT: return "corrupt ledger";
    case PL_ERR_OVERFLOW: return "overflow";
    case PL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void pl_string_free(char* s) { std::free(s); }

pl_status pl_scenario_load(const char* path, pl_scenario** out) {
  PL_REQUIRE(path && out, "path and out are required");
  return guard([&] {
    auto s = std::make_unique<pl_scenario>();
    s->spec = platoon::scenario_from_json(platoon::read_json_file(path));
    s->spec.validate();
    *out = s.release();
    return PL_OK;
  });
}

pl_status pl_scenario_parse(const char* json_text, pl_scenario** out) {
  PL_REQUIRE(json_text && out, "json_text and out are required");
  return guard([&] {
    auto s = std::make_unique<pl_scenario>();
    s->spec = platoon::scenario_from_json(platoon::parse_json_text(json_text));
    s->spec.validate();
    *out = s.release();
    return PL_OK;
  });
}

pl_status pl_scenario_set_params(pl_scenario* scenario, const char* delta, const char* eta) {
  PL_REQUIRE(scenario, "scenario is required");
  return guard([&] {
    set_params(scenario->spec, delta, eta);
    return PL_OK;
  });
}

void pl_scenario_free(pl_scenario* scenario) { delete scenario; }

pl_status pl_simulate(const pl_scenario* scenario, pl_trace** out) {
  PL_REQUIRE(scenario && out, "scenario and out are required");
  return guard([&] {
    auto t = std::make_unique<pl_trace>();
    t->trace = platoon::run(scenario->spec);
    *out = t.release();
    return PL_OK;
  });
}

pl_status pl_trace_load(const char* path, pl_trace** out) {
  PL_REQUIRE(path && out, "path and out are required");
  return guard([&] {
    auto t = std::make_unique<pl_trace>();
    t->trace = platoon::trace_from_json(platoon::read_json_file(path));
    *out = t.release();
    return PL_OK;
  });
}

pl_status pl_trace_save(const pl_trace* trace, const char* path) {
  PL_REQUIRE(trace && path, "trace and path are required");
  return guard([&] {
    platoon::write_text_file(path, platoon::dump_json(platoon::trace_to_json(trace->trace)));
    return PL_OK;
  });
}

pl_status pl_trace_render(const pl_trace* trace, pl_format format, char** out) {
  PL_REQUIRE(trace && out, "trace and out are required");
  return guard([&] {
    if (format == PL_FORMAT_JSON) return emit(out, platoon::dump_json(platoon::trace_to_json(trace->trace)));
    return emit(out, platoon::format_segment_tables(trace->trace));
  });
}

pl_status pl_trace_set_params(pl_trace* trace, const char* delta, const char* eta) {
  PL_REQUIRE(trace, "trace is required");
  return guard([&] {
    set_params(trace->trace.scenario, delta, eta);
    return PL_OK;
  });
}

void pl_trace_free(pl_trace* trace) { delete trace; }

pl_status pl_settle_preview(const pl_trace* trace, const char* date, pl_format format, char** out) {
  PL_REQUIRE(trace && date && out, "trace, date and out are required");
  return guard([&] {
    const auto& sc = trace->trace.scenario;
    auto settlements = platoon::settle_trace(trace->trace, {sc.delta, sc.eta}, platoon::Date::parse(date));
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : settlements) j.push_back(platoon::settlement_to_json(s));
    return emit(out, format, j, platoon::format_settlement_table(settlements));
  });
}

pl_status pl_ledger_open(const char* path, pl_ledger** out) {
  PL_REQUIRE(path && out, "path and out are required");
  return guard([&] {
    auto l = std::make_unique<pl_ledger>();
    l->ledger = platoon::ledger::Ledger::open(path);
    *out = l.release();
    return PL_OK;
  });
}

void pl_ledger_close(pl_ledger* ledger) { delete ledger; }

pl_status pl_ledger_init(pl_ledger* ledger, const char* supply, int decimals, const char* date, pl_format format,
                         char** out) {
  PL_REQUIRE(ledger, "ledger is required");
  PL_REQUIRE(decimals >= 0 && decimals <= 18, "decimals must be in [0, 18]");
  return guard([&] {
    platoon::Decimal amount = supply ? platoon::Decimal::parse(supply) : platoon::kDefaultSupply;
    auto block = platoon::ledger_init(*ledger->ledger, amount, static_cast<std::uint8_t>(decimals),
                                      date_or_epoch(date).unix_seconds());
    return emit_block(out, format, *ledger->ledger, block);
  });
}

pl_status pl_ledger_fund(pl_ledger* ledger, const char* amount, const char* date, pl_format format, char** out) {
  PL_REQUIRE(ledger && amount, "ledger and amount are required");
  return guard([&] {
    auto block = platoon::ledger_fund(*ledger->ledger, platoon::Decimal::parse(amount),
                                      date_or_epoch(date).unix_seconds());
    return emit_block(out, format, *ledger->ledger, block);
  });
}

pl_status pl_ledger_settle(pl_ledger* ledger, const pl_trace* trace, const char* date, const char* trace_label,
                           pl_format format, char** out) {
  PL_REQUIRE(ledger && trace && date, "ledger, trace and date are required");
  return guard([&] {
    const auto& sc = trace->trace.scenario;
    auto report = platoon::settle_into_ledger(trace->trace, {sc.delta, sc.eta}, *ledger->ledger,
                                              platoon::Date::parse(date), trace_label ? trace_label : "");
    return emit(out, format, platoon::run_report_to_json(report), platoon::format_run_report(report));
  });
}

pl_status pl_ledger_balance(const pl_ledger* ledger, const char* account, pl_format format, char** out) {
  PL_REQUIRE(ledger && account && out, "ledger, account and out are required");
  return guard([&] {
    auto amount = ledger->ledger->balance_of(account);
    return emit(out, format, balance_json(account, amount), balance_text(account, amount));
  });
}

pl_status pl_ledger_records(const pl_ledger* ledger, const char* driver_id, pl_format format, char** out) {
  PL_REQUIRE(ledger && driver_id && out, "ledger, driver_id and out are required");
  return guard([&] {
    auto records = ledger->ledger->records_for(driver_id);
    nlohmann::json j = nlohmann::json::array();
    std::string text;
    for (const auto& r : records) {
      j.push_back(platoon::record_to_json(r));
      text += r.earning_date.str() + "  " + r.driver_id + "  earnings " + r.current_earnings.str() + "  rank " +
              std::to_string(r.rank.value()) + "  miles " + r.distance_travelled.str() + "  platoons " +
              std::to_string(r.platoons_joined) + (r.leader_activity ? "  led" : "") + "\n";
    }
    if (records.empty()) text = "no records for '" + std::string(driver_id) + "'\n";
    return emit(out, format, j, text);
  });
}

pl_status pl_ledger_export(const pl_ledger* ledger, char** out_json) {
  PL_REQUIRE(ledger && out_json, "ledger and out_json are required");
  return guard([&] {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : ledger->ledger->blocks()) blocks.push_back(platoon::block_to_json(b));
    return emit(out_json, platoon::dump_json(blocks));
  });
}

pl_status pl_ledger_verify_file(const char* path, pl_format format, char** out) {
  PL_REQUIRE(path && out, "path and out are required");
  return guard([&] {
    auto v = platoon::ledger::verify_file(path);
    std::string text = v.ok() ? "ledger ok: " + std::to_string(v.blocks) + " blocks verified\n"
                              : "ledger corrupt at block " + std::to_string(v.corruption->block_index) + " (" +
                                    v.corruption->field + "): " + v.corruption->detail + "\n";
    emit(out, format, platoon::verify_result_to_json(v), text);
    if (!v.ok()) return fail(PL_ERR_CORRUPT, "corrupt at block " + std::to_string(v.corruption->block_index));
    return PL_OK;
  });
}

}  // extern "C"
