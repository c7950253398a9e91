// platoonctl: command-line front end over the platoon C API.

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

#include "platoon/platoon.h"

namespace {

enum Exit { kOk = 0, kInput = 1, kInfeasible = 2, kUnderfunded = 3, kLedger = 4, kCorrupt = 5 };

int exit_code(pl_status s) {
  switch (s) {
    case PL_OK: return kOk;
    case PL_ERR_INFEASIBLE_EVENT:
    case PL_ERR_INELIGIBLE_LEADER: return kInfeasible;
    case PL_ERR_INSUFFICIENT_BALANCE: return kUnderfunded;
    case PL_ERR_NOT_AUTHORITY:
    case PL_ERR_ALREADY_MINTED:
    case PL_ERR_UNKNOWN_ACCOUNT:
    case PL_ERR_INSUFFICIENT_ALLOWANCE:
    case PL_ERR_DUPLICATE_RECORD:
    case PL_ERR_LEDGER_VALIDATION: return kLedger;
    case PL_ERR_CORRUPT: return kCorrupt;
    default: return kInput;
  }
}

int report(pl_status s) {
  if (s != PL_OK) std::fprintf(stderr, "platoonctl: %s\n", pl_last_error());
  return exit_code(s);
}

// Prints and releases an API-owned string.
void print(char* text) {
  if (!text) return;
  std::fputs(text, stdout);
  pl_string_free(text);
}

const char* opt(const std::optional<std::string>& s) { return s ? s->c_str() : nullptr; }

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};
using Scenario = Handle<pl_scenario, pl_scenario_free>;
using Trace = Handle<pl_trace, pl_trace_free>;
using Ledger = Handle<pl_ledger, pl_ledger_close>;

struct Options {
  bool json = false;
  std::string scenario, trace, ledger, out, date, label, account, driver, report_path;
  std::optional<std::string> delta, eta, supply, init_date, fund_date;
  std::string amount;
  int decimals = 2;
  pl_format format() const { return json ? PL_FORMAT_JSON : PL_FORMAT_TEXT; }
};

int cmd_simulate(const Options& o) {
  Scenario sc;
  pl_status s = pl_scenario_load(o.scenario.c_str(), &sc.p);
  if (s == PL_OK) s = pl_scenario_set_params(sc.p, opt(o.delta), opt(o.eta));
  Trace tr;
  if (s == PL_OK) s = pl_simulate(sc.p, &tr.p);
  if (s == PL_OK && !o.out.empty()) s = pl_trace_save(tr.p, o.out.c_str());
  char* text = nullptr;
  if (s == PL_OK) s = pl_trace_render(tr.p, o.format(), &text);
  print(text);
  return report(s);
}

pl_status load_trace(const Options& o, Trace& tr) {
  pl_status s = pl_trace_load(o.trace.c_str(), &tr.p);
  if (s == PL_OK) s = pl_trace_set_params(tr.p, opt(o.delta), opt(o.eta));
  return s;
}

int cmd_earnings(const Options& o) {
  Trace tr;
  pl_status s = load_trace(o, tr);
  char* text = nullptr;
  if (s == PL_OK) s = pl_settle_preview(tr.p, o.date.c_str(), o.format(), &text);
  print(text);
  return report(s);
}

int cmd_settle(const Options& o) {
  Trace tr;
  pl_status s = load_trace(o, tr);
  Ledger lg;
  if (s == PL_OK) s = pl_ledger_open(o.ledger.c_str(), &lg.p);
  char* text = nullptr;
  const std::string label = o.label.empty() ? o.trace : o.label;
  if (s == PL_OK) s = pl_ledger_settle(lg.p, tr.p, o.date.c_str(), label.c_str(), o.format(), &text);
  if (s == PL_OK && !o.report_path.empty()) {
    char* json = nullptr;
    // The committed block is already durable; the report is re-derived from the trace.
    if (pl_settle_preview(tr.p, o.date.c_str(), PL_FORMAT_JSON, &json) == PL_OK) {
      if (std::FILE* f = std::fopen(o.report_path.c_str(), "wb")) {
        std::fputs(json, f);
        std::fclose(f);
      } else {
        std::fprintf(stderr, "platoonctl: cannot write report to %s\n", o.report_path.c_str());
        pl_string_free(json);
        print(text);
        return kInput;
      }
    }
    pl_string_free(json);
  }
  print(text);
  return report(s);
}

template <typename F>
int with_ledger(const Options& o, F&& body) {
  Ledger lg;
  pl_status s = pl_ledger_open(o.ledger.c_str(), &lg.p);
  char* text = nullptr;
  if (s == PL_OK) s = body(lg.p, &text);
  print(text);
  return report(s);
}

int cmd_verify(const Options& o) {
  char* text = nullptr;
  pl_status s = pl_ledger_verify_file(o.ledger.c_str(), o.format(), &text);
  print(text);
  return report(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Platoon earnings simulation and token ledger"};
  app.set_version_flag("--version", pl_version());
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("--json", o.json, "Machine-readable JSON output");

  auto params = [&](CLI::App* c) {
    c->add_option("--delta", o.delta, "Balancing factor override");
    c->add_option("--eta", o.eta, "Penalty threshold override, miles");
  };

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and emit its platoon trace");
  simulate->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  simulate->add_option("--out", o.out, "Write the trace JSON here");
  params(simulate);

  auto* earnings = app.add_subcommand("earnings", "Compute daily earnings for a trace without touching a ledger");
  earnings->add_option("--trace", o.trace, "Trace JSON file")->required();
  earnings->add_option("--date", o.date, "Earning date, YYYY-MM-DD")->required();
  params(earnings);

  auto* settle = app.add_subcommand("settle", "Settle a trace and commit the credits to the ledger");
  settle->add_option("--trace", o.trace, "Trace JSON file")->required();
  settle->add_option("--ledger", o.ledger, "Ledger file")->required();
  settle->add_option("--date", o.date, "Earning date, YYYY-MM-DD")->required();
  settle->add_option("--label", o.label, "Trace label for the run report");
  settle->add_option("--report", o.report_path, "Write the per-driver settlement JSON here");
  params(settle);

  auto* ledger = app.add_subcommand("ledger", "Ledger administration");
  ledger->require_subcommand(1);
  ledger->fallthrough();
  auto* init = ledger->add_subcommand("init", "Mint the supply and approve the driver-record account");
  init->add_option("--ledger", o.ledger, "Ledger file")->required();
  init->add_option("--supply", o.supply, "Total supply in tokens (default 10000000)");
  init->add_option("--decimals", o.decimals, "Token decimals")->check(CLI::Range(0, 18));
  init->add_option("--date", o.init_date, "Block date, YYYY-MM-DD");
  auto* fund = ledger->add_subcommand("fund", "Move tokens from the authority to the driver-record account");
  fund->add_option("--ledger", o.ledger, "Ledger file")->required();
  fund->add_option("--amount", o.amount, "Amount in tokens")->required();
  fund->add_option("--date", o.fund_date, "Block date, YYYY-MM-DD");
  auto* verify = ledger->add_subcommand("verify", "Check hashes, links and replay of a ledger file");
  verify->add_option("--ledger", o.ledger, "Ledger file")->required();
  auto* balance = ledger->add_subcommand("balance", "Show an account balance");
  balance->add_option("--ledger", o.ledger, "Ledger file")->required();
  auto* who = balance->add_option_group("account");
  who->add_option("--account", o.account, "Account name");
  who->add_option("--driver", o.driver, "Driver id (reads wallet/<id>)");
  who->require_option(1);
  auto* records = ledger->add_subcommand("records", "List stored driver records");
  records->add_option("--ledger", o.ledger, "Ledger file")->required();
  records->add_option("--driver", o.driver, "Driver id")->required();
  auto* exp = ledger->add_subcommand("export", "Dump every block as JSON");
  exp->add_option("--ledger", o.ledger, "Ledger file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  if (*simulate) return cmd_simulate(o);
  if (*earnings) return cmd_earnings(o);
  if (*settle) return cmd_settle(o);
  if (*init) {
    return with_ledger(o, [&](pl_ledger* l, char** out) {
      return pl_ledger_init(l, opt(o.supply), o.decimals, opt(o.init_date), o.format(), out);
    });
  }
  if (*fund) {
    return with_ledger(o, [&](pl_ledger* l, char** out) {
      return pl_ledger_fund(l, o.amount.c_str(), opt(o.fund_date), o.format(), out);
    });
  }
  if (*verify) return cmd_verify(o);
  if (*balance) {
    const std::string account = o.driver.empty() ? o.account : "wallet/" + o.driver;
    return with_ledger(o, [&](pl_ledger* l, char** out) { return pl_ledger_balance(l, account.c_str(), o.format(), out); });
  }
  if (*records) {
    return with_ledger(o, [&](pl_ledger* l, char** out) { return pl_ledger_records(l, o.driver.c_str(), o.format(), out); });
  }
  if (*exp) return with_ledger(o, [&](pl_ledger* l, char** out) { return pl_ledger_export(l, out); });
  return kInput;
}
