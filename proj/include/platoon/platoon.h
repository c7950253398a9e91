/*
 * C interface to the platoon settlement library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return a pl_status; on failure pl_last_error() describes the
 * problem (thread-local, valid until the next call on the same thread).
 * Strings handed out through `char** out` parameters are owned by the caller
 * and must be released with pl_string_free().
 */
#ifndef PLATOON_PLATOON_H
#define PLATOON_PLATOON_H

#include <stdint.h>

#if defined(_WIN32)
#  define PL_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define PL_API __attribute__((visibility("default")))
#else
#  define PL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pl_status {
  PL_OK = 0,
  PL_ERR_INVALID_ARGUMENT = 1,
  PL_ERR_PARSE = 2,
  PL_ERR_VALIDATION = 3,
  PL_ERR_IO = 4,
  PL_ERR_INFEASIBLE_EVENT = 10,
  PL_ERR_INELIGIBLE_LEADER = 11,
  PL_ERR_UNKNOWN_DRIVER = 12,
  PL_ERR_INVALID_SEGMENT = 13,
  PL_ERR_ROLE_MISMATCH = 14,
  PL_ERR_NOT_AUTHORITY = 20,
  PL_ERR_ALREADY_MINTED = 21,
  PL_ERR_UNKNOWN_ACCOUNT = 22,
  PL_ERR_INSUFFICIENT_ALLOWANCE = 23,
  PL_ERR_INSUFFICIENT_BALANCE = 24,
  PL_ERR_DUPLICATE_RECORD = 25,
  PL_ERR_LEDGER_VALIDATION = 26,
  PL_ERR_CORRUPT = 27,
  PL_ERR_OVERFLOW = 30,
  PL_ERR_INTERNAL = 99
} pl_status;

typedef enum pl_format { PL_FORMAT_JSON = 0, PL_FORMAT_TEXT = 1 } pl_format;

typedef struct pl_scenario pl_scenario;
typedef struct pl_trace pl_trace;
typedef struct pl_ledger pl_ledger;

PL_API const char* pl_version(void);
PL_API const char* pl_last_error(void);
PL_API const char* pl_status_name(pl_status status);
PL_API void pl_string_free(char* s);

/* Scenarios ------------------------------------------------------------- */

PL_API pl_status pl_scenario_load(const char* path, pl_scenario** out);
PL_API pl_status pl_scenario_parse(const char* json_text, pl_scenario** out);
/* Overrides delta and/or eta (decimal strings); NULL keeps the current value. */
PL_API pl_status pl_scenario_set_params(pl_scenario* scenario, const char* delta, const char* eta);
PL_API void pl_scenario_free(pl_scenario* scenario);

/* Simulation ------------------------------------------------------------ */

PL_API pl_status pl_simulate(const pl_scenario* scenario, pl_trace** out);
PL_API pl_status pl_trace_load(const char* path, pl_trace** out);
PL_API pl_status pl_trace_save(const pl_trace* trace, const char* path);
/* JSON: the full trace. TEXT: per-platoon segment tables. */
PL_API pl_status pl_trace_render(const pl_trace* trace, pl_format format, char** out);
PL_API pl_status pl_trace_set_params(pl_trace* trace, const char* delta, const char* eta);
PL_API void pl_trace_free(pl_trace* trace);

/* Settlement without a ledger: per-driver earnings for `date` (YYYY-MM-DD). */
PL_API pl_status pl_settle_preview(const pl_trace* trace, const char* date, pl_format format, char** out);

/* Ledger ---------------------------------------------------------------- */

/* Opens or creates an append-only ledger file. */
PL_API pl_status pl_ledger_open(const char* path, pl_ledger** out);
PL_API void pl_ledger_close(pl_ledger* ledger);

/* Token amounts are decimal strings in whole tokens ("10000000", "8.48").
 * `date` may be NULL, which stamps the block at the Unix epoch. */
PL_API pl_status pl_ledger_init(pl_ledger* ledger, const char* supply, int decimals, const char* date,
                                pl_format format, char** out);
PL_API pl_status pl_ledger_fund(pl_ledger* ledger, const char* amount, const char* date, pl_format format,
                                char** out);
/* Settles the trace and commits one block. On PL_ERR_INSUFFICIENT_BALANCE the
 * error message names the required top-up. */
PL_API pl_status pl_ledger_settle(pl_ledger* ledger, const pl_trace* trace, const char* date, const char* trace_label,
                                  pl_format format, char** out);
PL_API pl_status pl_ledger_balance(const pl_ledger* ledger, const char* account, pl_format format, char** out);
PL_API pl_status pl_ledger_records(const pl_ledger* ledger, const char* driver_id, pl_format format, char** out);
PL_API pl_status pl_ledger_export(const pl_ledger* ledger, char** out_json);

/* Verifies a ledger file without opening it for writing. Returns PL_OK for
 * an intact chain and PL_ERR_CORRUPT otherwise; `out` holds the report in
 * both cases. */
PL_API pl_status pl_ledger_verify_file(const char* path, pl_format format, char** out);

#ifdef __cplusplus
}
#endif

#endif /* PLATOON_PLATOON_H */
