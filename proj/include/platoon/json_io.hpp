#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "platoon/earnings.hpp"
#include "platoon/ledger.hpp"
#include "platoon/sim.hpp"

namespace platoon {

// Scenario files
//
// {
//   "drivers": [{"driver_id": "alice", "rank": 5, "prev_day_rate": "0.12",
//                "over_speed_count": 0, "sharp_accel_count": 0, "sharp_decel_count": 0,
//                "depart": 0, "arrive": 39}],
//   "day_length": 39, "vehicle_speed": 1,
//   "initial_platoons": [{"id": "P1", "leader_id": "alice", "follower_ids": ["carol"]}],
//   "events": [{"time": 5, "kind": "Join", "vehicle_id": "bob", "platoon_id": "P1"},
//              {"time": 15, "kind": "Leave", "vehicle_id": "bob"},
//              {"time": 20, "kind": "Merge", "platoon_a": "P1", "platoon_b": "P2"},
//              {"time": 30, "kind": "Split", "platoon_id": "P1", "split_index": 2}],
//   "rate_table": {"1": "0.01", "2": "0.03", "3": "0.09", "4": "0.12", "5": "0.15"},
//   "delta": "0.01", "eta": 10, "seed": 7
// }
//
// Numbers may be given as JSON numbers or as decimal strings; strings are
// exact. prev_day_rate defaults to the rate table entry for the driver's rank.
// Unknown keys are rejected.

ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioSpec& s);

PlatoonTrace trace_from_json(const nlohmann::json& j);
nlohmann::json trace_to_json(const PlatoonTrace& t);

nlohmann::json settlement_to_json(const Settlement& s);

nlohmann::json record_to_json(const ledger::DriverRecord& r);
nlohmann::json transaction_to_json(const ledger::Transaction& tx);
nlohmann::json block_to_json(const ledger::Block& b);
nlohmann::json verify_result_to_json(const ledger::VerifyResult& v);

/// Parses text, reporting syntax errors with line and column.
nlohmann::json parse_json_text(std::string_view text);
nlohmann::json read_json_file(const std::filesystem::path& path);
/// Pretty-printed, trailing newline; byte-stable for equal inputs.
std::string dump_json(const nlohmann::json& j);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace platoon
