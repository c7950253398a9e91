#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "generators.hpp"
#include "platoon/error.hpp"
#include "platoon/json_io.hpp"

using namespace platoon;
using namespace platoon::testing;
using nlohmann::json;

namespace {

std::string error_of(auto&& fn, ErrorCode expected) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(e.code() == expected);
    return e.what();
  }
  FAIL("expected an error");
  return {};
}

json canonical_json() {
  return json::parse(R"({
    "day_length": 39, "vehicle_speed": 1,
    "drivers": [
      {"driver_id": "alice", "rank": 5, "prev_day_rate": "0.12"},
      {"driver_id": "bob", "rank": 2},
      {"driver_id": "carol", "rank": 2, "prev_day_rate": 0.03, "arrive": 19}
    ],
    "initial_platoons": [{"id": "P1", "leader_id": "alice", "follower_ids": ["carol"]}],
    "events": [
      {"time": 5, "kind": "Join", "vehicle_id": "bob", "platoon_id": "P1"},
      {"time": 15, "kind": "Leave", "vehicle_id": "bob"},
      {"time": 19, "kind": "Leave", "vehicle_id": "carol"}
    ]
  })");
}

}  // namespace

TEST_CASE("scenario parses with defaults") {
  ScenarioSpec s = scenario_from_json(canonical_json());
  CHECK(s.drivers.size() == 3);
  CHECK(s.driver("bob").prev_day_rate == D("0.03"));
  CHECK(s.driver("carol").prev_day_rate == D("0.03"));
  CHECK(s.arrive_of("carol") == D("19"));
  CHECK(s.arrive_of("alice") == D("39"));
  CHECK(s.delta == D("0.01"));
  CHECK(s.eta == D("10"));
  CHECK(s.events.size() == 3);
  CHECK(s.events[0].kind() == EventKind::Join);
}

TEST_CASE("scenario round-trips through JSON") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    ScenarioSpec s = random_scenario(rng);
    json j = scenario_to_json(s);
    ScenarioSpec back = scenario_from_json(j);
    CHECK(scenario_to_json(back) == j);
  }
}

TEST_CASE("trace round-trips through JSON") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    PlatoonTrace t = run(random_scenario(rng));
    json j = trace_to_json(t);
    CHECK(trace_to_json(trace_from_json(j)) == j);
  }
}

TEST_CASE("validation errors carry a JSON pointer") {
  json j = canonical_json();
  SUBCASE("unknown key") {
    j["drivers"][1]["colour"] = "red";
    CHECK(error_of([&] { scenario_from_json(j); }, ErrorCode::Validation).find("/drivers/1") != std::string::npos);
  }
  SUBCASE("bad rank") {
    j["drivers"][0]["rank"] = 9;
    CHECK(error_of([&] { scenario_from_json(j); }, ErrorCode::Validation).find("/drivers/0/rank") !=
          std::string::npos);
  }
  SUBCASE("bad number") {
    j["day_length"] = "forty";
    CHECK(error_of([&] { scenario_from_json(j); }, ErrorCode::Validation).find("/day_length") != std::string::npos);
  }
  SUBCASE("unknown event kind") {
    j["events"][0]["kind"] = "Teleport";
    CHECK(error_of([&] { scenario_from_json(j); }, ErrorCode::Validation).find("/events/0/kind") !=
          std::string::npos);
  }
  SUBCASE("missing field") {
    j.erase("vehicle_speed");
    CHECK(error_of([&] { scenario_from_json(j); }, ErrorCode::Validation).find("vehicle_speed") !=
          std::string::npos);
  }
  SUBCASE("non-monotone rate table") {
    j["rate_table"] = {{"1", "0.5"}, {"2", "0.03"}, {"3", "0.09"}, {"4", "0.12"}, {"5", "0.15"}};
    CHECK(error_of([&] { scenario_from_json(j); }, ErrorCode::Validation).find("/rate_table") !=
          std::string::npos);
  }
}

TEST_CASE("syntax errors report line and column") {
  auto msg = error_of([] { parse_json_text("{\n  \"a\": 1,\n  oops\n}"); }, ErrorCode::Parse);
  CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("missing files are I/O errors") {
  TempDir dir;
  error_of([&] { read_json_file(dir / "nope.json"); }, ErrorCode::Io);
}

TEST_CASE("dump is stable") {
  json j = trace_to_json(run(canonical_scenario()));
  CHECK(dump_json(j) == dump_json(trace_to_json(trace_from_json(j))));
  CHECK(dump_json(j).back() == '\n');
}

TEST_CASE("settlement JSON carries the breakdown") {
  auto all = settle_trace(run(canonical_scenario()), {}, Date::parse("2024-03-01"));
  json j = settlement_to_json(settlement_of(all, "alice"));
  CHECK(j["er_total"] == "8.48");
  CHECK(j["er_join"] == "5.2");
  CHECK(j["earning_date"] == "2024-03-01");
  CHECK(j["episodes"].size() == 1);
}
