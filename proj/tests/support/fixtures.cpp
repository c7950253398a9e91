#include "fixtures.hpp"

#include <atomic>
#include <random>
#include <stdexcept>

namespace platoon::testing {

DriverProfile driver(std::string id, int rank, const char* prev_rate) {
  DriverProfile d;
  d.driver_id = std::move(id);
  d.rank = Rank(rank);
  d.prev_day_rate = prev_rate ? Decimal::parse(prev_rate) : EarningRateTable::defaults().rate(d.rank);
  return d;
}

ManeuverEvent join_at(const char* t, std::string vehicle, std::string platoon) {
  return {D(t), JoinEvent{std::move(vehicle), std::move(platoon)}};
}
ManeuverEvent leave_at(const char* t, std::string vehicle) { return {D(t), LeaveEvent{std::move(vehicle)}}; }
ManeuverEvent merge_at(const char* t, std::string a, std::string b) {
  return {D(t), MergeEvent{std::move(a), std::move(b)}};
}
ManeuverEvent split_at(const char* t, std::string platoon, std::size_t index) {
  return {D(t), SplitEvent{std::move(platoon), index}};
}

ScenarioSpec canonical_scenario() {
  ScenarioSpec s;
  s.day_length = Decimal(39);
  s.vehicle_speed = Decimal(1);
  s.drivers = {driver("alice", 5, "0.12"), driver("bob", 2), driver("carol", 2, "0.03")};
  s.windows["carol"] = RoadWindow{Decimal{}, Decimal(19)};
  s.initial_platoons = {InitialPlatoon{"P1", "alice", {"carol"}}};
  s.events = {join_at("5", "bob", "P1"), leave_at("15", "bob"), leave_at("19", "carol")};
  return s;
}

const Settlement& settlement_of(const std::vector<Settlement>& all, std::string_view id) {
  for (const auto& s : all) {
    if (s.driver_id == id) return s;
  }
  throw std::out_of_range("no settlement for " + std::string(id));
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("platoon-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace platoon::testing
