#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "platoon/decimal.hpp"
#include "platoon/domain.hpp"

namespace platoon {

enum class EventKind { Join, Leave, Merge, Split };
enum class SegmentKind { Formation, Join, Leave, Merge, Split };
enum class Role { Leader, Follower };
enum class EpisodeEnd { Leave, Split, MergeAbsorption, DayEnd };
enum class PlatoonEnd { Dissolved, Split, Merged, DayEnd };

std::string_view to_string(EventKind) noexcept;
std::string_view to_string(SegmentKind) noexcept;
std::string_view to_string(Role) noexcept;
std::string_view to_string(EpisodeEnd) noexcept;
std::string_view to_string(PlatoonEnd) noexcept;
std::optional<EventKind> event_kind_from(std::string_view) noexcept;
std::optional<SegmentKind> segment_kind_from(std::string_view) noexcept;
std::optional<Role> role_from(std::string_view) noexcept;
std::optional<EpisodeEnd> episode_end_from(std::string_view) noexcept;
std::optional<PlatoonEnd> platoon_end_from(std::string_view) noexcept;

/// Segments opened by these kinds feed the join component of the earnings;
/// Leave and Split segments feed the leave component.
constexpr bool in_join_partition(SegmentKind k) noexcept {
  return k == SegmentKind::Formation || k == SegmentKind::Join || k == SegmentKind::Merge;
}

struct JoinEvent {
  std::string vehicle_id;
  std::string platoon_id;
};
struct LeaveEvent {
  std::string vehicle_id;
};
struct MergeEvent {
  std::string platoon_a;  // survives, keeps its leader
  std::string platoon_b;  // absorbed behind platoon_a
};
struct SplitEvent {
  std::string platoon_id;
  std::size_t split_index = 0;  // vehicles [0, index) stay in front
};

struct ManeuverEvent {
  Decimal time;  // minutes since start of day
  std::variant<JoinEvent, LeaveEvent, MergeEvent, SplitEvent> payload;

  EventKind kind() const noexcept { return static_cast<EventKind>(payload.index()); }
};

struct InitialPlatoon {
  std::string id;  // empty: assigned "P<n>" in declaration order
  std::string leader_id;
  std::vector<std::string> follower_ids;
};

/// Interval of the day a driver is on the road. Defaults to the whole day.
struct RoadWindow {
  Decimal depart;
  std::optional<Decimal> arrive;
};

struct ScenarioSpec {
  std::vector<DriverProfile> drivers;
  std::map<std::string, RoadWindow> windows;
  Decimal day_length;     // minutes
  Decimal vehicle_speed;  // miles per minute, shared by every vehicle
  std::vector<InitialPlatoon> initial_platoons;
  std::vector<ManeuverEvent> events;
  EarningRateTable rate_table = EarningRateTable::defaults();
  Decimal delta = Decimal::parse("0.01");
  Decimal eta = Decimal(10);
  std::uint64_t seed = 0;

  /// Structural checks (ids, times, parameters). Feasibility of individual
  /// maneuvers and leader eligibility are checked by the simulator.
  void validate() const;

  const DriverProfile& driver(std::string_view id) const;
  const DriverProfile* find_driver(std::string_view id) const noexcept;
  Decimal depart_of(std::string_view id) const;
  Decimal arrive_of(std::string_view id) const;
};

struct StateSegment {
  std::size_t length = 0;  // L_i
  Decimal distance;        // d_i, miles
  SegmentKind initiating_kind = SegmentKind::Formation;
  std::size_t cars_changed = 0;  // vehicles that joined or left at the opening event
  Decimal start;                 // minutes
  Decimal end;
  std::vector<std::string> members;  // head first

  friend bool operator==(const StateSegment&, const StateSegment&) = default;
};

struct PlatoonRecord {
  std::string id;
  std::vector<StateSegment> segments;
  PlatoonEnd end = PlatoonEnd::DayEnd;
};

/// One contiguous membership of a driver in a platoon, as indices into that
/// platoon's segment list.
struct Membership {
  std::string platoon_id;
  Role role = Role::Follower;
  std::size_t first_segment = 0;
  std::size_t segment_count = 0;
  EpisodeEnd terminal = EpisodeEnd::DayEnd;
};

struct DriverTrace {
  std::string driver_id;
  Decimal d_out;
  std::vector<Membership> memberships;
};

struct PlatoonTrace {
  ScenarioSpec scenario;
  std::vector<PlatoonRecord> platoons;  // creation order
  std::vector<DriverTrace> drivers;     // scenario order

  const PlatoonRecord& platoon(std::string_view id) const;
  const DriverTrace& driver(std::string_view id) const;
};

struct DriverEpisode {
  std::string platoon_id;
  Role role = Role::Follower;
  std::vector<StateSegment> segments;
  std::size_t join_count = 0;   // j
  std::size_t leave_count = 0;  // l
  Decimal d_in;
  EpisodeEnd terminal_kind = EpisodeEnd::DayEnd;
};

/// Live simulation state. Time only moves forward; every maneuver closes the
/// current segment of each affected platoon.
class World {
 public:
  /// Forms the initial platoons at time 0.
  explicit World(ScenarioSpec scenario);

  /// Accrues distance up to `time`, then applies the maneuver.
  void apply(const ManeuverEvent& event);

  /// Runs to the end of the day and closes every open platoon and membership.
  PlatoonTrace finish() &&;

  const Decimal& now() const noexcept { return now_; }
  const ScenarioSpec& scenario() const noexcept { return scenario_; }
  std::vector<std::string> active_platoons() const;
  const std::vector<std::string>& members(std::string_view platoon_id) const;
  /// Platoon the vehicle is currently in, if any.
  std::optional<std::string> platoon_of(std::string_view vehicle_id) const;
  bool on_road(std::string_view vehicle_id, const Decimal& at) const;

 private:
  struct Active {
    std::size_t record;  // index into platoons_
    std::vector<std::string> members;
  };
  struct OpenMembership {
    std::size_t record;
    Role role;
    std::size_t first_segment;
  };

  void advance_to(const Decimal& time);
  void join(const JoinEvent& e);
  void leave(const LeaveEvent& e);
  void merge(const MergeEvent& e);
  void split(const SplitEvent& e);

  std::string next_platoon_id();
  std::string form(std::vector<std::string> members, SegmentKind kind, std::size_t cars_changed,
                   std::string id = {});
  void open_segment(Active& platoon, SegmentKind kind, std::size_t cars_changed);
  void end_platoon(const std::string& id, PlatoonEnd end, EpisodeEnd terminal);
  void close_membership(const std::string& driver, EpisodeEnd terminal);
  Active& active(std::string_view platoon_id, const char* what);
  std::size_t driver_index(std::string_view id) const;

  ScenarioSpec scenario_;
  Decimal now_;
  std::size_t id_counter_ = 1;
  std::vector<PlatoonRecord> platoons_;
  std::map<std::string, Active, std::less<>> active_;
  std::map<std::string, std::string, std::less<>> platoon_of_;  // vehicle -> platoon id
  std::vector<DriverTrace> drivers_;
  std::map<std::string, OpenMembership, std::less<>> open_;
};

/// Value-style single step: returns the world after `event`.
World apply_event(World world, const ManeuverEvent& event);

/// Validates and simulates a whole scenario.
PlatoonTrace run(const ScenarioSpec& scenario);

/// Human-readable per-platoon segment tables.
std::string format_segment_tables(const PlatoonTrace& trace);

/// Episodes of one driver in membership order, plus their out-of-platoon miles.
std::pair<std::vector<DriverEpisode>, Decimal> extract_episodes(const PlatoonTrace& trace,
                                                               std::string_view driver_id);

}  // namespace platoon
