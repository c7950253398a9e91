#include "platoon/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "platoon/error.hpp"

namespace platoon {

std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::Join: return "Join";
    case EventKind::Leave: return "Leave";
    case EventKind::Merge: return "Merge";
    case EventKind::Split: return "Split";
  }
  return "?";
}

std::string_view to_string(SegmentKind k) noexcept {
  switch (k) {
    case SegmentKind::Formation: return "Formation";
    case SegmentKind::Join: return "Join";
    case SegmentKind::Leave: return "Leave";
    case SegmentKind::Merge: return "Merge";
    case SegmentKind::Split: return "Split";
  }
  return "?";
}

std::string_view to_string(Role r) noexcept { return r == Role::Leader ? "Leader" : "Follower"; }

std::string_view to_string(EpisodeEnd e) noexcept {
  switch (e) {
    case EpisodeEnd::Leave: return "Leave";
    case EpisodeEnd::Split: return "Split";
    case EpisodeEnd::MergeAbsorption: return "MergeAbsorption";
    case EpisodeEnd::DayEnd: return "DayEnd";
  }
  return "?";
}

std::string_view to_string(PlatoonEnd e) noexcept {
  switch (e) {
    case PlatoonEnd::Dissolved: return "Dissolved";
    case PlatoonEnd::Split: return "Split";
    case PlatoonEnd::Merged: return "Merged";
    case PlatoonEnd::DayEnd: return "DayEnd";
  }
  return "?";
}

namespace {
template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view name, const Enum (&values)[N]) noexcept {
  for (Enum v : values) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}
}  // namespace

std::optional<EventKind> event_kind_from(std::string_view s) noexcept {
  static constexpr EventKind all[] = {EventKind::Join, EventKind::Leave, EventKind::Merge, EventKind::Split};
  return lookup(s, all);
}
std::optional<SegmentKind> segment_kind_from(std::string_view s) noexcept {
  static constexpr SegmentKind all[] = {SegmentKind::Formation, SegmentKind::Join, SegmentKind::Leave,
                                        SegmentKind::Merge, SegmentKind::Split};
  return lookup(s, all);
}
std::optional<Role> role_from(std::string_view s) noexcept {
  static constexpr Role all[] = {Role::Leader, Role::Follower};
  return lookup(s, all);
}
std::optional<EpisodeEnd> episode_end_from(std::string_view s) noexcept {
  static constexpr EpisodeEnd all[] = {EpisodeEnd::Leave, EpisodeEnd::Split, EpisodeEnd::MergeAbsorption,
                                       EpisodeEnd::DayEnd};
  return lookup(s, all);
}
std::optional<PlatoonEnd> platoon_end_from(std::string_view s) noexcept {
  static constexpr PlatoonEnd all[] = {PlatoonEnd::Dissolved, PlatoonEnd::Split, PlatoonEnd::Merged,
                                       PlatoonEnd::DayEnd};
  return lookup(s, all);
}

// ---------------------------------------------------------------------------
// ScenarioSpec

namespace {
[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::Validation, msg); }
[[noreturn]] void infeasible(const std::string& msg) { throw Error(ErrorCode::InfeasibleEvent, msg); }
}  // namespace

const DriverProfile* ScenarioSpec::find_driver(std::string_view id) const noexcept {
  for (const auto& d : drivers) {
    if (d.driver_id == id) return &d;
  }
  return nullptr;
}

const DriverProfile& ScenarioSpec::driver(std::string_view id) const {
  if (const auto* d = find_driver(id)) return *d;
  throw Error(ErrorCode::UnknownDriver, "unknown driver '" + std::string(id) + "'");
}

Decimal ScenarioSpec::depart_of(std::string_view id) const {
  auto it = windows.find(std::string(id));
  return it == windows.end() ? Decimal{} : it->second.depart;
}

Decimal ScenarioSpec::arrive_of(std::string_view id) const {
  auto it = windows.find(std::string(id));
  return it == windows.end() || !it->second.arrive ? day_length : *it->second.arrive;
}

void ScenarioSpec::validate() const {
  if (day_length.sign() <= 0) invalid("day_length must be positive");
  if (vehicle_speed.sign() <= 0) invalid("vehicle_speed must be positive");
  if (delta.sign() <= 0) invalid("delta must be positive");
  if (eta.sign() <= 0) invalid("eta must be positive");

  std::set<std::string, std::less<>> ids;
  for (const auto& d : drivers) {
    d.validate();
    if (!ids.insert(d.driver_id).second) invalid("duplicate driver_id '" + d.driver_id + "'");
  }
  auto known = [&](const std::string& id, const std::string& where) {
    if (!ids.contains(id)) invalid(where + " references unknown vehicle '" + id + "'");
  };

  for (const auto& [id, w] : windows) {
    known(id, "road window");
    Decimal arrive = w.arrive.value_or(day_length);
    if (w.depart.sign() < 0 || arrive > day_length || !(w.depart < arrive)) {
      invalid("road window of '" + id + "' must satisfy 0 <= depart < arrive <= day_length");
    }
  }

  std::set<std::string, std::less<>> placed, platoon_ids;
  for (std::size_t i = 0; i < initial_platoons.size(); ++i) {
    const auto& p = initial_platoons[i];
    std::string where = "initial_platoons[" + std::to_string(i) + "]";
    if (p.follower_ids.empty()) invalid(where + " needs at least one follower");
    if (!p.id.empty() && !platoon_ids.insert(p.id).second) invalid(where + " reuses platoon id '" + p.id + "'");
    known(p.leader_id, where);
    if (!placed.insert(p.leader_id).second) invalid(where + ": vehicle '" + p.leader_id + "' already placed");
    for (const auto& f : p.follower_ids) {
      known(f, where);
      if (!placed.insert(f).second) invalid(where + ": vehicle '" + f + "' already placed");
    }
  }

  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    std::string where = "events[" + std::to_string(i) + "]";
    if (e.time.sign() < 0 || e.time > day_length) invalid(where + " time outside [0, day_length]");
    if (i > 0 && !(events[i - 1].time < e.time)) invalid(where + " time not strictly increasing");
    if (const auto* j = std::get_if<JoinEvent>(&e.payload)) known(j->vehicle_id, where);
    if (const auto* l = std::get_if<LeaveEvent>(&e.payload)) known(l->vehicle_id, where);
    if (const auto* s = std::get_if<SplitEvent>(&e.payload); s && s->split_index < 1) {
      invalid(where + " split_index must be at least 1");
    }
  }
}

const PlatoonRecord& PlatoonTrace::platoon(std::string_view id) const {
  for (const auto& p : platoons) {
    if (p.id == id) return p;
  }
  throw Error(ErrorCode::Validation, "trace has no platoon '" + std::string(id) + "'");
}

const DriverTrace& PlatoonTrace::driver(std::string_view id) const {
  for (const auto& d : drivers) {
    if (d.driver_id == id) return d;
  }
  throw Error(ErrorCode::UnknownDriver, "trace has no driver '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------
// World

World::World(ScenarioSpec scenario) : scenario_(std::move(scenario)) {
  scenario_.validate();
  for (const auto& d : scenario_.drivers) drivers_.push_back(DriverTrace{d.driver_id, Decimal{}, {}});

  std::set<std::string> reserved;
  for (const auto& p : scenario_.initial_platoons) {
    if (!p.id.empty()) reserved.insert(p.id);
  }
  for (const auto& p : scenario_.initial_platoons) {
    std::vector<std::string> members{p.leader_id};
    members.insert(members.end(), p.follower_ids.begin(), p.follower_ids.end());
    for (const auto& m : members) {
      if (!on_road(m, Decimal{})) infeasible("vehicle '" + m + "' is not on the road at formation");
    }
    if (!leader_eligible(scenario_.driver(p.leader_id).rank)) {
      throw Error(ErrorCode::IneligibleLeader, "driver '" + p.leader_id + "' (rank " +
                                                   std::to_string(scenario_.driver(p.leader_id).rank.value()) +
                                                   ") cannot lead a platoon");
    }
    std::string id = p.id;
    if (id.empty()) {
      do {
        id = next_platoon_id();
      } while (reserved.contains(id));
    }
    form(std::move(members), SegmentKind::Formation, 0, id);
  }
}

std::string World::next_platoon_id() {
  for (;;) {
    std::string id = "P" + std::to_string(id_counter_++);
    bool used = std::any_of(platoons_.begin(), platoons_.end(), [&](const auto& p) { return p.id == id; }) ||
                std::any_of(scenario_.initial_platoons.begin(), scenario_.initial_platoons.end(),
                            [&](const auto& p) { return p.id == id; });
    if (!used) return id;
  }
}

std::size_t World::driver_index(std::string_view id) const {
  for (std::size_t i = 0; i < drivers_.size(); ++i) {
    if (drivers_[i].driver_id == id) return i;
  }
  throw Error(ErrorCode::UnknownDriver, "unknown vehicle '" + std::string(id) + "'");
}

bool World::on_road(std::string_view vehicle_id, const Decimal& at) const {
  scenario_.driver(vehicle_id);
  return scenario_.depart_of(vehicle_id) <= at && at < scenario_.arrive_of(vehicle_id);
}

std::vector<std::string> World::active_platoons() const {
  std::vector<std::string> ids;
  for (const auto& [id, _] : active_) ids.push_back(id);
  return ids;
}

const std::vector<std::string>& World::members(std::string_view platoon_id) const {
  auto it = active_.find(platoon_id);
  if (it == active_.end()) infeasible("no active platoon '" + std::string(platoon_id) + "'");
  return it->second.members;
}

std::optional<std::string> World::platoon_of(std::string_view vehicle_id) const {
  auto it = platoon_of_.find(vehicle_id);
  if (it == platoon_of_.end()) return std::nullopt;
  return it->second;
}

World::Active& World::active(std::string_view platoon_id, const char* what) {
  auto it = active_.find(platoon_id);
  if (it == active_.end()) infeasible(std::string(what) + " targets nonexistent platoon '" + std::string(platoon_id) + "'");
  return it->second;
}

void World::open_segment(Active& platoon, SegmentKind kind, std::size_t cars_changed) {
  platoons_[platoon.record].segments.push_back(
      StateSegment{platoon.members.size(), Decimal{}, kind, cars_changed, now_, now_, platoon.members});
}

std::string World::form(std::vector<std::string> members, SegmentKind kind, std::size_t cars_changed,
                        std::string id) {
  if (id.empty()) id = next_platoon_id();
  platoons_.push_back(PlatoonRecord{id, {}, PlatoonEnd::DayEnd});
  Active& a = active_.emplace(id, Active{platoons_.size() - 1, std::move(members)}).first->second;
  open_segment(a, kind, cars_changed);
  for (std::size_t i = 0; i < a.members.size(); ++i) {
    platoon_of_[a.members[i]] = id;
    open_[a.members[i]] = OpenMembership{a.record, i == 0 ? Role::Leader : Role::Follower, 0};
  }
  return id;
}

void World::close_membership(const std::string& driver, EpisodeEnd terminal) {
  auto it = open_.find(driver);
  const OpenMembership& o = it->second;
  const PlatoonRecord& rec = platoons_[o.record];
  drivers_[driver_index(driver)].memberships.push_back(
      Membership{rec.id, o.role, o.first_segment, rec.segments.size() - o.first_segment, terminal});
  open_.erase(it);
  platoon_of_.erase(platoon_of_.find(driver));
}

void World::end_platoon(const std::string& id, PlatoonEnd end, EpisodeEnd terminal) {
  auto it = active_.find(id);
  platoons_[it->second.record].end = end;
  for (const auto& m : it->second.members) close_membership(m, terminal);
  active_.erase(it);
}

void World::advance_to(const Decimal& time) {
  if (time < now_) infeasible("event at " + time.str() + " precedes current time " + now_.str());
  if (time > scenario_.day_length) infeasible("event at " + time.str() + " is after the end of the day");
  const Decimal distance = scenario_.vehicle_speed * (time - now_);

  for (auto& [id, a] : active_) {
    for (const auto& m : a.members) {
      if (scenario_.depart_of(m) > now_ || scenario_.arrive_of(m) < time) {
        infeasible("vehicle '" + m + "' leaves the road at " + scenario_.arrive_of(m).str() +
                   " while still in platoon '" + id + "'");
      }
    }
    auto& seg = platoons_[a.record].segments.back();
    seg.distance += distance;
    seg.end = time;
  }
  for (auto& d : drivers_) {
    if (platoon_of_.contains(d.driver_id)) continue;
    Decimal from = std::max(now_, scenario_.depart_of(d.driver_id));
    Decimal to = std::min(time, scenario_.arrive_of(d.driver_id));
    if (from < to) d.d_out += scenario_.vehicle_speed * (to - from);
  }
  now_ = time;
}

void World::join(const JoinEvent& e) {
  if (!on_road(e.vehicle_id, now_)) infeasible("vehicle '" + e.vehicle_id + "' is not on the road at " + now_.str());
  if (auto p = platoon_of(e.vehicle_id)) infeasible("vehicle '" + e.vehicle_id + "' is already in platoon '" + *p + "'");
  Active& a = active(e.platoon_id, "join");
  a.members.push_back(e.vehicle_id);
  open_segment(a, SegmentKind::Join, 1);
  platoon_of_[e.vehicle_id] = e.platoon_id;
  open_[e.vehicle_id] = OpenMembership{a.record, Role::Follower, platoons_[a.record].segments.size() - 1};
}

void World::leave(const LeaveEvent& e) {
  auto p = platoon_of(e.vehicle_id);
  if (!p) infeasible("leave by '" + e.vehicle_id + "', which is not in any platoon");
  Active& a = active(*p, "leave");
  if (a.members.front() == e.vehicle_id && a.members.size() > 2) {
    infeasible("leader '" + e.vehicle_id + "' cannot leave platoon '" + *p + "' while it has several followers");
  }
  a.members.erase(std::find(a.members.begin(), a.members.end(), e.vehicle_id));
  close_membership(e.vehicle_id, EpisodeEnd::Leave);
  if (a.members.size() < 2) {
    end_platoon(*p, PlatoonEnd::Dissolved, EpisodeEnd::Leave);
  } else {
    open_segment(a, SegmentKind::Leave, 1);
  }
}

void World::merge(const MergeEvent& e) {
  if (e.platoon_a == e.platoon_b) infeasible("platoon '" + e.platoon_a + "' cannot merge with itself");
  Active& a = active(e.platoon_a, "merge");
  std::vector<std::string> absorbed = active(e.platoon_b, "merge").members;
  end_platoon(e.platoon_b, PlatoonEnd::Merged, EpisodeEnd::MergeAbsorption);
  a.members.insert(a.members.end(), absorbed.begin(), absorbed.end());
  open_segment(a, SegmentKind::Merge, absorbed.size());
  std::size_t seg = platoons_[a.record].segments.size() - 1;
  for (const auto& m : absorbed) {
    platoon_of_[m] = e.platoon_a;
    open_[m] = OpenMembership{a.record, Role::Follower, seg};
  }
}

void World::split(const SplitEvent& e) {
  Active& a = active(e.platoon_id, "split");
  const std::size_t n = a.members.size();
  if (e.split_index < 1 || e.split_index >= n) {
    infeasible("split index " + std::to_string(e.split_index) + " does not leave a vehicle on each side of a " +
               std::to_string(n) + "-car platoon");
  }
  std::vector<std::string> front(a.members.begin(), a.members.begin() + static_cast<std::ptrdiff_t>(e.split_index));
  std::vector<std::string> back(a.members.begin() + static_cast<std::ptrdiff_t>(e.split_index), a.members.end());
  if (back.size() >= 2 && !leader_eligible(scenario_.driver(back.front()).rank)) {
    throw Error(ErrorCode::IneligibleLeader, "split would make driver '" + back.front() + "' (rank " +
                                                 std::to_string(scenario_.driver(back.front()).rank.value()) +
                                                 ") a platoon leader");
  }
  end_platoon(e.platoon_id, PlatoonEnd::Split, EpisodeEnd::Split);
  const std::size_t front_size = front.size(), back_size = back.size();
  if (front_size >= 2) form(std::move(front), SegmentKind::Split, back_size);
  if (back_size >= 2) form(std::move(back), SegmentKind::Split, front_size);
}

void World::apply(const ManeuverEvent& event) {
  advance_to(event.time);
  std::visit(
      [this](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, JoinEvent>) join(e);
        else if constexpr (std::is_same_v<T, LeaveEvent>) leave(e);
        else if constexpr (std::is_same_v<T, MergeEvent>) merge(e);
        else split(e);
      },
      event.payload);
}

PlatoonTrace World::finish() && {
  advance_to(scenario_.day_length);
  for (const auto& id : active_platoons()) end_platoon(id, PlatoonEnd::DayEnd, EpisodeEnd::DayEnd);
  return PlatoonTrace{std::move(scenario_), std::move(platoons_), std::move(drivers_)};
}

World apply_event(World world, const ManeuverEvent& event) {
  world.apply(event);
  return world;
}

PlatoonTrace run(const ScenarioSpec& scenario) {
  World world(scenario);
  for (const auto& e : scenario.events) world.apply(e);
  return std::move(world).finish();
}

std::pair<std::vector<DriverEpisode>, Decimal> extract_episodes(const PlatoonTrace& trace, std::string_view driver_id) {
  const DriverTrace& dt = trace.driver(driver_id);
  std::vector<DriverEpisode> episodes;
  for (const auto& m : dt.memberships) {
    const PlatoonRecord& rec = trace.platoon(m.platoon_id);
    if (m.first_segment + m.segment_count > rec.segments.size()) {
      throw Error(ErrorCode::Validation, "membership of '" + dt.driver_id + "' exceeds platoon '" + rec.id + "'");
    }
    DriverEpisode ep;
    ep.platoon_id = m.platoon_id;
    ep.role = m.role;
    ep.terminal_kind = m.terminal;
    auto first = rec.segments.begin() + static_cast<std::ptrdiff_t>(m.first_segment);
    ep.segments.assign(first, first + static_cast<std::ptrdiff_t>(m.segment_count));
    for (const auto& s : ep.segments) {
      ep.d_in += s.distance;
      (in_join_partition(s.initiating_kind) ? ep.join_count : ep.leave_count) += s.cars_changed;
    }
    episodes.push_back(std::move(ep));
  }
  return {std::move(episodes), dt.d_out};
}

std::string format_segment_tables(const PlatoonTrace& trace) {
  std::string out;
  char line[256];
  for (const auto& p : trace.platoons) {
    std::snprintf(line, sizeof line, "platoon %s (%zu states, ended by %s)\n", p.id.c_str(), p.segments.size(),
                  std::string(to_string(p.end)).c_str());
    out += line;
    std::snprintf(line, sizeof line, "  %3s %-10s %3s %10s %10s %10s  %s\n", "#", "kind", "L", "distance", "start",
                  "end", "members");
    out += line;
    for (std::size_t i = 0; i < p.segments.size(); ++i) {
      const auto& s = p.segments[i];
      std::string members;
      for (const auto& m : s.members) members += (members.empty() ? "" : ",") + m;
      std::snprintf(line, sizeof line, "  %3zu %-10s %3zu %10s %10s %10s  %s\n", i + 1,
                    std::string(to_string(s.initiating_kind)).c_str(), s.length, s.distance.str().c_str(),
                    s.start.str().c_str(), s.end.str().c_str(), members.c_str());
      out += line;
    }
  }
  if (trace.platoons.empty()) out += "no platoons\n";
  return out;
}

}  // namespace platoon
