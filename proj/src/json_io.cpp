#include "platoon/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "platoon/error.hpp"

namespace platoon {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::Validation, (path.empty() ? "/" : path) + ": " + msg);
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) bad(path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.contains(key)) bad(path + "/" + key, "unknown field");
  }
}

const json& required(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(path + "/" + key, "missing required field");
  return *it;
}

Decimal to_decimal(const json& j, const std::string& path) {
  try {
    if (j.is_string()) return Decimal::parse(j.get<std::string>());
    if (j.is_number_unsigned()) return Decimal(j.get<std::uint64_t>());
    if (j.is_number_integer()) return Decimal(j.get<std::int64_t>());
    if (j.is_number_float()) return Decimal::from_double(j.get<double>());
  } catch (const Error& e) {
    bad(path, e.what());
  }
  bad(path, "expected a number or decimal string");
}

std::string to_str(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

std::uint64_t to_count(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) bad(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::int64_t to_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<std::int64_t>();
}

Decimal opt_decimal(const json& j, const std::string& path, const char* key, Decimal fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : to_decimal(*it, path + "/" + key);
}

std::uint64_t opt_count(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? 0 : to_count(*it, path + "/" + key);
}

template <typename T, typename F>
T to_enum(const json& j, const std::string& path, F from) {
  if (auto v = from(to_str(j, path))) return *v;
  bad(path, "unrecognized value '" + j.get<std::string>() + "'");
}

ManeuverEvent event_from_json(const json& j, const std::string& p) {
  ManeuverEvent e;
  e.time = to_decimal(required(j, p, "time"), p + "/time");
  auto kind = to_enum<EventKind>(required(j, p, "kind"), p + "/kind", event_kind_from);
  switch (kind) {
    case EventKind::Join:
      only_keys(j, p, {"time", "kind", "vehicle_id", "platoon_id"});
      e.payload = JoinEvent{to_str(required(j, p, "vehicle_id"), p + "/vehicle_id"),
                            to_str(required(j, p, "platoon_id"), p + "/platoon_id")};
      break;
    case EventKind::Leave:
      only_keys(j, p, {"time", "kind", "vehicle_id"});
      e.payload = LeaveEvent{to_str(required(j, p, "vehicle_id"), p + "/vehicle_id")};
      break;
    case EventKind::Merge:
      only_keys(j, p, {"time", "kind", "platoon_a", "platoon_b"});
      e.payload = MergeEvent{to_str(required(j, p, "platoon_a"), p + "/platoon_a"),
                             to_str(required(j, p, "platoon_b"), p + "/platoon_b")};
      break;
    case EventKind::Split:
      only_keys(j, p, {"time", "kind", "platoon_id", "split_index"});
      e.payload = SplitEvent{to_str(required(j, p, "platoon_id"), p + "/platoon_id"),
                             static_cast<std::size_t>(to_count(required(j, p, "split_index"), p + "/split_index"))};
      break;
  }
  return e;
}

json event_to_json(const ManeuverEvent& e) {
  json j{{"time", e.time.str()}, {"kind", to_string(e.kind())}};
  std::visit(
      [&j](const auto& ev) {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, JoinEvent>) {
          j["vehicle_id"] = ev.vehicle_id;
          j["platoon_id"] = ev.platoon_id;
        } else if constexpr (std::is_same_v<T, LeaveEvent>) {
          j["vehicle_id"] = ev.vehicle_id;
        } else if constexpr (std::is_same_v<T, MergeEvent>) {
          j["platoon_a"] = ev.platoon_a;
          j["platoon_b"] = ev.platoon_b;
        } else {
          j["platoon_id"] = ev.platoon_id;
          j["split_index"] = ev.split_index;
        }
      },
      e.payload);
  return j;
}

}  // namespace

ScenarioSpec scenario_from_json(const json& j) {
  only_keys(j, "", {"drivers", "day_length", "vehicle_speed", "initial_platoons", "events", "rate_table", "delta",
                    "eta", "seed"});
  ScenarioSpec s;
  s.day_length = to_decimal(required(j, "", "day_length"), "/day_length");
  s.vehicle_speed = to_decimal(required(j, "", "vehicle_speed"), "/vehicle_speed");
  s.delta = opt_decimal(j, "", "delta", s.delta);
  s.eta = opt_decimal(j, "", "eta", s.eta);
  s.seed = opt_count(j, "", "seed");

  if (auto it = j.find("rate_table"); it != j.end()) {
    only_keys(*it, "/rate_table", {"1", "2", "3", "4", "5"});
    std::array<Decimal, 5> rates;
    for (int r = 1; r <= 5; ++r) {
      std::string key = std::to_string(r);
      rates[static_cast<std::size_t>(r - 1)] = to_decimal(required(*it, "/rate_table", key.c_str()), "/rate_table/" + key);
    }
    try {
      s.rate_table = EarningRateTable(rates);
    } catch (const Error& e) {
      bad("/rate_table", e.what());
    }
  }

  const json& drivers = required(j, "", "drivers");
  if (!drivers.is_array()) bad("/drivers", "expected an array");
  for (std::size_t i = 0; i < drivers.size(); ++i) {
    const json& d = drivers[i];
    std::string p = "/drivers/" + std::to_string(i);
    only_keys(d, p, {"driver_id", "rank", "prev_day_rate", "over_speed_count", "sharp_accel_count",
                     "sharp_decel_count", "depart", "arrive"});
    DriverProfile prof;
    prof.driver_id = to_str(required(d, p, "driver_id"), p + "/driver_id");
    try {
      prof.rank = Rank(static_cast<int>(to_int(required(d, p, "rank"), p + "/rank")));
    } catch (const Error& e) {
      bad(p + "/rank", e.what());
    }
    prof.prev_day_rate = opt_decimal(d, p, "prev_day_rate", s.rate_table.rate(prof.rank));
    prof.over_speed_count = opt_count(d, p, "over_speed_count");
    prof.sharp_accel_count = opt_count(d, p, "sharp_accel_count");
    prof.sharp_decel_count = opt_count(d, p, "sharp_decel_count");
    if (d.contains("depart") || d.contains("arrive")) {
      RoadWindow w;
      w.depart = opt_decimal(d, p, "depart", Decimal{});
      if (d.contains("arrive")) w.arrive = to_decimal(d["arrive"], p + "/arrive");
      s.windows[prof.driver_id] = w;
    }
    s.drivers.push_back(std::move(prof));
  }

  if (auto it = j.find("initial_platoons"); it != j.end()) {
    if (!it->is_array()) bad("/initial_platoons", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& ip = (*it)[i];
      std::string p = "/initial_platoons/" + std::to_string(i);
      only_keys(ip, p, {"id", "leader_id", "follower_ids"});
      InitialPlatoon plat;
      if (ip.contains("id")) plat.id = to_str(ip["id"], p + "/id");
      plat.leader_id = to_str(required(ip, p, "leader_id"), p + "/leader_id");
      const json& f = required(ip, p, "follower_ids");
      if (!f.is_array()) bad(p + "/follower_ids", "expected an array");
      for (std::size_t k = 0; k < f.size(); ++k) {
        plat.follower_ids.push_back(to_str(f[k], p + "/follower_ids/" + std::to_string(k)));
      }
      s.initial_platoons.push_back(std::move(plat));
    }
  }

  if (auto it = j.find("events"); it != j.end()) {
    if (!it->is_array()) bad("/events", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      s.events.push_back(event_from_json((*it)[i], "/events/" + std::to_string(i)));
    }
  }
  return s;
}

json scenario_to_json(const ScenarioSpec& s) {
  json drivers = json::array();
  for (const auto& d : s.drivers) {
    json jd{{"driver_id", d.driver_id},
            {"rank", d.rank.value()},
            {"prev_day_rate", d.prev_day_rate.str()},
            {"over_speed_count", d.over_speed_count},
            {"sharp_accel_count", d.sharp_accel_count},
            {"sharp_decel_count", d.sharp_decel_count}};
    if (auto it = s.windows.find(d.driver_id); it != s.windows.end()) {
      jd["depart"] = it->second.depart.str();
      if (it->second.arrive) jd["arrive"] = it->second.arrive->str();
    }
    drivers.push_back(std::move(jd));
  }
  json platoons = json::array();
  for (const auto& p : s.initial_platoons) {
    json jp{{"leader_id", p.leader_id}, {"follower_ids", p.follower_ids}};
    if (!p.id.empty()) jp["id"] = p.id;
    platoons.push_back(std::move(jp));
  }
  json events = json::array();
  for (const auto& e : s.events) events.push_back(event_to_json(e));
  json rates = json::object();
  for (int r = 1; r <= 5; ++r) rates[std::to_string(r)] = s.rate_table.rate(Rank(r)).str();
  return json{{"drivers", drivers},
              {"day_length", s.day_length.str()},
              {"vehicle_speed", s.vehicle_speed.str()},
              {"initial_platoons", platoons},
              {"events", events},
              {"rate_table", rates},
              {"delta", s.delta.str()},
              {"eta", s.eta.str()},
              {"seed", s.seed}};
}

json trace_to_json(const PlatoonTrace& t) {
  json platoons = json::array();
  for (const auto& p : t.platoons) {
    json segs = json::array();
    for (const auto& s : p.segments) {
      segs.push_back(json{{"length", s.length},
                          {"distance", s.distance.str()},
                          {"initiating_kind", to_string(s.initiating_kind)},
                          {"cars_changed", s.cars_changed},
                          {"start", s.start.str()},
                          {"end", s.end.str()},
                          {"members", s.members}});
    }
    platoons.push_back(json{{"id", p.id}, {"end", to_string(p.end)}, {"segments", segs}});
  }
  json drivers = json::array();
  for (const auto& d : t.drivers) {
    json ms = json::array();
    for (const auto& m : d.memberships) {
      ms.push_back(json{{"platoon_id", m.platoon_id},
                        {"role", to_string(m.role)},
                        {"first_segment", m.first_segment},
                        {"segment_count", m.segment_count},
                        {"terminal", to_string(m.terminal)}});
    }
    drivers.push_back(json{{"driver_id", d.driver_id}, {"d_out", d.d_out.str()}, {"memberships", ms}});
  }
  return json{{"format", "platoon-trace/1"},
              {"scenario", scenario_to_json(t.scenario)},
              {"platoons", platoons},
              {"drivers", drivers}};
}

PlatoonTrace trace_from_json(const json& j) {
  only_keys(j, "", {"format", "scenario", "platoons", "drivers"});
  if (to_str(required(j, "", "format"), "/format") != "platoon-trace/1") bad("/format", "unsupported trace format");
  PlatoonTrace t;
  t.scenario = scenario_from_json(required(j, "", "scenario"));
  t.scenario.validate();

  const json& platoons = required(j, "", "platoons");
  if (!platoons.is_array()) bad("/platoons", "expected an array");
  for (std::size_t i = 0; i < platoons.size(); ++i) {
    std::string p = "/platoons/" + std::to_string(i);
    const json& jp = platoons[i];
    only_keys(jp, p, {"id", "end", "segments"});
    PlatoonRecord rec;
    rec.id = to_str(required(jp, p, "id"), p + "/id");
    rec.end = to_enum<PlatoonEnd>(required(jp, p, "end"), p + "/end", platoon_end_from);
    const json& segs = required(jp, p, "segments");
    if (!segs.is_array()) bad(p + "/segments", "expected an array");
    for (std::size_t k = 0; k < segs.size(); ++k) {
      std::string sp = p + "/segments/" + std::to_string(k);
      const json& js = segs[k];
      only_keys(js, sp, {"length", "distance", "initiating_kind", "cars_changed", "start", "end", "members"});
      StateSegment s;
      s.length = static_cast<std::size_t>(to_count(required(js, sp, "length"), sp + "/length"));
      s.distance = to_decimal(required(js, sp, "distance"), sp + "/distance");
      s.initiating_kind = to_enum<SegmentKind>(required(js, sp, "initiating_kind"), sp + "/initiating_kind",
                                               segment_kind_from);
      s.cars_changed = static_cast<std::size_t>(to_count(required(js, sp, "cars_changed"), sp + "/cars_changed"));
      s.start = to_decimal(required(js, sp, "start"), sp + "/start");
      s.end = to_decimal(required(js, sp, "end"), sp + "/end");
      const json& members = required(js, sp, "members");
      if (!members.is_array()) bad(sp + "/members", "expected an array");
      for (std::size_t m = 0; m < members.size(); ++m) {
        s.members.push_back(to_str(members[m], sp + "/members/" + std::to_string(m)));
      }
      if (s.members.size() != s.length) bad(sp, "length does not match member count");
      if (s.length < 2 || s.distance.sign() < 0) bad(sp, "not a valid platoon state");
      rec.segments.push_back(std::move(s));
    }
    t.platoons.push_back(std::move(rec));
  }

  const json& drivers = required(j, "", "drivers");
  if (!drivers.is_array()) bad("/drivers", "expected an array");
  for (std::size_t i = 0; i < drivers.size(); ++i) {
    std::string p = "/drivers/" + std::to_string(i);
    const json& jd = drivers[i];
    only_keys(jd, p, {"driver_id", "d_out", "memberships"});
    DriverTrace d;
    d.driver_id = to_str(required(jd, p, "driver_id"), p + "/driver_id");
    if (!t.scenario.find_driver(d.driver_id)) bad(p + "/driver_id", "driver not in scenario");
    d.d_out = to_decimal(required(jd, p, "d_out"), p + "/d_out");
    if (d.d_out.sign() < 0) bad(p + "/d_out", "negative distance");
    const json& ms = required(jd, p, "memberships");
    if (!ms.is_array()) bad(p + "/memberships", "expected an array");
    for (std::size_t k = 0; k < ms.size(); ++k) {
      std::string mp = p + "/memberships/" + std::to_string(k);
      const json& jm = ms[k];
      only_keys(jm, mp, {"platoon_id", "role", "first_segment", "segment_count", "terminal"});
      Membership m;
      m.platoon_id = to_str(required(jm, mp, "platoon_id"), mp + "/platoon_id");
      m.role = to_enum<Role>(required(jm, mp, "role"), mp + "/role", role_from);
      m.first_segment = static_cast<std::size_t>(to_count(required(jm, mp, "first_segment"), mp + "/first_segment"));
      m.segment_count = static_cast<std::size_t>(to_count(required(jm, mp, "segment_count"), mp + "/segment_count"));
      m.terminal = to_enum<EpisodeEnd>(required(jm, mp, "terminal"), mp + "/terminal", episode_end_from);
      const PlatoonRecord* rec = nullptr;
      for (const auto& pr : t.platoons) {
        if (pr.id == m.platoon_id) rec = &pr;
      }
      if (!rec) bad(mp + "/platoon_id", "no such platoon in trace");
      if (m.segment_count == 0 || m.first_segment + m.segment_count > rec->segments.size()) {
        bad(mp, "segment range outside platoon");
      }
      d.memberships.push_back(std::move(m));
    }
    t.drivers.push_back(std::move(d));
  }
  return t;
}

json settlement_to_json(const Settlement& s) {
  json episodes = json::array();
  for (const auto& e : s.episodes) {
    episodes.push_back(json{{"platoon_id", e.platoon_id},
                            {"role", to_string(e.role)},
                            {"terminal", to_string(e.terminal)},
                            {"join_count", e.join_count},
                            {"leave_count", e.leave_count},
                            {"d_in", e.d_in.str()},
                            {"join_part", e.join_part.str()},
                            {"leave_part", e.leave_part.str()},
                            {"penalty", e.penalty.str()}});
  }
  return json{{"driver_id", s.driver_id},
              {"earning_date", s.earning_date.str()},
              {"prev_day_rate", s.prev_day_rate.str()},
              {"episode_count", s.episode_count},
              {"d_in", s.d_in.str()},
              {"d_out", s.d_out.str()},
              {"er_join", s.er_join.str()},
              {"er_leave", s.er_leave.str()},
              {"er_in", s.er_in.str()},
              {"er_out", s.er_out.str()},
              {"er_total", s.er_total.str()},
              {"penalty_total", s.penalty_total.str()},
              {"led_platoon", s.led_platoon},
              {"episodes", episodes}};
}

json record_to_json(const ledger::DriverRecord& r) {
  return json{{"driver_id", r.driver_id},
              {"current_earnings", r.current_earnings.str()},
              {"rank", r.rank.value()},
              {"over_speed_count", r.over_speed_count},
              {"distance_travelled", r.distance_travelled.str()},
              {"sharp_accel_count", r.sharp_accel_count},
              {"sharp_decel_count", r.sharp_decel_count},
              {"platoons_joined", r.platoons_joined},
              {"leader_activity", r.leader_activity},
              {"earning_date", r.earning_date.str()}};
}

json transaction_to_json(const ledger::Transaction& tx) {
  json j{{"kind", ledger::to_string(tx.kind)},
         {"submitter", tx.submitter},
         {"from", tx.from_account},
         {"to", tx.to_account},
         {"nonce", tx.nonce}};
  if (tx.amount) j["amount"] = json{{"base_units", tx.amount->base_units}, {"decimals", tx.amount->decimals}};
  if (tx.record) j["record"] = record_to_json(*tx.record);
  return j;
}

json block_to_json(const ledger::Block& b) {
  json txs = json::array();
  for (const auto& tx : b.transactions) txs.push_back(transaction_to_json(tx));
  return json{{"index", b.index},
              {"timestamp", b.timestamp},
              {"prev_hash", ledger::to_hex(b.prev_hash)},
              {"hash", ledger::to_hex(b.hash)},
              {"transactions", txs}};
}

json verify_result_to_json(const ledger::VerifyResult& v) {
  json j{{"ok", v.ok()}, {"blocks", v.blocks}};
  if (v.corruption) {
    j["corruption"] = json{{"block_index", v.corruption->block_index},
                           {"field", v.corruption->field},
                           {"detail", v.corruption->detail}};
  }
  return j;
}

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string msg = e.what();
    if (auto pos = msg.find("parse error"); pos != std::string::npos) msg = msg.substr(pos);
    throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg);
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "write to '" + path.string() + "' failed");
}

}  // namespace platoon
