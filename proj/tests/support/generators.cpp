#include "generators.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "platoon/error.hpp"

namespace platoon::testing {
namespace {

std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(v.size()) - 1))];
}

std::string car_name(std::size_t i) { return "car" + std::to_string(i + 1); }

const Decimal kSpeeds[] = {Decimal(1), Decimal::parse("0.5"), Decimal::parse("0.75"), Decimal::parse("1.25"),
                           Decimal(2)};

// Earliest arrival among vehicles currently inside a platoon.
std::optional<Decimal> pending_arrival(const World& w) {
  std::optional<Decimal> earliest;
  for (const auto& id : w.active_platoons()) {
    for (const auto& m : w.members(id)) {
      Decimal a = w.scenario().arrive_of(m);
      if (a < w.scenario().day_length && (!earliest || a < *earliest)) earliest = a;
    }
  }
  return earliest;
}

std::size_t pending_count(const World& w) {
  std::size_t n = 0;
  for (const auto& id : w.active_platoons()) {
    for (const auto& m : w.members(id)) n += w.scenario().arrive_of(m) < w.scenario().day_length;
  }
  return n;
}

std::optional<std::string> member_arriving_by(const World& w, const Decimal& t) {
  for (const auto& id : w.active_platoons()) {
    for (const auto& m : w.members(id)) {
      if (w.scenario().arrive_of(m) <= t && w.scenario().arrive_of(m) < w.scenario().day_length) return m;
    }
  }
  return std::nullopt;
}

std::optional<ManeuverEvent> candidate(std::mt19937_64& rng, const World& w, const Decimal& t,
                                       const ScenarioShape& shape) {
  const ScenarioSpec& sc = w.scenario();
  std::vector<std::string> platoons = w.active_platoons();
  std::vector<std::string> solo;
  for (const auto& d : sc.drivers) {
    if (!w.platoon_of(d.driver_id) && w.on_road(d.driver_id, t)) solo.push_back(d.driver_id);
  }
  std::vector<int> kinds;
  if (!platoons.empty() && !solo.empty()) kinds.insert(kinds.end(), {0, 0, 0});
  if (!platoons.empty()) kinds.insert(kinds.end(), {1, 1, 1});
  if (shape.allow_merge && platoons.size() >= 2) kinds.push_back(2);
  if (shape.allow_split && !platoons.empty()) kinds.push_back(3);
  if (kinds.empty()) return std::nullopt;

  ManeuverEvent e{t, {}};
  switch (pick(rng, kinds)) {
    case 0:
      e.payload = JoinEvent{pick(rng, solo), pick(rng, platoons)};
      break;
    case 1: {
      const auto& members = w.members(pick(rng, platoons));
      std::size_t lo = members.size() == 2 ? 0 : 1;
      auto i = static_cast<std::size_t>(uniform(rng, static_cast<std::int64_t>(lo),
                                                 static_cast<std::int64_t>(members.size()) - 1));
      e.payload = LeaveEvent{members[i]};
      break;
    }
    case 2: {
      std::string a = pick(rng, platoons), b = pick(rng, platoons);
      if (a == b) return std::nullopt;
      e.payload = MergeEvent{a, b};
      break;
    }
    default: {
      std::string id = pick(rng, platoons);
      auto n = static_cast<std::int64_t>(w.members(id).size());
      e.payload = SplitEvent{id, static_cast<std::size_t>(uniform(rng, 1, n - 1))};
      break;
    }
  }
  return e;
}

}  // namespace

Decimal random_decimal(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi, int places) {
  std::int64_t scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  return Decimal::from_parts(uniform(rng, lo * scale, hi * scale), places);
}

ScenarioSpec random_scenario(std::mt19937_64& rng, const ScenarioShape& shape) {
  ScenarioSpec sc;
  sc.seed = rng();
  sc.day_length = Decimal(uniform(rng, 20, 180));
  sc.vehicle_speed = kSpeeds[uniform(rng, 0, 4)];
  if (chance(rng, 0.3)) sc.delta = Decimal::parse(chance(rng, 0.5) ? "0.02" : "0.005");
  if (chance(rng, 0.3)) sc.eta = Decimal(uniform(rng, 1, 40));

  const auto n = static_cast<std::size_t>(
      uniform(rng, static_cast<std::int64_t>(shape.min_cars), static_cast<std::int64_t>(shape.max_cars)));
  for (std::size_t i = 0; i < n; ++i) {
    DriverProfile d;
    d.driver_id = car_name(i);
    d.rank = Rank(static_cast<int>(uniform(rng, 1, 5)));
    d.prev_day_rate = chance(rng, 0.7) ? sc.rate_table.rate(d.rank) : random_decimal(rng, 0, 1, 3);
    d.over_speed_count = static_cast<std::uint64_t>(uniform(rng, 0, 5));
    d.sharp_accel_count = static_cast<std::uint64_t>(uniform(rng, 0, 5));
    d.sharp_decel_count = static_cast<std::uint64_t>(uniform(rng, 0, 5));
    sc.drivers.push_back(d);
  }
  // Followers only: leaders must stay on the road until they leave.
  if (shape.short_windows) {
    for (const auto& d : sc.drivers) {
      if (leader_eligible(d.rank) || !chance(rng, 0.3)) continue;
      RoadWindow w;
      if (chance(rng, 0.5)) w.depart = random_decimal(rng, 1, 10, 1);
      // The per-driver offset keeps arrival times distinct.
      if (chance(rng, 0.7)) {
        w.arrive = sc.day_length - random_decimal(rng, 1, 10, 1) - Decimal::from_parts(sc.windows.size() + 1, 3);
      }
      sc.windows[d.driver_id] = w;
    }
  }

  // Initial platoons: eligible leaders with a few followers on the road at 0.
  std::vector<std::string> free;
  for (const auto& d : sc.drivers) {
    if (sc.depart_of(d.driver_id).sign() == 0) free.push_back(d.driver_id);
  }
  std::shuffle(free.begin(), free.end(), rng);
  std::vector<std::string> leaders, followers;
  for (const auto& id : free) (leader_eligible(sc.driver(id).rank) ? leaders : followers).push_back(id);
  for (const auto& lead : leaders) {
    if (followers.empty() || chance(rng, 0.3)) {
      followers.push_back(lead);
      continue;
    }
    InitialPlatoon p;
    p.leader_id = lead;
    if (chance(rng, 0.5)) p.id = "P" + std::to_string(sc.initial_platoons.size() + 1);
    auto take = static_cast<std::size_t>(uniform(rng, 1, static_cast<std::int64_t>(followers.size())));
    p.follower_ids.assign(followers.end() - static_cast<std::ptrdiff_t>(take), followers.end());
    followers.resize(followers.size() - take);
    sc.initial_platoons.push_back(p);
  }

  World world(sc);
  const auto max_events = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(shape.max_events)));
  std::vector<ManeuverEvent> events;
  for (std::size_t attempt = 0; events.size() < shape.max_events && attempt < 60; ++attempt) {
    const Decimal hundredth = Decimal::parse("0.01");
    Decimal limit = sc.day_length;
    if (auto a = pending_arrival(world)) limit = std::min(limit, *a);
    if (!(world.now() + hundredth <= limit)) break;
    Decimal span = limit - world.now();
    // Step in hundredths of a minute, at most a third of the remaining span.
    auto max_steps = static_cast<std::int64_t>(span.round_half_even(2) / 3);
    Decimal t = world.now() + Decimal::from_parts(uniform(rng, 1, std::max<std::int64_t>(1, max_steps)), 2);
    if (limit < t) t = limit;

    std::optional<ManeuverEvent> e;
    if (auto forced = member_arriving_by(world, t)) {
      e = ManeuverEvent{t, LeaveEvent{*forced}};
    } else if (events.size() < max_events) {
      e = candidate(rng, world, t, shape);
    } else {
      break;
    }
    if (!e) continue;
    try {
      World next = world;
      next.apply(*e);
      // Leave room for the departures forced by early arrivals.
      if (events.size() + 1 + pending_count(next) > shape.max_events) continue;
      world = std::move(next);
      events.push_back(*e);
    } catch (const Error&) {
    }
  }
  // Anyone still in a platoon with an early arrival must leave before it.
  while (auto a = pending_arrival(world)) {
    auto who = member_arriving_by(world, *a);
    ManeuverEvent e{*a, LeaveEvent{*who}};
    world.apply(e);
    events.push_back(e);
  }
  sc.events = std::move(events);
  return sc;
}

DominanceCase random_dominance_case(std::mt19937_64& rng) {
  for (;;) {
    ScenarioSpec sc;
    sc.seed = rng();
    sc.day_length = Decimal(uniform(rng, 30, 240));
    sc.vehicle_speed = kSpeeds[uniform(rng, 0, 4)];
    // Equal prior-day rate for every driver, drawn from the leader-eligible table rates.
    const Decimal er = sc.rate_table.rate(Rank(static_cast<int>(uniform(rng, 4, 5))));
    for (std::size_t i = 0; i < 6; ++i) {
      DriverProfile d;
      d.driver_id = car_name(i);
      d.rank = Rank(i == 0 ? static_cast<int>(uniform(rng, 4, 5)) : static_cast<int>(uniform(rng, 1, 5)));
      d.prev_day_rate = er;
      sc.drivers.push_back(d);
    }
    InitialPlatoon p{"P1", "car1", {"car2"}};
    std::vector<std::string> outside;
    for (std::size_t i = 2; i < 6; ++i) {
      if (chance(rng, 0.4)) {
        p.follower_ids.push_back(car_name(i));
      } else {
        outside.push_back(car_name(i));
      }
    }
    sc.initial_platoons.push_back(p);

    World world(sc);
    std::vector<ManeuverEvent> events;
    bool joined = false, left = false;
    const auto target = static_cast<std::size_t>(uniform(rng, 2, 10));
    for (std::size_t attempt = 0; events.size() < target && attempt < 40; ++attempt) {
      Decimal span = sc.day_length - world.now();
      auto max_steps = static_cast<std::int64_t>(span.round_half_even(2) / 3);
      if (max_steps < 1) break;
      Decimal t = world.now() + Decimal::from_parts(uniform(rng, 1, max_steps), 2);
      const auto& members = world.members("P1");
      std::vector<std::string> leavers(members.begin() + 2, members.end());
      ManeuverEvent e{t, {}};
      bool want_join = !outside.empty() && (leavers.empty() || chance(rng, 0.5));
      if (want_join) {
        std::size_t i = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(outside.size()) - 1));
        e.payload = JoinEvent{outside[i], "P1"};
        outside.erase(outside.begin() + static_cast<std::ptrdiff_t>(i));
        joined = true;
      } else if (!leavers.empty()) {
        std::string who = pick(rng, leavers);
        e.payload = LeaveEvent{who};
        outside.push_back(who);
        left = true;
      } else {
        break;
      }
      world.apply(e);
      events.push_back(e);
    }
    if (!joined || !left) continue;
    sc.events = std::move(events);
    return DominanceCase{std::move(sc), "car1", "car2"};
  }
}

std::vector<std::vector<ledger::Transaction>> random_transaction_blocks(std::mt19937_64& rng, std::size_t blocks) {
  using ledger::Transaction;
  using ledger::TxKind;
  const std::vector<std::string> accounts{std::string(ledger::kTokenAuthority), std::string(ledger::kDriverRecord),
                                          "wallet/a", "wallet/b", "wallet/c", "nobody"};
  auto amount = [&](std::int64_t hi) {
    return TokenAmount{static_cast<std::uint64_t>(uniform(rng, 0, hi)), 2};
  };
  std::vector<std::vector<Transaction>> out;
  for (std::size_t b = 0; b < blocks; ++b) {
    std::vector<Transaction> txs;
    const auto n = uniform(rng, 1, 5);
    for (std::int64_t i = 0; i < n; ++i) {
      Transaction tx;
      switch (uniform(rng, 0, 3)) {
        case 0:
          tx.kind = TxKind::Mint;
          tx.submitter = chance(rng, 0.8) ? std::string(ledger::kTokenAuthority) : pick(rng, accounts);
          tx.to_account = tx.submitter;
          tx.amount = amount(1'000'000'00);
          break;
        case 1:
          tx.kind = TxKind::Approve;
          tx.submitter = chance(rng, 0.6) ? std::string(ledger::kTokenAuthority) : pick(rng, accounts);
          tx.from_account = tx.submitter;
          tx.to_account = pick(rng, accounts);
          tx.amount = amount(500'000'00);
          break;
        default:
          tx.kind = TxKind::TransferFrom;
          // Mostly spend from the authority, which holds the supply.
          tx.submitter = pick(rng, accounts);
          tx.from_account = chance(rng, 0.6) ? std::string(ledger::kTokenAuthority) : pick(rng, accounts);
          tx.to_account = pick(rng, accounts);
          tx.amount = amount(200'000'00);
          break;
      }
      txs.push_back(std::move(tx));
    }
    out.push_back(std::move(txs));
  }
  return out;
}

}  // namespace platoon::testing
