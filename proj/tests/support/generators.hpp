#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "platoon/ledger.hpp"
#include "platoon/sim.hpp"

namespace platoon::testing {

struct ScenarioShape {
  std::size_t min_cars = 2;
  std::size_t max_cars = 6;
  std::size_t max_events = 10;
  bool allow_merge = true;
  bool allow_split = true;
  bool short_windows = true;  // some followers arrive early or depart late
};

/// Random feasible scenario. Events are drawn against a live World, so every
/// emitted event applies cleanly and `run` on the result succeeds.
ScenarioSpec random_scenario(std::mt19937_64& rng, const ScenarioShape& shape = {});

/// Six cars; a leader and one follower stay in the first platoon all day while
/// the other four join and leave it. At least one Join and one Leave.
struct DominanceCase {
  ScenarioSpec scenario;
  std::string leader;
  std::string follower;
};
DominanceCase random_dominance_case(std::mt19937_64& rng);

/// Decimal with `places` fractional digits, uniform in [lo, hi].
Decimal random_decimal(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi, int places);

/// Random sequence of ledger transactions (valid and invalid) grouped into
/// blocks; exercised against AccountState for conservation checks.
std::vector<std::vector<ledger::Transaction>> random_transaction_blocks(std::mt19937_64& rng, std::size_t blocks);

}  // namespace platoon::testing
