#pragma once

#include <span>
#include <string>
#include <vector>

#include "platoon/decimal.hpp"
#include "platoon/domain.hpp"
#include "platoon/sim.hpp"

namespace platoon {

struct SettlementConfig {
  Decimal delta = Decimal::parse("0.01");  // balancing factor
  Decimal eta = Decimal(10);               // penalty threshold, miles
};

struct EpisodeBreakdown {
  std::string platoon_id;
  Role role = Role::Follower;
  EpisodeEnd terminal = EpisodeEnd::DayEnd;
  std::size_t join_count = 0;
  std::size_t leave_count = 0;
  Decimal d_in;
  Decimal join_part;
  Decimal leave_part;  // includes the penalty
  Decimal penalty;
};

struct Settlement {
  std::string driver_id;
  Decimal er_join;
  Decimal er_leave;
  Decimal er_in;
  Decimal er_out;
  Decimal er_total;
  Decimal penalty_total;
  std::size_t episode_count = 0;  // w
  Date earning_date;

  // Audit detail, not part of the earnings identities.
  Decimal prev_day_rate;
  Decimal d_out;
  Decimal d_in;
  bool led_platoon = false;
  std::vector<EpisodeBreakdown> episodes;
};

/// L_i * d_i, in car-miles.
Decimal state_value(std::size_t length, const Decimal& distance);

Decimal out_platoon_earnings(const Decimal& prev_rate, const Decimal& d_out);

/// (d_in - eta) * delta below the threshold, otherwise zero.
Decimal penalty(const Decimal& d_in, const Decimal& eta, const Decimal& delta);

/// True when the episode ended because its platoon changed shape under the
/// driver (a leave or a split); only such episodes carry the short-stay penalty.
bool penalty_applies(const DriverEpisode& episode) noexcept;

Decimal join_earnings_leader(const DriverEpisode& episode, const Decimal& prev_rate, const Decimal& delta);
Decimal join_earnings_follower(const DriverEpisode& episode, const Decimal& prev_rate, const Decimal& delta);
Decimal leave_earnings_leader(const DriverEpisode& episode, const Decimal& prev_rate, const Decimal& delta,
                              const Decimal& eta);
Decimal leave_earnings_follower(const DriverEpisode& episode, const Decimal& prev_rate, const Decimal& delta,
                                const Decimal& eta);

struct EpisodeEarnings {
  Decimal join_part;
  Decimal leave_part;
};

/// Role dispatch: leaders get the j-bonus on join states and the l-deduction
/// on leave states; followers earn on distance alone.
EpisodeEarnings episode_earnings(const DriverEpisode& episode, const Decimal& prev_rate, const SettlementConfig& config);

Settlement daily_settlement(const DriverProfile& driver, std::span<const DriverEpisode> episodes, const Decimal& d_out,
                            const SettlementConfig& config, const Date& date);

/// Settles every driver in the trace, in scenario order.
std::vector<Settlement> settle_trace(const PlatoonTrace& trace, const SettlementConfig& config, const Date& date);

/// Fixed-width table of the per-driver totals.
std::string format_settlement_table(std::span<const Settlement> settlements);

}  // namespace platoon
