#include "platoon/earnings.hpp"

#include <cstdio>

#include "platoon/error.hpp"

namespace platoon {
namespace {

void check_segment(std::size_t length, const Decimal& distance) {
  if (length < 2) {
    throw Error(ErrorCode::InvalidSegment, "segment with " + std::to_string(length) + " vehicle(s) is not a platoon");
  }
  if (distance.sign() < 0) throw Error(ErrorCode::InvalidSegment, "segment distance is negative");
}

void require_role(const DriverEpisode& episode, Role expected, const char* op) {
  if (episode.role != expected) {
    throw Error(ErrorCode::RoleMismatch, std::string(op) + " called for a " + std::string(to_string(episode.role)) +
                                             " episode in platoon '" + episode.platoon_id + "'");
  }
}

// Sum of L_i * d_i (or d_i alone) over one partition of the episode.
Decimal partition_sum(const DriverEpisode& episode, bool join_side, bool weight_by_length) {
  Decimal sum;
  for (const auto& s : episode.segments) {
    check_segment(s.length, s.distance);
    if (in_join_partition(s.initiating_kind) != join_side) continue;
    sum += weight_by_length ? state_value(s.length, s.distance) : s.distance;
  }
  return sum;
}

Decimal applied_penalty(const DriverEpisode& episode, const Decimal& eta, const Decimal& delta) {
  return penalty_applies(episode) ? penalty(episode.d_in, eta, delta) : Decimal{};
}

}  // namespace

Decimal state_value(std::size_t length, const Decimal& distance) {
  check_segment(length, distance);
  return Decimal(length) * distance;
}

Decimal out_platoon_earnings(const Decimal& prev_rate, const Decimal& d_out) {
  if (prev_rate.sign() < 0) throw Error(ErrorCode::InvalidArgument, "prev_rate is negative");
  if (d_out.sign() < 0) throw Error(ErrorCode::InvalidArgument, "d_out is negative");
  return prev_rate * d_out;
}

Decimal penalty(const Decimal& d_in, const Decimal& eta, const Decimal& delta) {
  if (d_in.sign() < 0 || eta.sign() <= 0 || delta.sign() <= 0) {
    throw Error(ErrorCode::InvalidArgument, "penalty needs d_in >= 0, eta > 0, delta > 0");
  }
  return d_in < eta ? (d_in - eta) * delta : Decimal{};
}

bool penalty_applies(const DriverEpisode& episode) noexcept {
  return episode.terminal_kind == EpisodeEnd::Leave || episode.terminal_kind == EpisodeEnd::Split;
}

Decimal join_earnings_leader(const DriverEpisode& episode, const Decimal& prev_rate, const Decimal& delta) {
  require_role(episode, Role::Leader, "join_earnings_leader");
  return partition_sum(episode, true, true) * (prev_rate + Decimal(episode.join_count) * delta);
}

Decimal join_earnings_follower(const DriverEpisode& episode, const Decimal& prev_rate, const Decimal& delta) {
  require_role(episode, Role::Follower, "join_earnings_follower");
  return partition_sum(episode, true, false) * (prev_rate + delta);
}

Decimal leave_earnings_leader(const DriverEpisode& episode, const Decimal& prev_rate, const Decimal& delta,
                              const Decimal& eta) {
  require_role(episode, Role::Leader, "leave_earnings_leader");
  // The effective rate may go negative for large l; it is intentionally not clamped.
  return partition_sum(episode, false, true) * (prev_rate - Decimal(episode.leave_count) * delta) +
         applied_penalty(episode, eta, delta);
}

Decimal leave_earnings_follower(const DriverEpisode& episode, const Decimal& prev_rate, const Decimal& delta,
                                const Decimal& eta) {
  require_role(episode, Role::Follower, "leave_earnings_follower");
  return partition_sum(episode, false, false) * (prev_rate + delta) + applied_penalty(episode, eta, delta);
}

EpisodeEarnings episode_earnings(const DriverEpisode& episode, const Decimal& prev_rate, const SettlementConfig& config) {
  if (episode.role == Role::Leader) {
    return {join_earnings_leader(episode, prev_rate, config.delta),
            leave_earnings_leader(episode, prev_rate, config.delta, config.eta)};
  }
  return {join_earnings_follower(episode, prev_rate, config.delta),
          leave_earnings_follower(episode, prev_rate, config.delta, config.eta)};
}

Settlement daily_settlement(const DriverProfile& driver, std::span<const DriverEpisode> episodes, const Decimal& d_out,
                            const SettlementConfig& config, const Date& date) {
  Settlement s;
  s.driver_id = driver.driver_id;
  s.earning_date = date;
  s.prev_day_rate = driver.prev_day_rate;
  s.d_out = d_out;
  s.episode_count = episodes.size();

  for (const auto& ep : episodes) {
    if (ep.role == Role::Leader && !leader_eligible(driver.rank)) {
      throw Error(ErrorCode::IneligibleLeader, "driver '" + driver.driver_id + "' led platoon '" + ep.platoon_id +
                                                   "' with rank " + std::to_string(driver.rank.value()));
    }
    EpisodeEarnings e = episode_earnings(ep, driver.prev_day_rate, config);
    Decimal pen = applied_penalty(ep, config.eta, config.delta);
    s.er_join += e.join_part;
    s.er_leave += e.leave_part;
    s.penalty_total += pen;
    s.d_in += ep.d_in;
    s.led_platoon = s.led_platoon || ep.role == Role::Leader;
    s.episodes.push_back(EpisodeBreakdown{ep.platoon_id, ep.role, ep.terminal_kind, ep.join_count, ep.leave_count,
                                          ep.d_in, e.join_part, e.leave_part, pen});
  }
  s.er_in = s.er_join + s.er_leave;
  s.er_out = out_platoon_earnings(driver.prev_day_rate, d_out);
  s.er_total = s.er_in + s.er_out;
  return s;
}

std::vector<Settlement> settle_trace(const PlatoonTrace& trace, const SettlementConfig& config, const Date& date) {
  std::vector<Settlement> out;
  out.reserve(trace.drivers.size());
  for (const auto& d : trace.drivers) {
    auto [episodes, d_out] = extract_episodes(trace, d.driver_id);
    out.push_back(daily_settlement(trace.scenario.driver(d.driver_id), episodes, d_out, config, date));
  }
  return out;
}

std::string format_settlement_table(std::span<const Settlement> settlements) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %3s %10s %10s %10s %10s %10s %10s\n", "driver", "w", "er_join", "er_leave",
                "penalty", "er_in", "er_out", "er_total");
  out += line;
  for (const auto& s : settlements) {
    std::snprintf(line, sizeof line, "%-16s %3zu %10s %10s %10s %10s %10s %10s\n", s.driver_id.c_str(),
                  s.episode_count, s.er_join.str().c_str(), s.er_leave.str().c_str(), s.penalty_total.str().c_str(),
                  s.er_in.str().c_str(), s.er_out.str().c_str(), s.er_total.str().c_str());
    out += line;
  }
  return out;
}

}  // namespace platoon
