#pragma once

#include <filesystem>
#include <string>

#include "platoon/earnings.hpp"
#include "platoon/sim.hpp"

namespace platoon::testing {

inline Decimal D(const char* text) { return Decimal::parse(text); }

DriverProfile driver(std::string id, int rank, const char* prev_rate = nullptr);
ManeuverEvent join_at(const char* t, std::string vehicle, std::string platoon);
ManeuverEvent leave_at(const char* t, std::string vehicle);
ManeuverEvent merge_at(const char* t, std::string a, std::string b);
ManeuverEvent split_at(const char* t, std::string platoon, std::size_t index);

/// Alice (rank 5, ER 0.12) leads Carol (ER 0.03) all day in P1; Bob joins at
/// 5 and leaves at 15; Carol leaves at 19 and the platoon dissolves. Speed is
/// one mile per minute over a 39-minute day.
ScenarioSpec canonical_scenario();

const Settlement& settlement_of(const std::vector<Settlement>& all, std::string_view id);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace platoon::testing
