#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "platoon/json_io.hpp"

using platoon::testing::TempDir;

namespace {

struct Result {
  int code;
  std::string out;
};

Result ctl(const TempDir& dir, const std::string& args) {
  const auto out_path = dir / "stdout.txt";
  const std::string cmd =
      std::string(PLATOONCTL) + " " + args + " > '" + out_path.string() + "' 2> '" + (dir / "stderr.txt").string() + "'";
  int status = std::system(cmd.c_str());
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kCanonical = std::string(SCENARIO_DIR) + "/canonical.json";

}  // namespace

TEST_CASE("simulate writes a trace and prints segment tables") {
  TempDir dir;
  auto r = ctl(dir, "simulate --scenario " + kCanonical + " --out " + (dir / "t.json").string());
  CHECK(r.code == 0);
  CHECK(r.out.find("platoon P1 (3 states") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "t.json"));
}

TEST_CASE("simulate exit codes") {
  TempDir dir;
  CHECK(ctl(dir, "simulate --scenario " + (dir / "missing.json").string()).code == 1);

  auto s = platoon::testing::canonical_scenario();
  s.drivers[0].rank = platoon::Rank(2);
  platoon::write_text_file(dir / "bad.json", platoon::dump_json(platoon::scenario_to_json(s)));
  auto r = ctl(dir, "simulate --scenario " + (dir / "bad.json").string());
  CHECK(r.code == 2);
  CHECK(slurp(dir / "stderr.txt").find("IneligibleLeader") != std::string::npos);

  platoon::write_text_file(dir / "broken.json", "{\n  \"day_length\": 10,\n  ]\n");
  CHECK(ctl(dir, "simulate --scenario " + (dir / "broken.json").string()).code == 1);
  CHECK(slurp(dir / "stderr.txt").find("line 3") != std::string::npos);

  CHECK(ctl(dir, "simulate").code == 1);
}

TEST_CASE("ledger workflow end to end") {
  TempDir dir;
  const std::string ledger = " --ledger " + (dir / "l.bin").string();
  const std::string trace = (dir / "t.json").string();
  REQUIRE(ctl(dir, "simulate --scenario " + kCanonical + " --out " + trace).code == 0);

  auto r = ctl(dir, "ledger init" + ledger);
  CHECK(r.code == 0);
  CHECK(r.out.find("token-authority: 10000000 tokens") != std::string::npos);

  r = ctl(dir, "settle --trace " + trace + ledger + " --date 2024-03-01");
  CHECK(r.code == 3);
  CHECK(slurp(dir / "stderr.txt").find("top up at least 10.51") != std::string::npos);

  r = ctl(dir, "ledger fund --amount 10000" + ledger);
  CHECK(r.code == 0);
  CHECK(r.out.find("token-authority: 9990000 tokens") != std::string::npos);
  CHECK(r.out.find("driver-record: 10000 tokens") != std::string::npos);

  r = ctl(dir, "settle --trace " + trace + ledger + " --date 2024-03-01 --report " + (dir / "r.json").string());
  CHECK(r.code == 0);
  CHECK(r.out.find("credited alice                    8.48 tokens (848 base units)") != std::string::npos);
  CHECK(r.out.find("(76 base units)") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "r.json"));

  CHECK(ctl(dir, "settle --trace " + trace + ledger + " --date 2024-03-01").code == 4);

  r = ctl(dir, "--json ledger balance --driver alice" + ledger);
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["base_units"] == 848);
  r = ctl(dir, "ledger balance --account wallet/unknown" + ledger);
  CHECK(r.code == 0);
  CHECK(r.out.find(": 0 tokens") != std::string::npos);
  r = ctl(dir, "ledger records --driver carol" + ledger);
  CHECK(r.out.find("2024-03-01  carol  earnings 0.76") != std::string::npos);
  r = ctl(dir, "ledger verify" + ledger);
  CHECK(r.code == 0);

  auto bytes = slurp(dir / "l.bin");
  bytes[bytes.size() / 2] = static_cast<char>(bytes[bytes.size() / 2] ^ 0x10);
  platoon::write_text_file(dir / "l.bin", bytes);
  r = ctl(dir, "ledger verify" + ledger);
  CHECK(r.code == 5);
  CHECK(r.out.find("corrupt at block") != std::string::npos);
}

TEST_CASE("earnings preview") {
  TempDir dir;
  const std::string trace = (dir / "t.json").string();
  REQUIRE(ctl(dir, "simulate --scenario " + kCanonical + " --out " + trace).code == 0);
  auto r = ctl(dir, "--json earnings --trace " + trace + " --date 2024-03-01");
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j[0]["er_total"] == "8.48");
  r = ctl(dir, "earnings --trace " + trace + " --date 2024-03-01 --delta 0.02");
  CHECK(r.code == 0);
  CHECK(r.out.find("8.8") != std::string::npos);
}
