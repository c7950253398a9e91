#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "platoon/domain.hpp"
#include "platoon/error.hpp"

using namespace platoon;
using platoon::testing::D;

namespace {
ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}
}  // namespace

TEST_CASE("rank range") {
  for (int r = 1; r <= 5; ++r) CHECK(Rank(r).value() == r);
  CHECK(code_of([] { Rank(0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Rank(6); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("leader eligibility is rank four and above") {
  for (int r = 1; r <= 5; ++r) CHECK(leader_eligible(Rank(r)) == (r >= 4));
}

TEST_CASE("default rate table") {
  auto t = EarningRateTable::defaults();
  CHECK(t.rate(Rank(1)) == D("0.01"));
  CHECK(t.rate(Rank(2)) == D("0.03"));
  CHECK(t.rate(Rank(3)) == D("0.09"));
  CHECK(t.rate(Rank(4)) == D("0.12"));
  CHECK(t.rate(Rank(5)) == D("0.15"));
}

TEST_CASE("rate table must be non-negative and strictly increasing") {
  CHECK(code_of([] { EarningRateTable({D("0.01"), D("0.03"), D("0.03"), D("0.12"), D("0.15")}); }) ==
        ErrorCode::Validation);
  CHECK(code_of([] { EarningRateTable({D("0.05"), D("0.03"), D("0.09"), D("0.12"), D("0.15")}); }) ==
        ErrorCode::Validation);
  CHECK(code_of([] { EarningRateTable({D("-0.01"), D("0.03"), D("0.09"), D("0.12"), D("0.15")}); }) ==
        ErrorCode::Validation);
  CHECK_NOTHROW(EarningRateTable({D("0"), D("1"), D("2"), D("3"), D("4")}));
}

TEST_CASE("driver profile validation") {
  DriverProfile d = testing::driver("alice", 5);
  CHECK_NOTHROW(d.validate());
  d.driver_id.clear();
  CHECK(code_of([&] { d.validate(); }) == ErrorCode::Validation);
  d = testing::driver("alice", 5, "-0.1");
  CHECK(code_of([&] { d.validate(); }) == ErrorCode::Validation);
}

TEST_CASE("dates") {
  Date d = Date::parse("2024-03-01");
  CHECK(d.year == 2024);
  CHECK(d.month == 3u);
  CHECK(d.day == 1u);
  CHECK(d.str() == "2024-03-01");
  CHECK(Date{}.unix_seconds() == 0);
  CHECK(Date::parse("1970-01-02").unix_seconds() == 86400);
  CHECK(Date::parse("2000-03-01").unix_seconds() == 951868800);
  CHECK(Date::parse("2024-02-29") < Date::parse("2024-03-01"));
  for (const char* bad : {"2023-02-29", "2024-13-01", "2024-00-10", "24-03-01", "2024-3-1", "2024-03-01x", ""}) {
    CAPTURE(bad);
    CHECK(code_of([&] { (void)Date::parse(bad); }) == ErrorCode::Parse);
  }
}

TEST_CASE("token amounts") {
  auto a = TokenAmount::from_tokens(D("8.48"), 2);
  CHECK(a.base_units == 848u);
  CHECK(a.str() == "8.48");
  CHECK(TokenAmount::from_tokens(D("10000000"), 2).base_units == 1'000'000'000u);
  CHECK(code_of([] { (void)TokenAmount::from_tokens(D("0.001"), 2); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { (void)TokenAmount::from_tokens(D("-1"), 2); }) == ErrorCode::InvalidArgument);
  CHECK((a + a).base_units == 1696u);
  CHECK(code_of([&] { (void)(a - TokenAmount{849, 2}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { (void)(a + TokenAmount{1, 3}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("tokens from earnings") {
  CHECK(tokens_from_earnings(D("8.485"), 2).base_units == 848u);
  CHECK(tokens_from_earnings(D("0"), 2).base_units == 0u);
  CHECK(tokens_from_earnings(D("-0.02"), 2).base_units == 0u);
  CHECK(tokens_from_earnings(D("8.48"), 2).base_units == 848u);
  CHECK(tokens_from_earnings(D("0.76"), 2).base_units == 76u);
  CHECK(tokens_from_earnings(D("1.2345"), 3).base_units == 1234u);
  CHECK(tokens_from_earnings(D("1.2355"), 3).base_units == 1236u);
  CHECK(tokens_from_earnings(D("0.5"), 0).base_units == 0u);
}

TEST_CASE("tokens from earnings is monotone and never negative") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::int64_t> dist(-100000, 100000);
  for (int i = 0; i < 5000; ++i) {
    Decimal a = Decimal::from_parts(dist(rng), 3), b = Decimal::from_parts(dist(rng), 3);
    if (b < a) std::swap(a, b);
    auto ta = tokens_from_earnings(a, 2), tb = tokens_from_earnings(b, 2);
    CHECK(ta.base_units <= tb.base_units);
    if (a.sign() <= 0) CHECK(ta.base_units == 0u);
  }
}
