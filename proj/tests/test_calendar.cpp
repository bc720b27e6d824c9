#include <gtest/gtest.h>

#include "swing/calendar.hpp"
#include "swing/rng.hpp"

namespace swing {
namespace {

TEST(Calendar, DayRoundTrip) {
  const Calendar cal(Calendar::parse_iso("2006-04-01"));
  EXPECT_EQ(cal.day_of("2006-04-01"), 0);
  EXPECT_EQ(cal.day_of("2007-01-01"), 275);
  EXPECT_EQ(cal.iso(275), "2007-01-01");
  EXPECT_EQ(cal.day_of("2008-03-01") - cal.day_of("2008-02-28"), 2);  // leap year
}

TEST(Calendar, MonthArithmetic) {
  const Calendar cal(Calendar::parse_iso("2006-01-31"));
  EXPECT_EQ(cal.iso(cal.add_months(0, 1)), "2006-02-28");
  EXPECT_EQ(cal.iso(cal.add_months(0, -2)), "2005-11-30");
  EXPECT_EQ(cal.iso(cal.month_start(0)), "2006-01-01");
  EXPECT_EQ(cal.iso(cal.month_end(cal.day_of("2006-02-10"))), "2006-02-28");
}

TEST(Calendar, Weeks) {
  const Calendar cal(Calendar::parse_iso("2006-04-01"));  // a Saturday
  EXPECT_EQ(cal.iso_weekday(0), 6u);
  EXPECT_EQ(cal.iso(cal.week_end(0)), "2006-04-02");
  EXPECT_EQ(cal.iso(cal.week_end(2)), "2006-04-09");
  EXPECT_EQ(cal.day_of_month(cal.day_of("2006-05-16")), 16u);
  EXPECT_EQ(cal.month_number(cal.day_of("2006-05-16")), 5u);
}

TEST(Calendar, RejectsMalformedDates) {
  EXPECT_THROW(Calendar::parse_iso("2006-13-01"), std::invalid_argument);
  EXPECT_THROW(Calendar::parse_iso("2006-02-30"), std::invalid_argument);
  EXPECT_THROW(Calendar::parse_iso("06-01-01"), std::invalid_argument);
}

// Known-answer vector of the Philox4x32-10 reference implementation.
TEST(Philox, KnownAnswer) {
  const Philox4x32 g(0);
  const auto b = g({0, 0, 0, 0});
  EXPECT_EQ(b[0], 0x6627e8d5u);
  EXPECT_EQ(b[1], 0xe169c58du);
  EXPECT_EQ(b[2], 0xbc57ac4cu);
  EXPECT_EQ(b[3], 0x9b00dbd8u);
}

TEST(Philox, NormalMoments) {
  const Philox4x32 g(42);
  double s1 = 0.0, s2 = 0.0;
  const int n = 200000;
  for (std::uint32_t i = 0; i < n / 2; ++i) {
    for (double z : normal_pair(g({i, 0, 0, 0}))) {
      s1 += z;
      s2 += z * z;
    }
  }
  EXPECT_NEAR(s1 / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

}  // namespace
}  // namespace swing
