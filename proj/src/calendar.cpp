#include "swing/calendar.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace swing {

using namespace std::chrono;

Calendar::Calendar(year_month_day origin) : origin_(origin), origin_days_(origin) {
  if (!origin.ok()) {
    throw std::invalid_argument("invalid calendar origin");
  }
}

year_month_day Calendar::parse_iso(const std::string& text) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  char tail = 0;
  if (text.size() != 10 || std::sscanf(text.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3) {
    throw std::invalid_argument("malformed ISO date '" + text + "' (expected YYYY-MM-DD)");
  }
  year_month_day date{year{y}, month{m}, day{d}};
  if (!date.ok()) {
    throw std::invalid_argument("invalid calendar date '" + text + "'");
  }
  return date;
}

Day Calendar::day_of(year_month_day date) const {
  return static_cast<Day>((sys_days{date} - origin_days_).count());
}

year_month_day Calendar::date_of(Day d) const { return year_month_day{origin_days_ + days{d}}; }

std::string Calendar::iso(Day d) const {
  const auto date = date_of(d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

Day Calendar::add_months(Day d, int n) const {
  const auto date = date_of(d);
  const year_month ym = year_month{date.year(), date.month()} + months{n};
  const year_month_day_last last{ym.year(), month_day_last{ym.month()}};
  const auto dom = std::min(date.day(), last.day());
  return day_of(year_month_day{ym.year(), ym.month(), dom});
}

Day Calendar::month_start(Day d) const {
  const auto date = date_of(d);
  return day_of(year_month_day{date.year(), date.month(), day{1}});
}

Day Calendar::month_end(Day d) const {
  const auto date = date_of(d);
  return day_of(year_month_day{year_month_day_last{date.year(), month_day_last{date.month()}}});
}

unsigned Calendar::iso_weekday(Day d) const {
  return weekday{origin_days_ + days{d}}.iso_encoding();
}

Day Calendar::week_end(Day d) const { return d + static_cast<Day>(7 - iso_weekday(d)); }

unsigned Calendar::day_of_month(Day d) const { return static_cast<unsigned>(date_of(d).day()); }

unsigned Calendar::month_number(Day d) const {
  return static_cast<unsigned>(date_of(d).month());
}

}  // namespace swing
