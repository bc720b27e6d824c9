#pragma once

#include <chrono>
#include <string>

namespace swing {

// Integer day offset from the valuation date (day 0).
using Day = int;

inline constexpr double kDaysPerYear = 365.0;

inline double year_fraction(Day d) { return static_cast<double>(d) / kDaysPerYear; }

// Maps day offsets to civil dates. Weekends are ordinary days: the model
// simulates a price every calendar day.
class Calendar {
 public:
  Calendar() = default;
  explicit Calendar(std::chrono::year_month_day origin);

  // Parses "YYYY-MM-DD"; throws std::invalid_argument on malformed input.
  static std::chrono::year_month_day parse_iso(const std::string& text);

  const std::chrono::year_month_day& origin() const { return origin_; }

  Day day_of(std::chrono::year_month_day date) const;
  Day day_of(const std::string& iso) const { return day_of(parse_iso(iso)); }
  std::chrono::year_month_day date_of(Day d) const;
  std::string iso(Day d) const;

  // Shifts by whole calendar months; the day of month is clamped to the
  // last valid day of the target month.
  Day add_months(Day d, int months) const;

  Day month_start(Day d) const;
  Day month_end(Day d) const;  // last day of the month containing d
  Day week_end(Day d) const;   // Sunday of the ISO week containing d
  unsigned iso_weekday(Day d) const;  // 1 = Monday .. 7 = Sunday
  unsigned day_of_month(Day d) const;
  unsigned month_number(Day d) const;

 private:
  std::chrono::year_month_day origin_{std::chrono::year{2000}, std::chrono::month{1},
                                      std::chrono::day{1}};
  std::chrono::sys_days origin_days_{origin_};
};

}  // namespace swing
