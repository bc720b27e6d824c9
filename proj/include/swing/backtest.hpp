#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swing/calendar.hpp"
#include "swing/contract.hpp"
#include "swing/hedge.hpp"
#include "swing/model.hpp"
#include "swing/optimize.hpp"

namespace swing {

enum class Frequency { Daily, TwiceWeekly, Weekly, TwiceMonthly, Monthly, Quarterly, Once };

std::string to_string(Frequency f);
Frequency frequency_from_string(const std::string& s);

// Rebalance rule: Daily every day; TwiceWeekly Mondays and Thursdays;
// Weekly Mondays; TwiceMonthly the 1st and 16th; Monthly the 1st;
// Quarterly the 1st of Jan/Apr/Jul/Oct; Once only day 0. Day 0 always
// rebalances. `before` applies to days before t_start.
struct Schedule {
  Frequency before = Frequency::Daily;
  Frequency after = Frequency::Daily;
  std::vector<Day> extra;  // explicit additional rebalance days

  bool rebalances(const Calendar& cal, Day t_start, Day d) const;
  bool operator==(const Schedule&) const = default;
};

struct HedgePlan {
  std::string name;
  bool gas = false;
  std::vector<int> commodities;  // index commodities hedged
  std::vector<int> fx;           // exchange rates hedged
  Schedule gas_schedule;
  Schedule index_schedule;  // for index commodities and exchange rates
};

// Exercise of a stored policy along fresh paths.
struct ForwardWalk {
  std::vector<double> volume;  // Q_t before the decision, [t * paths + path], t = 0 .. t_end + 1
  std::vector<double> cash;    // per path
  std::vector<double> mean_take;  // per day, average exercised volume
  std::size_t paths = 0;
  double q_before(Day t, std::size_t path) const { return volume[static_cast<std::size_t>(t) * paths + path]; }
};

ForwardWalk forward_walk(const Policy& pol, const PathSet& fresh, const IndexPaths& fresh_ix);

// Average position per delivery day over one calendar month of one
// commodity (commodity 0 is gas), or the exchange-rate position.
struct TrackedExposure {
  std::string name;
  TargetKind kind = TargetKind::Gas;
  int index = 0;
  Day month_begin = 0;
  Day month_end = 0;
};

struct PositionRow {
  Day t;
  std::size_t path;
  std::vector<double> value;  // one per tracked exposure, NaN if not rebalanced at t
};

struct HedgeReport {
  std::vector<double> cash;  // unhedged P&L per path
  std::vector<std::string> plan_names;
  std::vector<std::vector<double>> total;  // per plan: cash + hedge P&L per path
  double simulation_value = 0.0;
  double replay_value = 0.0;
  std::vector<double> mean_take;
  std::vector<std::string> tracked_names;
  std::vector<PositionRow> positions;
};

struct BacktestSetup {
  const PathSet* optimisation = nullptr;
  const IndexPaths* optimisation_index = nullptr;
  const PathSet* fresh = nullptr;
  const IndexPaths* fresh_index = nullptr;
  Calendar calendar;
  std::vector<ProductCalendar> products;  // per commodity
  std::vector<TrackedExposure> tracked;
  std::size_t tracked_paths = 4;
};

HedgeReport run_backtest(const Policy& pol, const BacktestSetup& setup, const std::vector<HedgePlan>& plans);

// Plans of the component study: gas only; index commodities without fx;
// index commodities with fx; fx only; everything.
std::vector<HedgePlan> component_plans(int commodities, int fx_count);
// Total hedge with the index legs at daily / twice weekly / weekly / twice
// monthly frequency, gas daily.
std::vector<HedgePlan> frequency_plans(int commodities, int fx_count);
// Total hedge, index legs at weekly / twice monthly / monthly / quarterly
// frequency before t_start and daily afterwards.
std::vector<HedgePlan> thinning_plans(int commodities, int fx_count);

struct Summary {
  double mean = 0.0;
  double std = 0.0;
  double std_error = 0.0;  // of the mean
};
Summary summarize(const std::vector<double>& x);

// Paired bootstrap of standard deviations: resamples the path index once
// per replicate and returns, per replicate, the std of every series.
std::vector<std::vector<double>> bootstrap_std(const std::vector<const std::vector<double>*>& series,
                                               int replicates, std::uint64_t seed);

}  // namespace swing
