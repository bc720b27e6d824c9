#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "swing/app.hpp"
#include "swing/backtest.hpp"
#include "swing/reference.hpp"
#include "swing/strips.hpp"

namespace swing {
namespace {

TEST(ForwardStrips, MatchDirectForwardSums) {
  const RunConfig cfg = load_config(std::string(SWING_SOURCE_DIR) + "/configs/paper.json");
  const PathSet p = simulate(cfg.model, 40, 5);
  for (int j : {0, 1}) {
    const ProductCalendar& pc = cfg.products[static_cast<std::size_t>(j)];
    ForwardStrips strips(p, j, pc.lo(), pc.hi());
    for (Day s : {Day{0}, Day{150}, pc.lo() + 20, pc.hi() - 3}) {
      auto& st = strips.get(s);
      const std::vector<double> ref = reference::forward_strip(p, j, s, pc.lo(), pc.hi());
      const auto n = static_cast<std::size_t>(pc.hi() - pc.lo() + 1);
      std::vector<Product> prods = pc.at(std::max(Day{0}, s - 40));
      for (const Product& prod : pc.at(s)) prods.push_back(prod);
      for (const Product& prod : prods) {
        strips.ensure(st, prod.end);
        for (std::size_t path = 0; path < p.paths(); ++path) {
          double want = 0.0;
          for (Day m = prod.begin; m <= prod.end; ++m) want += ref[path * n + static_cast<std::size_t>(m - pc.lo())];
          EXPECT_NEAR(strips.sum(st, path, prod), want, 1e-13 * want) << j << " " << s << " " << prod.begin;
        }
      }
    }
  }
}

TEST(Schedule, RebalanceDays) {
  const Calendar cal(Calendar::parse_iso("2006-04-01"));  // Saturday
  const Day start = cal.day_of("2007-01-01");
  auto days = [&](const Schedule& s, const std::string& from, int n) {
    std::vector<std::string> out;
    for (Day d = cal.day_of(from); d < cal.day_of(from) + n; ++d) {
      if (s.rebalances(cal, start, d)) out.push_back(cal.iso(d));
    }
    return out;
  };
  const Schedule twice_weekly{Frequency::TwiceWeekly, Frequency::Daily, {}};
  EXPECT_EQ(days(twice_weekly, "2006-04-01", 10),
            (std::vector<std::string>{"2006-04-01", "2006-04-03", "2006-04-06", "2006-04-10"}));
  const Schedule weekly{Frequency::Weekly, Frequency::Weekly, {}};
  EXPECT_EQ(days(weekly, "2006-05-01", 14), (std::vector<std::string>{"2006-05-01", "2006-05-08"}));
  const Schedule twice_monthly{Frequency::TwiceMonthly, Frequency::Monthly, {cal.day_of("2007-01-20")}};
  EXPECT_EQ(days(twice_monthly, "2006-12-10", 50),
            (std::vector<std::string>{"2006-12-16", "2007-01-01", "2007-01-20"}));
  const Schedule quarterly{Frequency::Quarterly, Frequency::Daily, {}};
  EXPECT_EQ(days(quarterly, "2006-04-01", 250),
            (std::vector<std::string>{"2006-04-01", "2006-07-01", "2006-10-01"}));
  const Schedule once{Frequency::Once, Frequency::Once, {}};
  EXPECT_EQ(days(once, "2006-04-01", 500), (std::vector<std::string>{"2006-04-01"}));
  for (auto f : {Frequency::Daily, Frequency::TwiceWeekly, Frequency::Weekly, Frequency::TwiceMonthly,
                 Frequency::Monthly, Frequency::Quarterly, Frequency::Once}) {
    EXPECT_EQ(frequency_from_string(to_string(f)), f);
  }
  EXPECT_THROW(frequency_from_string("hourly"), std::invalid_argument);
}

TEST(Summary, SampleStatistics) {
  const Summary s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(5.0 / 3.0));
  EXPECT_DOUBLE_EQ(s.std_error, s.std / 2.0);
}

TEST(Bootstrap, DeterministicAndPaired) {
  std::vector<double> a(500), b(500);
  for (std::size_t i = 0; i < 500; ++i) {
    a[i] = std::sin(static_cast<double>(i));
    b[i] = 2.0 * a[i];
  }
  const auto r1 = bootstrap_std({&a, &b}, 40, 9);
  const auto r2 = bootstrap_std({&a, &b}, 40, 9);
  const auto r3 = bootstrap_std({&a, &b}, 40, 10);
  EXPECT_EQ(r1, r2);
  EXPECT_NE(r1, r3);
  for (const auto& rep : r1) EXPECT_NEAR(rep[1], 2.0 * rep[0], 1e-12);
}

RunConfig small_cfg() {
  RunConfig cfg = parse_config(testing::small_config_json());
  cfg.bootstrap = 20;
  return cfg;
}

TEST(Backtest, EmptyPlanIsCashAndWalkRespectsBounds) {
  const RunConfig cfg = small_cfg();
  const PricedRun run = price_run(cfg, cfg.regressor);
  const BacktestResult r = backtest_run(cfg, run, {HedgePlan{"none", false, {}, {}, {}, {}}});
  EXPECT_EQ(r.report.total.front(), r.report.cash);
  EXPECT_NEAR(r.report.replay_value, run.policy.value, 1e-9 * std::abs(run.policy.value));

  const PathSet fresh = simulate(cfg.model, 200, cfg.simulation_seed);
  const IndexPaths fix(cfg.index, fresh);
  const ForwardWalk w = forward_walk(run.policy, fresh, fix);
  const auto& c = cfg.contract;
  for (std::size_t path = 0; path < 200; ++path) {
    double cash = 0.0;
    for (Day t = c.t_start; t <= c.t_end; ++t) {
      const double q = w.q_before(t + 1, path) - w.q_before(t, path);
      EXPECT_GE(q, -1e-9);
      EXPECT_LE(q, c.q_max + 1e-9);
      cash += q * unit_payoff(fresh, fix, path, t);
    }
    EXPECT_GE(w.q_before(c.t_end + 1, path), c.Q_min - 1e-9);
    EXPECT_LE(w.q_before(c.t_end + 1, path), c.Q_max + 1e-9);
    EXPECT_NEAR(w.cash[path], cash, 1e-9 * std::max(1.0, std::abs(cash)));
  }
}

TEST(Backtest, HedgesPreserveTheMean) {
  const RunConfig cfg = small_cfg();
  const PricedRun run = price_run(cfg, cfg.regressor);
  const BacktestResult r = backtest_run(cfg, run, component_plans(2, 1));
  ASSERT_EQ(r.plans.size(), 5u);
  for (const auto& p : r.plans) {
    const double pooled = std::hypot(p.pnl.std_error, r.unhedged.std_error);
    EXPECT_LE(std::abs(p.pnl.mean - r.unhedged.mean), 3.0 * pooled) << p.plan;
  }
  EXPECT_LT(r.plans.back().pnl.std, r.unhedged.std);
}

// Fixed strike and forced full take: the payoff is linear in the gas
// forwards, so one rebalance at day 0 hedges it up to the estimation error
// of the day-0 deltas.
TEST(Backtest, StaticHedgeOfLinearPayoff) {
  RunConfig cfg = small_cfg();
  auto& c = cfg.contract;
  c.Q_min = c.Q_max = c.q_max * c.exercise_days();
  cfg.index.components[0].weight = 0.0;
  const PricedRun run = price_run(cfg, cfg.regressor);
  const Schedule once{Frequency::Once, Frequency::Once, {}};
  const Schedule daily{};
  const BacktestResult r = backtest_run(cfg, run,
                                        {HedgePlan{"once", true, {1}, {0}, once, once},
                                         HedgePlan{"daily", true, {1}, {0}, daily, daily}});
  EXPECT_LT(r.plans[0].pnl.std, 0.05 * r.unhedged.std);
  EXPECT_LT(r.plans[1].pnl.std, 0.05 * r.unhedged.std);
}

TEST(Backtest, TrackedPositions) {
  const RunConfig cfg = small_cfg();
  const PricedRun run = price_run(cfg, cfg.regressor);
  const BacktestResult r = backtest_run(cfg, run, component_plans(2, 1));
  ASSERT_EQ(r.report.tracked_names, (std::vector<std::string>{"fx"}));
  ASSERT_FALSE(r.report.positions.empty());
  const Day last = cfg.index.resets.back();
  for (const auto& row : r.report.positions) {
    ASSERT_LT(row.path, cfg.tracked_paths);
    if (row.t >= last) {
      EXPECT_EQ(row.value[0], 0.0);
    } else if (row.t == 0) {
      EXPECT_LT(row.value[0], 0.0);
    }
  }
}

TEST(Backtest, PlanPresets) {
  const auto comps = component_plans(3, 1);
  ASSERT_EQ(comps.size(), 5u);
  EXPECT_EQ(comps[1].commodities, (std::vector<int>{1, 2}));
  EXPECT_TRUE(comps[1].fx.empty());
  EXPECT_EQ(comps[2].fx, (std::vector<int>{0}));
  EXPECT_TRUE(comps[4].gas);
  const auto thin = thinning_plans(3, 1);
  EXPECT_EQ(thin[2].index_schedule.before, Frequency::Monthly);
  EXPECT_EQ(thin[2].index_schedule.after, Frequency::Daily);
  EXPECT_EQ(frequency_plans(3, 1)[3].index_schedule.after, Frequency::TwiceMonthly);
}

}  // namespace
}  // namespace swing
