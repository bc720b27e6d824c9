#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "swing/backtest.hpp"
#include "swing/config.hpp"

namespace swing {

// Optimisation paths, their index quantities and the solved policy.
struct PricedRun {
  std::shared_ptr<PathSet> paths;
  std::shared_ptr<IndexPaths> index;
  Policy policy;
  std::vector<double> pathwise;  // realized value per optimisation path
};

PricedRun price_run(const RunConfig& cfg, const RegressorSpec& r);

// Summary of one plan in a backtest, with bootstrap errors.
struct PlanStats {
  std::string plan;
  Summary pnl;
  double std_se = 0.0;         // bootstrap standard error of the std
  double ratio = 0.0;          // unhedged std / std
};

struct BacktestResult {
  HedgeReport report;
  Summary unhedged;
  double unhedged_std_se = 0.0;
  std::vector<PlanStats> plans;
  // replicates x (unhedged, plans...) bootstrap stds
  std::vector<std::vector<double>> bootstrap;
};

BacktestResult backtest_run(const RunConfig& cfg, const PricedRun& priced, const std::vector<HedgePlan>& plans);

// Bootstrap standard error of std(b) / std(a) - 1 for columns a, b of
// BacktestResult::bootstrap (0 = unhedged, 1 + i = plan i).
double bootstrap_ratio_se(const BacktestResult& r, std::size_t a, std::size_t b);
double bootstrap_diff_se(const BacktestResult& r, std::size_t a, std::size_t b);

// Command entry points. Each writes its files under cfg.output_dir and
// returns the process exit code.
int cmd_validate(const RunConfig& cfg, std::ostream& log);
int cmd_price(const RunConfig& cfg, std::ostream& log, std::size_t dump_paths = 0, std::size_t dump_index = 0);
int cmd_backtest(const RunConfig& cfg, const std::string& archive, std::ostream& log);

struct RegressorRow {
  RegressorKind kind;
  double value = 0.0;
  double std_error = 0.0;
  BacktestResult backtest;
};
// Prices with every regressor kind and backtests `plans` (the total hedge
// when empty) on each policy. Writes regressors.csv.
std::vector<RegressorRow> study_regressors(const RunConfig& cfg, std::ostream& log,
                                           const std::vector<HedgePlan>& plans = {});
int cmd_study_regressors(const RunConfig& cfg, std::ostream& log);
int cmd_study_components(const RunConfig& cfg, std::ostream& log);
int cmd_study_frequency(const RunConfig& cfg, std::ostream& log);

// Formats a double with enough digits to round-trip.
std::string fmt(double v);

}  // namespace swing
