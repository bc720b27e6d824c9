#include "swing/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace swing {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  const auto path = std::filesystem::path(cfg.output_dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

std::string hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_backtest(const RunConfig& cfg, const BacktestResult& r, const std::string& prefix) {
  {
    auto out = open_out(cfg, prefix + "summary.csv");
    out << "plan,mean,std,std_error_mean,std_bootstrap_se,std_ratio\n";
    out << "unhedged," << fmt(r.unhedged.mean) << ',' << fmt(r.unhedged.std) << ',' << fmt(r.unhedged.std_error)
        << ',' << fmt(r.unhedged_std_se) << ",1\n";
    for (const auto& p : r.plans) {
      out << p.plan << ',' << fmt(p.pnl.mean) << ',' << fmt(p.pnl.std) << ',' << fmt(p.pnl.std_error) << ','
          << fmt(p.std_se) << ',' << fmt(p.ratio) << '\n';
    }
  }
  {
    auto out = open_out(cfg, prefix + "pnl.csv");
    out << "path,unhedged";
    for (const auto& n : r.report.plan_names) out << ',' << n;
    out << '\n';
    for (std::size_t path = 0; path < r.report.cash.size(); ++path) {
      out << path << ',' << fmt(r.report.cash[path]);
      for (const auto& t : r.report.total) out << ',' << fmt(t[path]);
      out << '\n';
    }
  }
  {
    auto out = open_out(cfg, prefix + "positions.csv");
    out << "date,path";
    for (const auto& n : r.report.tracked_names) out << ',' << n;
    out << '\n';
    for (const auto& row : r.report.positions) {
      out << cfg.calendar.iso(row.t) << ',' << row.path;
      for (double v : row.value) out << ',' << (std::isnan(v) ? std::string() : fmt(v));
      out << '\n';
    }
  }
  {
    auto out = open_out(cfg, prefix + "exercise.csv");
    out << "date,mean_volume\n";
    for (Day t = cfg.contract.t_start; t <= cfg.contract.t_end; ++t) {
      out << cfg.calendar.iso(t) << ',' << fmt(r.report.mean_take[static_cast<std::size_t>(t)]) << '\n';
    }
  }
}

std::size_t column_of(const BacktestResult& r, const std::string& plan) {
  for (std::size_t i = 0; i < r.plans.size(); ++i) {
    if (r.plans[i].plan == plan) return i + 1;
  }
  throw std::invalid_argument("no plan named '" + plan + "'");
}

double column_se(const std::vector<std::vector<double>>& boot, std::size_t col,
                 double (*f)(const std::vector<double>&, std::size_t)) {
  if (boot.size() < 2) return 0.0;
  std::vector<double> v;
  for (const auto& rep : boot) v.push_back(f(rep, col));
  return summarize(v).std;
}

}  // namespace

double bootstrap_ratio_se(const BacktestResult& r, std::size_t a, std::size_t b) {
  if (r.bootstrap.size() < 2) return 0.0;
  std::vector<double> v;
  for (const auto& rep : r.bootstrap) v.push_back(rep[b] / rep[a] - 1.0);
  return summarize(v).std;
}

double bootstrap_diff_se(const BacktestResult& r, std::size_t a, std::size_t b) {
  if (r.bootstrap.size() < 2) return 0.0;
  std::vector<double> v;
  for (const auto& rep : r.bootstrap) v.push_back(rep[b] - rep[a]);
  return summarize(v).std;
}

PricedRun price_run(const RunConfig& cfg, const RegressorSpec& r) {
  PricedRun out;
  out.paths = std::make_shared<PathSet>(simulate(cfg.model, cfg.optimisation_paths, cfg.optimisation_seed));
  out.index = std::make_shared<IndexPaths>(cfg.index, *out.paths);
  BackwardOptions opt;
  opt.pathwise = &out.pathwise;
  out.policy = backward_solve(*out.paths, *out.index, cfg.contract, cfg.grid, r, opt);
  return out;
}

BacktestResult backtest_run(const RunConfig& cfg, const PricedRun& priced, const std::vector<HedgePlan>& plans) {
  const PathSet fresh = simulate(cfg.model, cfg.simulation_paths, cfg.simulation_seed);
  const IndexPaths fresh_ix(cfg.index, fresh);
  BacktestSetup setup;
  setup.optimisation = priced.paths.get();
  setup.optimisation_index = priced.index.get();
  setup.fresh = &fresh;
  setup.fresh_index = &fresh_ix;
  setup.calendar = cfg.calendar;
  setup.products = cfg.products;
  setup.tracked = cfg.tracked;
  setup.tracked_paths = cfg.tracked_paths;

  BacktestResult r;
  r.report = run_backtest(priced.policy, setup, plans);
  r.unhedged = summarize(r.report.cash);
  std::vector<const std::vector<double>*> series{&r.report.cash};
  for (const auto& t : r.report.total) series.push_back(&t);
  r.bootstrap = bootstrap_std(series, cfg.bootstrap, cfg.simulation_seed);
  auto col = [](const std::vector<double>& rep, std::size_t c) { return rep[c]; };
  r.unhedged_std_se = column_se(r.bootstrap, 0, col);
  for (std::size_t i = 0; i < r.report.plan_names.size(); ++i) {
    PlanStats s;
    s.plan = r.report.plan_names[i];
    s.pnl = summarize(r.report.total[i]);
    s.std_se = column_se(r.bootstrap, i + 1, col);
    s.ratio = s.pnl.std > 0.0 ? r.unhedged.std / s.pnl.std : 0.0;
    r.plans.push_back(s);
  }
  return r;
}

int cmd_validate(const RunConfig& cfg, std::ostream& log) {
  // Loading the configuration already checked every invariant, the
  // correlation factorisation and the product calendars.
  auto out = open_out(cfg, "validate.csv");
  out << "check,estimate,target,std_error,status\n";
  int failures = 0;
  auto report = [&](const std::string& name, double est, double target, double se) {
    const bool ok = std::abs(est - target) <= 3.0 * se + 1e-12 * std::abs(target);
    failures += ok ? 0 : 1;
    out << name << ',' << fmt(est) << ',' << fmt(target) << ',' << fmt(se) << ',' << (ok ? "PASS" : "FAIL") << '\n';
    log << (ok ? "PASS " : "FAIL ") << name << '\n';
  };
  log << "PASS configuration, correlation factor and product calendars\n";
  out << "configuration,,,,PASS\n";

  const Day t_end = cfg.contract.t_end;
  const std::vector<Day> dates{cfg.contract.t_start / 2, cfg.contract.t_start, t_end};
  const PathSet p = simulate(cfg.model, cfg.simulation_paths, cfg.simulation_seed, dates);
  const std::size_t M = p.paths();
  std::vector<double> a(M);
  std::vector<double> b(M);
  for (int j = 0; j < p.commodities(); ++j) {
    const std::string& name = cfg.model.commodities[static_cast<std::size_t>(j)].name;
    for (Day t : dates) {
      for (Day T : {t, t_end}) {
        for (std::size_t path = 0; path < M; ++path) {
          a[path] = forward_price(p, path, j, t, T);
          b[path] = tangent_forward(p, path, j, t, T);
        }
        const std::string at = name + " F(" + cfg.calendar.iso(t) + " " + cfg.calendar.iso(T) + ")";
        const Summary sa = summarize(a);
        const Summary sb = summarize(b);
        report("martingale " + at, sa.mean, cfg.model.commodities[static_cast<std::size_t>(j)].initial(T), sa.std_error);
        report("tangent " + at, sb.mean, 1.0, sb.std_error);
      }
    }
  }
  for (int x = 0; x < p.fx_count(); ++x) {
    for (Day t : dates) {
      for (std::size_t path = 0; path < M; ++path) {
        a[path] = tangent_fx(p, path, x, t) * std::exp(p.tables().foreign_rate_integral(x, t));
      }
      const Summary s = summarize(a);
      report("tangent fx " + cfg.model.fx[static_cast<std::size_t>(x)].name + " " + cfg.calendar.iso(t), s.mean, 1.0,
             s.std_error);
    }
  }
  log << (failures == 0 ? "all checks passed\n" : std::to_string(failures) + " checks failed\n");
  return failures == 0 ? 0 : 1;
}

int cmd_price(const RunConfig& cfg, std::ostream& log, std::size_t dump_paths, std::size_t dump_index) {
  const PricedRun run = price_run(cfg, cfg.regressor);
  {
    auto out = open_out(cfg, "value.csv");
    out << "regressor,paths,seed,value,std_error\n";
    out << to_string(cfg.regressor.kind) << ',' << cfg.optimisation_paths << ',' << cfg.optimisation_seed << ','
        << fmt(run.policy.value) << ',' << fmt(run.policy.std_error) << '\n';
  }
  Archive a;
  a.config_hash = cfg.policy_hash();
  a.paths = cfg.optimisation_paths;
  a.seed = cfg.optimisation_seed;
  a.policy = run.policy;
  const auto file = (std::filesystem::path(cfg.output_dir) / "policy.swgh").string();
  save_archive(file, a);
  if (dump_paths > 0) dump_paths_csv(*run.paths, (std::filesystem::path(cfg.output_dir) / "paths.csv").string(), dump_paths);
  if (dump_index > 0) run.index->dump_csv((std::filesystem::path(cfg.output_dir) / "index.csv").string(), dump_index);
  log << "value " << fmt(run.policy.value) << " +- " << fmt(run.policy.std_error) << " (archive " << file
      << ", config " << hex(a.config_hash) << ")\n";
  return 0;
}

int cmd_backtest(const RunConfig& cfg, const std::string& archive, std::ostream& log) {
  Archive a = load_archive(archive);
  const std::uint64_t h = cfg.policy_hash();
  if (a.config_hash != h) {
    throw std::runtime_error("archive '" + archive + "' was built from a different configuration (archive hash " +
                             hex(a.config_hash) + ", configuration hash " + hex(h) +
                             "); rerun price with this configuration");
  }
  PricedRun run;
  run.paths = std::make_shared<PathSet>(simulate(cfg.model, a.paths, a.seed));
  run.index = std::make_shared<IndexPaths>(cfg.index, *run.paths);
  run.policy = std::move(a.policy);
  const BacktestResult r = backtest_run(cfg, run, cfg.plans);
  write_backtest(cfg, r, "");
  {
    auto out = open_out(cfg, "value.csv");
    out << "regressor,paths,seed,value,std_error,simulation_value,simulation_std_error\n";
    out << to_string(run.policy.regressor.kind) << ',' << a.paths << ',' << a.seed << ',' << fmt(run.policy.value)
        << ',' << fmt(run.policy.std_error) << ',' << fmt(r.unhedged.mean) << ',' << fmt(r.unhedged.std_error) << '\n';
  }
  log << "unhedged std " << fmt(r.unhedged.std) << '\n';
  for (const auto& p : r.plans) log << p.plan << " std " << fmt(p.pnl.std) << '\n';
  return 0;
}

std::vector<RegressorRow> study_regressors(const RunConfig& cfg, std::ostream& log,
                                           const std::vector<HedgePlan>& plans) {
  std::vector<HedgePlan> use = plans;
  if (use.empty()) {
    for (const auto& p : component_plans(static_cast<int>(cfg.model.commodities.size()),
                                         static_cast<int>(cfg.model.fx.size()))) {
      if (p.name == "total") use.push_back(p);
    }
  }
  std::vector<RegressorRow> rows;
  for (RegressorKind kind : {RegressorKind::SpotOnly, RegressorKind::SpotAndIndex, RegressorKind::SpotIndexPartial}) {
    RegressorSpec r = cfg.regressor;
    r.kind = kind;
    const PricedRun run = price_run(cfg, r);
    RegressorRow row;
    row.kind = kind;
    row.value = run.policy.value;
    row.std_error = run.policy.std_error;
    row.backtest = backtest_run(cfg, run, use);
    log << to_string(kind) << " value " << fmt(row.value) << " hedged std " << fmt(row.backtest.plans.front().pnl.std)
        << '\n';
    rows.push_back(std::move(row));
  }
  auto out = open_out(cfg, "regressors.csv");
  out << "regressor,value,std_error,simulation_value,simulation_std_error,std_unhedged,std_hedged,std_hedged_bootstrap_se\n";
  for (const auto& row : rows) {
    const auto& b = row.backtest;
    out << to_string(row.kind) << ',' << fmt(row.value) << ',' << fmt(row.std_error) << ',' << fmt(b.unhedged.mean)
        << ',' << fmt(b.unhedged.std_error) << ',' << fmt(b.unhedged.std) << ',' << fmt(b.plans.front().pnl.std)
        << ',' << fmt(b.plans.front().std_se) << '\n';
  }
  return rows;
}

int cmd_study_regressors(const RunConfig& cfg, std::ostream& log) {
  study_regressors(cfg, log);
  return 0;
}

int cmd_study_components(const RunConfig& cfg, std::ostream& log) {
  const PricedRun run = price_run(cfg, cfg.regressor);
  const BacktestResult r = backtest_run(cfg, run,
                                        component_plans(static_cast<int>(cfg.model.commodities.size()),
                                                        static_cast<int>(cfg.model.fx.size())));
  write_backtest(cfg, r, "components_");
  auto out = open_out(cfg, "components.csv");
  out << "plan,std,std_bootstrap_se,std_ratio\n";
  out << "unhedged," << fmt(r.unhedged.std) << ',' << fmt(r.unhedged_std_se) << ",1\n";
  for (const auto& p : r.plans) {
    out << p.plan << ',' << fmt(p.pnl.std) << ',' << fmt(p.std_se) << ',' << fmt(p.ratio) << '\n';
    log << p.plan << " std " << fmt(p.pnl.std) << '\n';
  }
  return 0;
}

int cmd_study_frequency(const RunConfig& cfg, std::ostream& log) {
  const int nc = static_cast<int>(cfg.model.commodities.size());
  const int nx = static_cast<int>(cfg.model.fx.size());
  std::vector<HedgePlan> plans = frequency_plans(nc, nx);
  const auto thin = thinning_plans(nc, nx);
  plans.insert(plans.end(), thin.begin(), thin.end());
  const PricedRun run = price_run(cfg, cfg.regressor);
  const BacktestResult r = backtest_run(cfg, run, plans);
  write_backtest(cfg, r, "frequency_");
  const std::size_t daily = column_of(r, plans.front().name);
  auto out = open_out(cfg, "frequency.csv");
  out << "plan,std,std_bootstrap_se,change_vs_daily,change_bootstrap_se\n";
  for (std::size_t i = 0; i < r.plans.size(); ++i) {
    const auto& p = r.plans[i];
    const double base = r.plans[daily - 1].pnl.std;
    out << p.plan << ',' << fmt(p.pnl.std) << ',' << fmt(p.std_se) << ',' << fmt(p.pnl.std / base - 1.0) << ','
        << fmt(bootstrap_ratio_se(r, daily, i + 1)) << '\n';
    log << p.plan << " std " << fmt(p.pnl.std) << '\n';
  }
  return 0;
}

}  // namespace swing
