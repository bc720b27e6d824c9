#include "swing/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "swing/rng.hpp"
#include "swing/strips.hpp"

namespace swing {

std::string to_string(Frequency f) {
  switch (f) {
    case Frequency::Daily: return "daily";
    case Frequency::TwiceWeekly: return "twice_weekly";
    case Frequency::Weekly: return "weekly";
    case Frequency::TwiceMonthly: return "twice_monthly";
    case Frequency::Monthly: return "monthly";
    case Frequency::Quarterly: return "quarterly";
    case Frequency::Once: return "once";
  }
  return "?";
}

Frequency frequency_from_string(const std::string& s) {
  for (Frequency f : {Frequency::Daily, Frequency::TwiceWeekly, Frequency::Weekly, Frequency::TwiceMonthly,
                      Frequency::Monthly, Frequency::Quarterly, Frequency::Once}) {
    if (to_string(f) == s) return f;
  }
  throw std::invalid_argument("unknown frequency '" + s + "'");
}

bool Schedule::rebalances(const Calendar& cal, Day t_start, Day d) const {
  if (d == 0) return true;
  if (std::find(extra.begin(), extra.end(), d) != extra.end()) return true;
  switch (d < t_start ? before : after) {
    case Frequency::Daily: return true;
    case Frequency::TwiceWeekly: {
      const unsigned w = cal.iso_weekday(d);
      return w == 1 || w == 4;
    }
    case Frequency::Weekly: return cal.iso_weekday(d) == 1;
    case Frequency::TwiceMonthly: {
      const unsigned dom = cal.day_of_month(d);
      return dom == 1 || dom == 16;
    }
    case Frequency::Monthly: return cal.day_of_month(d) == 1;
    case Frequency::Quarterly: return cal.day_of_month(d) == 1 && (cal.month_number(d) - 1) % 3 == 0;
    case Frequency::Once: return false;
  }
  return false;
}

ForwardWalk forward_walk(const Policy& pol, const PathSet& fresh, const IndexPaths& fresh_ix) {
  const ContractSpec& c = pol.contract;
  const VolumeGrid& g = pol.grid;
  ForwardWalk w;
  w.paths = fresh.paths();
  const std::size_t M = w.paths;
  w.volume.assign((static_cast<std::size_t>(c.t_end) + 2) * M, 0.0);
  w.cash.assign(M, 0.0);
  w.mean_take.assign(static_cast<std::size_t>(c.t_end) + 1, 0.0);
  std::vector<double> take(M);
  for (Day t = 0; t <= c.t_end; ++t) {
    const auto row = static_cast<std::size_t>(t) * M;
    if (!c.exercisable(t)) {
      std::copy(w.volume.begin() + static_cast<std::ptrdiff_t>(row),
                w.volume.begin() + static_cast<std::ptrdiff_t>(row + M),
                w.volume.begin() + static_cast<std::ptrdiff_t>(row + M));
      continue;
    }
    const DateRule& rule = pol.rule(t);
    const LevelRange nxt = pol.levels[static_cast<std::size_t>(t) + 1];
#pragma omp parallel for schedule(static)
    for (std::int64_t pi = 0; pi < static_cast<std::int64_t>(M); ++pi) {
      const auto path = static_cast<std::size_t>(pi);
      const double Q = w.volume[row + path];
      const auto cands = candidate_controls(g, control_range(c, g, nxt, t, Q));
      const double pay = unit_payoff(fresh, fresh_ix, path, t);
      double q = cands.front();
      if (cands.size() > 1 && rule.basis) {
        double x[3];
        regressor_row(rule.dims, t, fresh, fresh_ix, path, x);
        double best = 0.0;
        for (std::size_t a = 0; a < cands.size(); ++a) {
          const double v = cands[a] * pay + rule.continuation(g, Q + cands[a], x);
          if (a == 0 || v > best) {
            best = v;
            q = cands[a];
          }
        }
      }
      take[path] = q;
      w.cash[path] += q * pay;
      w.volume[row + M + path] = Q + q;
    }
    double s = 0.0;
    for (double q : take) s += q;
    w.mean_take[static_cast<std::size_t>(t)] = s / static_cast<double>(M);
  }
  return w;
}

namespace {

// One hedged leg: gas, an index commodity or an exchange rate.
struct Family {
  TargetKind kind;
  int index;
  Day end;  // positions are held at most until this day
  std::vector<Schedule> schedules;
  std::vector<std::vector<int>> plans_of;  // per schedule, plan ids
  std::vector<Day> next;                   // per schedule, later rebalance (or end)
  std::unique_ptr<ForwardStrips> strips;
};

double fx_asset(const PathSet& f, std::size_t path, int x, Day s) {
  return f.fx(path, s, x) * std::exp(f.tables().foreign_rate_integral(x, s));
}

}  // namespace

HedgeReport run_backtest(const Policy& pol, const BacktestSetup& setup, const std::vector<HedgePlan>& plans) {
  const PathSet& fresh = *setup.fresh;
  const IndexPaths& fresh_ix = *setup.fresh_index;
  const ContractSpec& c = pol.contract;
  const VolumeGrid& g = pol.grid;
  const IndexSpec& ix = setup.optimisation_index->spec();
  const std::size_t M = fresh.paths();

  HedgeReport rep;
  const ForwardWalk walk = forward_walk(pol, fresh, fresh_ix);
  rep.cash = walk.cash;
  rep.mean_take = walk.mean_take;
  rep.simulation_value = summarize(walk.cash).mean;
  for (const auto& plan : plans) {
    rep.plan_names.push_back(plan.name);
    rep.total.push_back(walk.cash);
  }
  for (const auto& tr : setup.tracked) rep.tracked_names.push_back(tr.name);

  std::vector<Family> fams;
  auto family_of = [&](TargetKind kind, int index) -> Family& {
    for (auto& f : fams) {
      if (f.kind == kind && f.index == index) return f;
    }
    Family f;
    f.kind = kind;
    f.index = index;
    if (kind == TargetKind::Fx) {
      f.end = ix.resets.back();
    } else {
      const ProductCalendar& pc = setup.products[static_cast<std::size_t>(index)];
      f.end = pc.hi();
      f.strips = std::make_unique<ForwardStrips>(fresh, index, pc.lo(), pc.hi());
    }
    fams.push_back(std::move(f));
    return fams.back();
  };
  for (std::size_t pid = 0; pid < plans.size(); ++pid) {
    const auto& plan = plans[pid];
    auto attach = [&](Family& f, const Schedule& s) {
      auto it = std::find(f.schedules.begin(), f.schedules.end(), s);
      std::size_t sid = static_cast<std::size_t>(it - f.schedules.begin());
      if (it == f.schedules.end()) {
        f.schedules.push_back(s);
        f.plans_of.emplace_back();
        f.next.push_back(f.end);
      }
      f.plans_of[sid].push_back(static_cast<int>(pid));
    };
    if (plan.gas) attach(family_of(TargetKind::Gas, 0), plan.gas_schedule);
    for (int j : plan.commodities) {
      const ProductCalendar& pc = setup.products.at(static_cast<std::size_t>(j));
      if (pc.hi() >= pc.lo()) attach(family_of(TargetKind::Commodity, j), plan.index_schedule);
    }
    for (int x : plan.fx) attach(family_of(TargetKind::Fx, x), plan.index_schedule);
  }

  HedgeReplay replay(*setup.optimisation, *setup.optimisation_index, c, g, pol.regressor, setup.products);
  const std::size_t tracked_paths = std::min(setup.tracked_paths, M);

  rep.replay_value = replay.run([&](const DeltaView& view) {
    const Day t = view.t;
    std::vector<std::vector<bool>> active(fams.size());
    bool any = false;
    for (std::size_t fi = 0; fi < fams.size(); ++fi) {
      const Family& f = fams[fi];
      active[fi].assign(f.schedules.size(), false);
      if (t >= f.end) continue;
      for (std::size_t s = 0; s < f.schedules.size(); ++s) {
        active[fi][s] = f.schedules[s].rebalances(setup.calendar, c.t_start, t);
        any = any || active[fi][s];
      }
    }
    if (!any) return;

    // Fresh regressors and volume brackets.
    const auto nd = static_cast<std::size_t>(view.dims->size());
    std::vector<double> x(M * nd);
    std::vector<GridPoint> gp(M);
    std::vector<int> needed;
    for (std::size_t path = 0; path < M; ++path) {
      regressor_row(*view.dims, t, fresh, fresh_ix, path, &x[path * nd]);
      gp[path] = next_point(g, view.levels, walk.q_before(t, path));
      needed.push_back(gp[path].level);
      if (gp[path].frac != 0.0) needed.push_back(gp[path].level + 1);
    }
    std::sort(needed.begin(), needed.end());
    needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
    auto slot = [&](int level) {
      return static_cast<std::size_t>(std::lower_bound(needed.begin(), needed.end(), level) - needed.begin());
    };
    const auto nc = static_cast<std::size_t>(view.basis->coefficient_count());

    auto deltas = [&](const Target& target, std::vector<double>& out) {
      std::vector<double> coef(needed.size() * nc);
      view.fit_levels(target, needed, coef.data());
      const double scale = view.scale(target);
      out.resize(M);
#pragma omp parallel for schedule(static)
      for (std::int64_t pi = 0; pi < static_cast<std::int64_t>(M); ++pi) {
        const auto path = static_cast<std::size_t>(pi);
        const double* xp = &x[path * nd];
        const std::size_t s = slot(gp[path].level);
        double v = view.basis->evaluate(&coef[s * nc], xp);
        if (gp[path].frac != 0.0) {
          const double u = view.basis->evaluate(&coef[(s + 1) * nc], xp);
          v += gp[path].frac * (u - v);
        }
        out[path] = scale * v;
      }
    };

    std::vector<std::vector<double>> tracked_values(setup.tracked.size(),
                                                    std::vector<double>(tracked_paths, std::nan("")));
    std::vector<bool> tracked_set(setup.tracked.size(), false);
    std::vector<double> delta;
    for (std::size_t fi = 0; fi < fams.size(); ++fi) {
      Family& f = fams[fi];
      const bool rebalance = std::find(active[fi].begin(), active[fi].end(), true) != active[fi].end();
      if (!rebalance) continue;
      if (f.kind == TargetKind::Fx) {
        const Target target{TargetKind::Fx, f.index, 0};
        if (view.vanishes(target)) {
          delta.assign(M, 0.0);
        } else {
          deltas(target, delta);
        }
        const double carry = std::exp(-fresh.tables().foreign_rate_integral(f.index, t));
        for (std::size_t s = 0; s < f.schedules.size(); ++s) {
          if (!active[fi][s]) continue;
          const Day until = f.next[s];
          for (int pid : f.plans_of[s]) {
            auto& tot = rep.total[static_cast<std::size_t>(pid)];
            for (std::size_t path = 0; path < M; ++path) {
              tot[path] -= delta[path] * carry *
                           (fx_asset(fresh, path, f.index, until) - fx_asset(fresh, path, f.index, t));
            }
          }
          f.next[s] = t;
        }
        for (std::size_t k = 0; k < setup.tracked.size(); ++k) {
          if (setup.tracked[k].kind == TargetKind::Fx && setup.tracked[k].index == f.index) {
            for (std::size_t path = 0; path < tracked_paths; ++path) tracked_values[k][path] = delta[path];
            tracked_set[k] = true;
          }
        }
        continue;
      }

      const auto& prods = view.products(f.index);
      if (prods.empty()) continue;
      auto& now = f.strips->get(t);
      std::vector<double> exposure_num(setup.tracked.size() * tracked_paths, 0.0);
      std::vector<int> exposure_days(setup.tracked.size(), 0);
      for (std::size_t pi = 0; pi < prods.size(); ++pi) {
        const Target target{f.kind, f.index, static_cast<int>(pi)};
        const bool held = !view.vanishes(target);
        if (held) {
          deltas(target, delta);
          f.strips->ensure(now, prods[pi].end);
        } else {
          delta.assign(M, 0.0);
        }
        for (std::size_t s = 0; s < f.schedules.size(); ++s) {
          if (!active[fi][s] || !held) continue;
          auto& later = f.strips->get(f.next[s]);
          f.strips->ensure(later, prods[pi].end);
          for (int pid : f.plans_of[s]) {
            auto& tot = rep.total[static_cast<std::size_t>(pid)];
            for (std::size_t path = 0; path < M; ++path) {
              tot[path] -= delta[path] * (f.strips->sum(later, path, prods[pi]) - f.strips->sum(now, path, prods[pi]));
            }
          }
        }
        for (std::size_t k = 0; k < setup.tracked.size(); ++k) {
          const auto& tr = setup.tracked[k];
          if (tr.kind == TargetKind::Fx || tr.index != f.index) continue;
          const Day b = std::max({prods[pi].begin, tr.month_begin, t + 1});
          const Day e = std::min(prods[pi].end, tr.month_end);
          if (e < b) continue;
          exposure_days[k] += e - b + 1;
          for (std::size_t path = 0; path < tracked_paths; ++path) {
            exposure_num[k * tracked_paths + path] += delta[path] * (e - b + 1);
          }
        }
      }
      for (std::size_t k = 0; k < setup.tracked.size(); ++k) {
        if (exposure_days[k] == 0) continue;
        for (std::size_t path = 0; path < tracked_paths; ++path) {
          tracked_values[k][path] = exposure_num[k * tracked_paths + path] / exposure_days[k];
        }
        tracked_set[k] = true;
      }
      for (std::size_t s = 0; s < f.schedules.size(); ++s) {
        if (active[fi][s]) f.next[s] = t;
      }
      std::vector<Day> still;
      for (std::size_t s = 0; s < f.schedules.size(); ++s) still.push_back(f.next[s]);
      f.strips->keep_only(still);
    }

    if (std::find(tracked_set.begin(), tracked_set.end(), true) != tracked_set.end()) {
      for (std::size_t path = 0; path < tracked_paths; ++path) {
        PositionRow row{t, path, {}};
        for (std::size_t k = 0; k < setup.tracked.size(); ++k) row.value.push_back(tracked_values[k][path]);
        rep.positions.push_back(std::move(row));
      }
    }
  });

  std::sort(rep.positions.begin(), rep.positions.end(), [](const PositionRow& a, const PositionRow& b) {
    return a.t != b.t ? a.t < b.t : a.path < b.path;
  });
  if (std::abs(rep.replay_value - pol.value) > 1e-9 * std::max(1.0, std::abs(pol.value))) {
    throw std::runtime_error("backtest: replayed policy value " + std::to_string(rep.replay_value) +
                             " differs from the archived value " + std::to_string(pol.value) +
                             " (optimisation paths or settings changed)");
  }
  return rep;
}

namespace {

std::vector<int> range_from(int first, int last) {
  std::vector<int> v;
  for (int i = first; i <= last; ++i) v.push_back(i);
  return v;
}

}  // namespace

std::vector<HedgePlan> component_plans(int commodities, int fx_count) {
  const auto idx = range_from(1, commodities - 1);
  const auto fx = range_from(0, fx_count - 1);
  std::vector<HedgePlan> out;
  out.push_back({"gas", true, {}, {}, {}, {}});
  out.push_back({"index", false, idx, {}, {}, {}});
  out.push_back({"index_fx", false, idx, fx, {}, {}});
  out.push_back({"fx", false, {}, fx, {}, {}});
  out.push_back({"total", true, idx, fx, {}, {}});
  return out;
}

std::vector<HedgePlan> frequency_plans(int commodities, int fx_count) {
  const auto idx = range_from(1, commodities - 1);
  const auto fx = range_from(0, fx_count - 1);
  std::vector<HedgePlan> out;
  for (Frequency f : {Frequency::Daily, Frequency::TwiceWeekly, Frequency::Weekly, Frequency::TwiceMonthly}) {
    out.push_back({"index_" + to_string(f), true, idx, fx, {}, {f, f, {}}});
  }
  return out;
}

std::vector<HedgePlan> thinning_plans(int commodities, int fx_count) {
  const auto idx = range_from(1, commodities - 1);
  const auto fx = range_from(0, fx_count - 1);
  std::vector<HedgePlan> out;
  for (Frequency f : {Frequency::Weekly, Frequency::TwiceMonthly, Frequency::Monthly, Frequency::Quarterly}) {
    out.push_back({"before_start_" + to_string(f), true, idx, fx, {}, {f, Frequency::Daily, {}}});
  }
  return out;
}

Summary summarize(const std::vector<double>& x) {
  Summary s;
  if (x.empty()) return s;
  double sum = 0.0;
  for (double v : x) sum += v;
  s.mean = sum / static_cast<double>(x.size());
  double sq = 0.0;
  for (double v : x) sq += (v - s.mean) * (v - s.mean);
  s.std = x.size() > 1 ? std::sqrt(sq / static_cast<double>(x.size() - 1)) : 0.0;
  s.std_error = s.std / std::sqrt(static_cast<double>(x.size()));
  return s;
}

std::vector<std::vector<double>> bootstrap_std(const std::vector<const std::vector<double>*>& series,
                                               int replicates, std::uint64_t seed) {
  if (series.empty()) return {};
  const std::size_t n = series.front()->size();
  for (const auto* s : series) {
    if (s->size() != n) throw std::invalid_argument("bootstrap: series differ in length");
  }
  const Philox4x32 rng(seed);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(replicates), std::vector<double>(series.size()));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < replicates; ++r) {
    std::vector<double> sum(series.size(), 0.0);
    std::vector<double> sq(series.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto b = rng({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(i),
                          static_cast<std::uint32_t>(i >> 32), static_cast<std::uint32_t>(RngStream::kBootstrap)});
      auto pick = static_cast<std::size_t>(to_unit_open(b[0], b[1]) * static_cast<double>(n));
      pick = std::min(pick, n - 1);
      for (std::size_t s = 0; s < series.size(); ++s) {
        const double v = (*series[s])[pick];
        sum[s] += v;
        sq[s] += v * v;
      }
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double mean = sum[s] / static_cast<double>(n);
      const double var = (sq[s] - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
      out[static_cast<std::size_t>(r)][s] = std::sqrt(std::max(0.0, var));
    }
  }
  return out;
}

}  // namespace swing
