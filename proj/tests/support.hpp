#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "swing/config.hpp"
#include "swing/contract.hpp"
#include "swing/hedge.hpp"
#include "swing/model.hpp"
#include "swing/optimize.hpp"

namespace swing::testing {

// Four-scenario tree over days 0 .. 3: the paths split into two nodes at
// day 1, stay on their node through day 2 and separate at day 3. Gas is
// exercisable on days 1 .. 3; the index has resets on days 1 and 3, one
// oil component converted through one exchange rate.
struct Tree {
  MarketModel model;
  ContractSpec contract;
  IndexSpec index;
  VolumeGrid grid;
  RegressorSpec regressor;
  std::vector<ProductCalendar> calendars;
  PathSet paths;
};

// Multiplicative bumps of the initial forward of one commodity at one day
// and of the exchange rate level.
struct Bump {
  int commodity = -1;
  Day day = -1;
  double factor = 1.0;
  double fx_factor = 1.0;
};

inline Tree make_tree(const Bump& bump = {}) {
  Tree t;
  t.model.horizon = 3;
  CommodityModel gas{"gas", {Factor{0.5, 1.0}}, {5.0, 5.2, 4.9, 5.1}};
  CommodityModel oil{"oil", {Factor{0.3, 0.5}}, {60.0, 61.0, 59.0, 60.0}};
  t.model.commodities = {gas, oil};
  if (bump.commodity >= 0) {
    t.model.commodities[static_cast<std::size_t>(bump.commodity)]
        .initial_curve[static_cast<std::size_t>(bump.day)] *= bump.factor;
  }
  t.model.fx = {FxModel{"usd", 0.8 * bump.fx_factor, 0.1, VolCurve(0.0)}};
  t.model.correlation = Eigen::MatrixXd::Identity(3, 3);
  t.model.validate();

  t.contract = {1, 3, 1.0, 1.0, 2.0};
  t.grid = {1.0, 1.0};

  t.index.a0 = 2.0;
  t.index.resets = {1, 3};
  t.index.last_day = 3;
  IndexComponent c;
  c.commodity = 1;
  c.weight = 0.05;
  c.offset = 45.0;
  c.lag = {0, 0};
  c.window = {1, 2};
  c.fx = 0;
  t.index.components = {c};
  t.index.validate(t.contract, t.model);

  t.regressor.kind = RegressorKind::SpotOnly;
  t.regressor.cells = {1, 1, 1};
  t.regressor.degree = {1, 1, 1};

  // Gas and oil log-factor states per path and day; node A = paths 0, 1.
  const double gas_w[4][4] = {{0, 0.25, -0.3, 0.6}, {0, 0.25, -0.3, -0.7}, {0, -0.5, 0.4, 0.35}, {0, -0.5, 0.4, -0.9}};
  const double oil_w[4][4] = {{0, 0.1, 0.02, 0.3}, {0, 0.1, 0.02, -0.2}, {0, -0.05, -0.1, 0.1}, {0, -0.05, -0.1, 0.0}};
  const double fx[4][4] = {{0.8, 0.82, 0.81, 0.8}, {0.8, 0.82, 0.81, 0.83}, {0.8, 0.79, 0.77, 0.78},
                           {0.8, 0.79, 0.77, 0.76}};
  std::vector<std::vector<std::vector<double>>> w(4), x(4);
  for (int p = 0; p < 4; ++p) {
    for (int d = 0; d < 4; ++d) {
      w[static_cast<std::size_t>(p)].push_back({gas_w[p][d], oil_w[p][d]});
      x[static_cast<std::size_t>(p)].push_back({fx[p][d] * bump.fx_factor});
    }
  }
  t.paths = PathSet::from_states(t.model, w, x);

  std::vector<ProductCalendar::Quote> gas_quotes, oil_quotes;
  for (Day m = 1; m <= 3; ++m) gas_quotes.push_back({{m, m}, 0, m - 1});
  for (Day m = 1; m <= 2; ++m) oil_quotes.push_back({{m, m}, 0, m - 1});
  t.calendars = {ProductCalendar::listed(gas_quotes, 1, 3), ProductCalendar::listed(oil_quotes, 0, 2)};
  return t;
}

// Index on day i of the tree, evaluated from the spots directly.
inline double tree_index(const Tree& t, std::size_t path, Day i) {
  const auto& c = t.index.components.front();
  const int k = i < 3 ? 0 : 1;
  const Day reset = t.index.resets[static_cast<std::size_t>(k)];
  const Day begin = reset - c.window[static_cast<std::size_t>(k)];
  double avg = 0.0;
  for (Day m = begin; m < reset; ++m) avg += t.paths.spot(path, m, 1);
  avg /= static_cast<double>(reset - begin);
  return t.index.a0 + c.weight * (avg - c.offset) * t.paths.fx(path, reset, 0);
}

// Optimal value by enumeration of every adapted 0/1 policy: the day 1 and
// day 2 decisions depend on the node, the day 3 decision on the path.
inline double tree_oracle_value(const Tree& t) {
  double best = -std::numeric_limits<double>::infinity();
  const double q = t.contract.q_max;
  for (int code = 0; code < 256; ++code) {
    double total = 0.0;
    bool ok = true;
    for (std::size_t path = 0; path < 4 && ok; ++path) {
      const int node = path < 2 ? 0 : 1;
      const int take[3] = {(code >> node) & 1, (code >> (2 + node)) & 1, (code >> (4 + static_cast<int>(path))) & 1};
      double volume = 0.0;
      for (Day d = 1; d <= 3; ++d) {
        const double v = q * take[d - 1];
        volume += v;
        total += v * (t.paths.spot(path, d, 0) - tree_index(t, path, d));
      }
      ok = volume >= t.contract.Q_min - 1e-12 && volume <= t.contract.Q_max + 1e-12;
    }
    if (ok) best = std::max(best, total / 4.0);
  }
  return best;
}

// Conditional delta at day t, level and path from a replay view.
inline double view_delta(const DeltaView& v, const Target& target, int level, std::size_t path) {
  std::vector<double> coef(static_cast<std::size_t>(v.basis->coefficient_count()));
  v.fit(target, level, coef.data());
  return v.scale(target) * v.basis->evaluate_sample(coef.data(), path);
}

struct TreeDelta {
  std::string name;
  double replay = 0.0;
  double oracle = 0.0;
};

// Day-0 deltas of every gas product, oil product and the exchange rate,
// from the replay and from central differences of the enumerated value.
inline std::vector<TreeDelta> tree_deltas(double rel_bump = 1e-6) {
  const Tree t = make_tree();
  const IndexPaths ix(t.index, t.paths);
  HedgeReplay replay(t.paths, ix, t.contract, t.grid, t.regressor, t.calendars);
  std::vector<TreeDelta> out;
  replay.run([&](const DeltaView& v) {
    if (v.t != 0) return;
    for (int j = 0; j < 2; ++j) {
      const auto& prods = v.products(j);
      for (std::size_t k = 0; k < prods.size(); ++k) {
        const Target target{j == 0 ? TargetKind::Gas : TargetKind::Commodity, j, static_cast<int>(k)};
        const Day m = prods[k].begin;
        Bump up{j, m, 1.0 + rel_bump, 1.0};
        Bump down{j, m, 1.0 - rel_bump, 1.0};
        const double f0 = t.model.commodities[static_cast<std::size_t>(j)].initial(m);
        const double fd = (tree_oracle_value(make_tree(up)) - tree_oracle_value(make_tree(down))) / (2.0 * rel_bump * f0);
        out.push_back({(j == 0 ? "gas day " : "oil day ") + std::to_string(m), view_delta(v, target, 0, 0), fd});
      }
    }
    const double x0 = t.model.fx.front().spot;
    const double fd = (tree_oracle_value(make_tree({-1, -1, 1.0, 1.0 + rel_bump})) -
                       tree_oracle_value(make_tree({-1, -1, 1.0, 1.0 - rel_bump}))) /
                      (2.0 * rel_bump * x0);
    out.push_back({"fx", view_delta(v, Target{TargetKind::Fx, 0, 0}, 0, 0), fd});
  });
  return out;
}

// Small two-market configuration on a six-month exercise window, for
// pipeline tests that must run in seconds.
inline std::string small_config_json(double gas_sigma = 0.5, double fx_sigma = 0.11) {
  const std::string s = std::to_string(gas_sigma);
  return std::string(R"({
  "valuation_date": "2006-10-01",
  "horizon": "2007-06-30",
  "commodities": [
    {"name": "gas", "curve": 5.8824,
     "factors": [{"sigma": )") + s + R"(, "mean_reversion": 20.0}, {"sigma": 0.1, "mean_reversion": 0.0}]},
    {"name": "brent", "curve": 60.0,
     "factors": [{"sigma": 0.28, "mean_reversion": 0.1}, {"sigma": 0.1, "mean_reversion": 0.0}]}
  ],
  "fx": [{"name": "usd", "spot": 0.8, "sigma": )" + std::to_string(fx_sigma) + R"(, "foreign_rate": 0.0}],
  "correlation": [{"a": "brent/1", "b": "gas/1", "rho": 0.3}],
  "contract": {"start": "2007-01-01", "end": "2007-06-30", "q_max": 1.0, "Q_min": 60, "Q_max": 120},
  "index": {
    "a0": 1.0,
    "resets": "monthly",
    "components": [
      {"commodity": "brent", "weight": 0.1, "offset": 20.0, "window_months": 3, "lag_months": 0, "fx": "usd"}
    ]
  },
  "grid": {"volume_step": 1.0, "control_step": 0.5},
  "regressor": {"kind": "spot_index_partial", "cells": [4, 3, 1], "degree": [1, 1, 1]},
  "products": {"gas": "standard", "brent": "standard"},
  "hedge": {"plans": ["components"], "tracked": [{"name": "fx", "fx": "usd"}], "tracked_paths": 2,
            "bootstrap": 50},
  "paths": {"optimisation": 400, "simulation": 400},
  "seeds": {"optimisation": 11, "simulation": 12},
  "output_dir": "out"
})";
}

}  // namespace swing::testing
