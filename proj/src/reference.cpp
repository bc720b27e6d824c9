#include "swing/reference.hpp"

#include <algorithm>
#include <map>
#include <memory>

namespace swing::reference {

BackwardResult backward_solve(const PathSet& p, const IndexPaths& ix, const ContractSpec& c,
                              const VolumeGrid& g, const RegressorSpec& r) {
  const auto levels = reachable_levels(c, g);
  const std::size_t M = p.paths();
  BackwardResult out;
  out.control.resize(static_cast<std::size_t>(c.t_end) + 1);

  // Pathwise value per level of the next day.
  std::vector<std::vector<double>> j_next(static_cast<std::size_t>(levels.back().size()),
                                          std::vector<double>(M, 0.0));
  for (Day t = c.t_end; t >= 0; --t) {
    const LevelRange cur = levels[static_cast<std::size_t>(t)];
    const LevelRange nxt = levels[static_cast<std::size_t>(t) + 1];
    const bool exercise = c.exercisable(t);
    auto value_at = [&](std::size_t path, double Q) {
      const GridPoint gp = next_point(g, nxt, Q);
      const double v = j_next[static_cast<std::size_t>(gp.level - nxt.lo)][path];
      if (gp.frac == 0.0) return v;
      const double u = j_next[static_cast<std::size_t>(gp.level + 1 - nxt.lo)][path];
      return v + gp.frac * (u - v);
    };

    std::vector<std::vector<double>> cands(static_cast<std::size_t>(cur.size()));
    bool open = false;
    for (int l = cur.lo; l <= cur.hi; ++l) {
      auto& cd = cands[static_cast<std::size_t>(l - cur.lo)];
      cd = exercise ? candidate_controls(g, control_range(c, g, nxt, t, g.volume(l))) : std::vector<double>{0.0};
      open = open || cd.size() > 1;
    }

    std::unique_ptr<LocalBasis> basis;
    std::map<long, std::vector<double>> fitted;  // keyed by next volume in control steps
    auto key = [&](double Q) { return std::lround(Q / g.control_step * 64.0); };
    if (open) {
      const auto all = regressor_dims(r, c, ix.spec(), t);
      std::vector<int> cells;
      std::vector<int> degree;
      for (int d : all) {
        cells.push_back(r.cells[static_cast<std::size_t>(d)]);
        degree.push_back(r.degree[static_cast<std::size_t>(d)]);
      }
      basis = std::make_unique<LocalBasis>(regressor_matrix(all, t, p, ix), cells, degree);
    }
    auto continuation = [&](double Q, std::size_t path) {
      auto it = fitted.find(key(Q));
      if (it == fitted.end()) {
        std::vector<double> ys(M);
        for (std::size_t i = 0; i < M; ++i) ys[i] = value_at(i, Q);
        const auto coef = basis->fit(ys.data());
        std::vector<double> est(M);
        for (std::size_t i = 0; i < M; ++i) est[i] = basis->evaluate_sample(coef.data(), i);
        it = fitted.emplace(key(Q), std::move(est)).first;
      }
      return it->second[path];
    };

    std::vector<std::vector<double>> j_cur(static_cast<std::size_t>(cur.size()), std::vector<double>(M));
    auto& ctl = out.control[static_cast<std::size_t>(t)];
    if (exercise) ctl.assign(static_cast<std::size_t>(cur.size()), std::vector<double>(M));
    for (int l = cur.lo; l <= cur.hi; ++l) {
      const auto li = static_cast<std::size_t>(l - cur.lo);
      const double Q = g.volume(l);
      for (std::size_t path = 0; path < M; ++path) {
        const double pay = exercise ? unit_payoff(p, ix, path, t) : 0.0;
        double q = cands[li].front();
        if (cands[li].size() > 1) {
          double best = 0.0;
          for (std::size_t a = 0; a < cands[li].size(); ++a) {
            const double v = cands[li][a] * pay + continuation(Q + cands[li][a], path);
            if (a == 0 || v > best) {
              best = v;
              q = cands[li][a];
            }
          }
        }
        if (exercise) ctl[li][path] = q;
        j_cur[li][path] = q * pay + value_at(path, Q + q);
      }
    }
    j_next = std::move(j_cur);
  }
  double sum = 0.0;
  for (double v : j_next.front()) sum += v;
  out.value = sum / static_cast<double>(M);
  return out;
}

std::vector<std::vector<double>> gas_day_ledgers(const PathSet& p, const IndexPaths& ix, const ContractSpec& c,
                                                 const VolumeGrid& g, const RegressorSpec& r, Day t_read) {
  const std::size_t M = p.paths();
  std::vector<std::vector<double>> d_next;  // per m in (t + 1, t_end]
  std::vector<double> control_next;
  LevelRange next = reachable_levels(c, g).back();
  std::vector<std::vector<double>> out;
  BackwardOptions opt;
  opt.keep_rules = false;
  opt.observer = [&](const BackwardStep& s) {
    const Day t = s.t;
    if (t < t_read) return;
    const LevelRange cur = s.current;
    std::vector<std::vector<double>> d(static_cast<std::size_t>(std::max(0, c.t_end - t)));
    for (Day m = t + 1; m <= c.t_end; ++m) {
      std::vector<double> h(static_cast<std::size_t>(next.size()) * M, 0.0);
      if (m == t + 1 && c.exercisable(t + 1)) {
        for (std::size_t k = 0; k < h.size(); ++k) h[k] = control_next[k] * p.spot(k % M, t + 1, 0);
      } else if (m > t + 1) {
        h = d_next[static_cast<std::size_t>(m - t - 2)];
      }
      auto& dm = d[static_cast<std::size_t>(m - t - 1)];
      dm.assign(static_cast<std::size_t>(cur.size()) * M, 0.0);
      for (int l = cur.lo; l <= cur.hi; ++l) {
        for (std::size_t path = 0; path < M; ++path) {
          const GridPoint gp = next_point(g, next, g.volume(l) + s.q(l, path));
          const std::size_t at = static_cast<std::size_t>(gp.level - next.lo) * M + path;
          const double v = gp.frac == 0.0 ? h[at] : h[at] + gp.frac * (h[at + M] - h[at]);
          dm[static_cast<std::size_t>(l - cur.lo) * M + path] = v;
        }
      }
    }
    d_next = std::move(d);
    control_next = *s.control;
    next = cur;
    if (t == t_read) out = d_next;
  };
  backward_solve(p, ix, c, g, r, opt);
  return out;
}

std::vector<double> forward_strip(const PathSet& p, int commodity, Day s, Day lo, Day hi) {
  const auto n = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> out(p.paths() * n);
  for (std::size_t path = 0; path < p.paths(); ++path) {
    for (Day m = lo; m <= hi; ++m) {
      out[path * n + static_cast<std::size_t>(m - lo)] = forward_price(p, path, commodity, std::min(s, m), m);
    }
  }
  return out;
}

}  // namespace swing::reference
