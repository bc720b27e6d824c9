#include "swing/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "swing/binary_io.hpp"

namespace swing {

namespace {

constexpr double kVolumeTol = 1e-9;

}  // namespace

int VolumeGrid::top_level(const ContractSpec& c) const {
  return static_cast<int>(std::lround(c.Q_max / step));
}

void VolumeGrid::validate(const ContractSpec& c) const {
  if (!(step > 0.0)) throw std::invalid_argument("grid: volume step must be > 0");
  if (!(control_step > 0.0)) throw std::invalid_argument("grid: control step must be > 0");
  const double levels = c.Q_max / step;
  if (std::abs(levels - std::round(levels)) > 1e-9 * std::max(1.0, levels)) {
    throw std::invalid_argument("grid: Q_max must be a multiple of the volume step");
  }
  if (c.q_max > 0.0) {
    const double n = c.q_max / control_step;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
      throw std::invalid_argument("grid: control step must divide q_max");
    }
  }
}

std::vector<LevelRange> reachable_levels(const ContractSpec& c, const VolumeGrid& g) {
  const int top = g.top_level(c);
  std::vector<LevelRange> r(static_cast<std::size_t>(c.t_end) + 2);
  for (Day t = 0; t <= c.t_end; ++t) {
    const auto& prev = r[static_cast<std::size_t>(t)];
    auto& nxt = r[static_cast<std::size_t>(t) + 1];
    if (t < c.t_start) {
      nxt.hi = 0;
    } else {
      const double reach = g.volume(prev.hi) + c.q_max;
      nxt.hi = std::min(top, static_cast<int>(std::ceil(reach / g.step - kVolumeTol)));
    }
  }
  r.back().lo = static_cast<int>(std::ceil(c.Q_min / g.step - kVolumeTol));
  for (Day t = c.t_end; t >= 0; --t) {
    auto& cur = r[static_cast<std::size_t>(t)];
    if (t < c.t_start) {
      cur.lo = 0;
      continue;
    }
    const double need = g.volume(r[static_cast<std::size_t>(t) + 1].lo) - c.q_max;
    cur.lo = std::max(0, static_cast<int>(std::ceil(need / g.step - kVolumeTol)));
  }
  for (std::size_t t = 0; t < r.size(); ++t) {
    if (r[t].lo > r[t].hi) {
      throw std::invalid_argument("contract: volume constraints cannot be met on the grid (day " +
                                  std::to_string(t) + ")");
    }
  }
  if (r[static_cast<std::size_t>(c.t_start)].lo > 0) {
    throw std::invalid_argument("contract: Q_min is unreachable from Q = 0");
  }
  return r;
}

GridPoint locate(const VolumeGrid& g, double Q) {
  const double pos = Q / g.step;
  GridPoint gp;
  gp.level = static_cast<int>(std::floor(pos + kVolumeTol));
  gp.frac = pos - gp.level;
  if (gp.frac < kVolumeTol) gp.frac = 0.0;
  return gp;
}

double interpolate_values(const VolumeGrid& g, int l, double v_l, double v_next, double Q) {
  const double w = (Q - g.volume(l)) / g.step;
  if (w < -kVolumeTol || w > 1.0 + kVolumeTol) {
    throw std::domain_error("interpolate_values: volume outside [Q_l, Q_l+1]");
  }
  if (w <= 0.0) return v_l;
  if (w >= 1.0) return v_next;
  return v_l + w * (v_next - v_l);
}

VolumeRange control_range(const ContractSpec& c, const VolumeGrid& g, const LevelRange& next, Day t,
                          double Q) {
  VolumeRange r = feasible_range(c, t, Q);
  r.lo = std::max(r.lo, g.volume(next.lo) - Q);
  r.hi = std::min(r.hi, g.volume(next.hi) - Q);
  if (r.lo > r.hi + kVolumeTol) {
    throw InfeasibleState("volume " + std::to_string(Q) + " at day " + std::to_string(t) +
                          " has no control reaching the next grid levels");
  }
  r.lo = std::max(r.lo, 0.0);
  r.hi = std::max(r.hi, r.lo);
  return r;
}

std::vector<double> candidate_controls(const VolumeGrid& g, const VolumeRange& r) {
  std::vector<double> out{r.lo};
  const auto first = static_cast<long>(std::floor(r.lo / g.control_step)) + 1;
  for (long k = first;; ++k) {
    const double q = static_cast<double>(k) * g.control_step;
    if (q >= r.hi - kVolumeTol) break;
    if (q > r.lo + kVolumeTol) out.push_back(q);
  }
  if (r.hi > r.lo + kVolumeTol) out.push_back(r.hi);
  return out;
}

std::vector<int> regressor_dims(const RegressorSpec& r, const ContractSpec& c, const IndexSpec& ix, Day t) {
  switch (r.kind) {
    case RegressorKind::SpotOnly:
      return {0};
    case RegressorKind::SpotAndIndex:
      return t < c.t_start ? std::vector<int>{0} : std::vector<int>{0, 1};
    case RegressorKind::SpotIndexPartial: {
      std::vector<int> dims{0};
      if (t >= c.t_start) dims.push_back(1);
      if (t < ix.resets.back() && partial_has_fixings(ix, t)) dims.push_back(2);
      return dims;
    }
  }
  return {0};
}

void regressor_row(const std::vector<int>& dims, Day t, const PathSet& p, const IndexPaths& ix,
                   std::size_t path, double* out) {
  for (std::size_t d = 0; d < dims.size(); ++d) {
    switch (dims[d]) {
      case 0: out[d] = p.spot(path, t, 0); break;
      case 1: out[d] = ix.index_at(t, path); break;
      default: out[d] = ix.partial(t, path); break;
    }
  }
}

Eigen::MatrixXd regressor_matrix(const std::vector<int>& dims, Day t, const PathSet& p, const IndexPaths& ix) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x(
      static_cast<Eigen::Index>(p.paths()), static_cast<Eigen::Index>(dims.size()));
  for (std::size_t path = 0; path < p.paths(); ++path) {
    regressor_row(dims, t, p, ix, path, x.row(static_cast<Eigen::Index>(path)).data());
  }
  return x;
}

double DateRule::continuation(const VolumeGrid& g, double Q, const double* x) const {
  const GridPoint gp = next_point(g, next, Q);
  const double v = basis->evaluate(level_coef(gp.level), x);
  if (gp.frac == 0.0) return v;
  const double u = basis->evaluate(level_coef(gp.level + 1), x);
  return v + gp.frac * (u - v);
}

namespace {

std::vector<int> pick(const std::vector<int>& all, const std::vector<int>& dims) {
  std::vector<int> out;
  for (int d : dims) out.push_back(all[static_cast<std::size_t>(d)]);
  return out;
}

// Interpolated read of a level-major array at level position gp.
inline double read_interp(const std::vector<double>& a, const LevelRange& r, std::size_t paths,
                          std::size_t path, const GridPoint& gp) {
  const double v = a[static_cast<std::size_t>(gp.level - r.lo) * paths + path];
  if (gp.frac == 0.0) return v;
  const double u = a[static_cast<std::size_t>(gp.level + 1 - r.lo) * paths + path];
  return v + gp.frac * (u - v);
}

}  // namespace

Policy backward_solve(const PathSet& p, const IndexPaths& ix, const ContractSpec& c, const VolumeGrid& g,
                      const RegressorSpec& r, const BackwardOptions& opt) {
  c.validate();
  g.validate(c);
  r.validate();
  if (p.horizon() < c.t_end) throw std::invalid_argument("paths do not cover the exercise window");

  Policy pol;
  pol.contract = c;
  pol.grid = g;
  pol.regressor = r;
  pol.levels = reachable_levels(c, g);
  const std::size_t M = p.paths();

  const LevelRange terminal = pol.levels.back();
  std::vector<double> j_next(static_cast<std::size_t>(terminal.size()) * M, 0.0);
  std::vector<double> j_cur;
  std::vector<double> control;
  std::vector<double> estimate;
  std::vector<double> payoff(M);
  if (opt.keep_rules) pol.rules.resize(static_cast<std::size_t>(c.exercise_days()));

  for (Day t = c.t_end; t >= 0; --t) {
    const LevelRange cur = pol.levels[static_cast<std::size_t>(t)];
    const LevelRange nxt = pol.levels[static_cast<std::size_t>(t) + 1];
    const bool exercise = c.exercisable(t);

    // Controls per level (path independent) and whether any choice is open.
    std::vector<std::vector<double>> cands(static_cast<std::size_t>(cur.size()));
    std::vector<std::vector<GridPoint>> points(static_cast<std::size_t>(cur.size()));
    bool open = false;
    for (int l = cur.lo; l <= cur.hi; ++l) {
      auto& cd = cands[static_cast<std::size_t>(l - cur.lo)];
      if (exercise) {
        cd = candidate_controls(g, control_range(c, g, nxt, t, g.volume(l)));
      } else {
        cd = {0.0};
      }
      open = open || cd.size() > 1;
      for (double q : cd) {
        points[static_cast<std::size_t>(l - cur.lo)].push_back(next_point(g, nxt, g.volume(l) + q));
      }
    }

    std::vector<int> dims;
    std::shared_ptr<const LocalBasis> basis;
    if (open || opt.always_partition) {
      dims = regressor_dims(r, c, ix.spec(), t);
      basis = std::make_shared<const LocalBasis>(regressor_matrix(dims, t, p, ix), pick(r.cells, dims),
                                                 pick(r.degree, dims));
    }

    std::vector<double> coef;
    if (open) {
      const auto nc = static_cast<std::size_t>(basis->coefficient_count());
      coef.assign(static_cast<std::size_t>(nxt.size()) * nc, 0.0);
      estimate.assign(static_cast<std::size_t>(nxt.size()) * M, 0.0);
#pragma omp parallel for schedule(dynamic)
      for (int k = 0; k < nxt.size(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        basis->fit_into(&j_next[kk * M], 1, &coef[kk * nc]);
        for (std::size_t path = 0; path < M; ++path) {
          estimate[kk * M + path] = basis->evaluate_sample(&coef[kk * nc], path);
        }
      }
    }

    if (exercise) {
      for (std::size_t path = 0; path < M; ++path) payoff[path] = unit_payoff(p, ix, path, t);
    }

    j_cur.assign(static_cast<std::size_t>(cur.size()) * M, 0.0);
    control.assign(static_cast<std::size_t>(cur.size()) * M, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (int l = cur.lo; l <= cur.hi; ++l) {
      const auto li = static_cast<std::size_t>(l - cur.lo);
      const auto& cd = cands[li];
      const auto& gps = points[li];
      for (std::size_t path = 0; path < M; ++path) {
        std::size_t best = 0;
        if (cd.size() > 1) {
          double best_value = 0.0;
          for (std::size_t a = 0; a < cd.size(); ++a) {
            const double v = cd[a] * payoff[path] + read_interp(estimate, nxt, M, path, gps[a]);
            if (a == 0 || v > best_value) {
              best_value = v;
              best = a;
            }
          }
        }
        const double q = cd[best];
        control[li * M + path] = q;
        j_cur[li * M + path] = (exercise ? q * payoff[path] : 0.0) + read_interp(j_next, nxt, M, path, gps[best]);
      }
    }

    if (opt.observer) {
      BackwardStep step;
      step.t = t;
      step.current = cur;
      step.next = nxt;
      step.control = &control;
      step.basis = basis.get();
      step.dims = &dims;
      step.paths = M;
      opt.observer(step);
    }

    if (exercise && opt.keep_rules) {
      DateRule& rule = pol.rules[static_cast<std::size_t>(t - c.t_start)];
      rule.t = t;
      rule.current = cur;
      rule.next = nxt;
      if (open) {
        rule.dims = dims;
        rule.basis = basis;
        rule.coef = std::move(coef);
      }
    }
    std::swap(j_next, j_cur);
  }

  double sum = 0.0;
  double sq = 0.0;
  for (std::size_t path = 0; path < M; ++path) sum += j_next[path];
  const double mean = sum / static_cast<double>(M);
  for (std::size_t path = 0; path < M; ++path) sq += (j_next[path] - mean) * (j_next[path] - mean);
  pol.value = mean;
  pol.std_error = M > 1 ? std::sqrt(sq / static_cast<double>(M - 1) / static_cast<double>(M)) : 0.0;
  if (opt.pathwise) opt.pathwise->assign(j_next.begin(), j_next.begin() + static_cast<std::ptrdiff_t>(M));
  return pol;
}

void Policy::save(std::ostream& out) const {
  bin::put(out, contract);
  bin::put(out, grid);
  bin::put<std::int32_t>(out, static_cast<std::int32_t>(regressor.kind));
  bin::put_vec(out, regressor.cells);
  bin::put_vec(out, regressor.degree);
  bin::put_vec(out, levels);
  bin::put(out, value);
  bin::put(out, std_error);
  bin::put<std::uint64_t>(out, rules.size());
  for (const auto& rule : rules) {
    bin::put(out, rule.t);
    bin::put(out, rule.current);
    bin::put(out, rule.next);
    bin::put_vec(out, rule.dims);
    bin::put<std::uint8_t>(out, rule.basis ? 1 : 0);
    if (rule.basis) {
      rule.basis->save(out);
      bin::put_vec(out, rule.coef);
    }
  }
}

Policy Policy::load(std::istream& in) {
  Policy pol;
  pol.contract = bin::get<ContractSpec>(in);
  pol.grid = bin::get<VolumeGrid>(in);
  pol.regressor.kind = static_cast<RegressorKind>(bin::get<std::int32_t>(in));
  pol.regressor.cells = bin::get_vec<int>(in);
  pol.regressor.degree = bin::get_vec<int>(in);
  pol.levels = bin::get_vec<LevelRange>(in);
  pol.value = bin::get<double>(in);
  pol.std_error = bin::get<double>(in);
  const auto n = bin::get<std::uint64_t>(in);
  if (n != static_cast<std::uint64_t>(pol.contract.exercise_days())) {
    throw std::runtime_error("archive: rule count does not match the exercise window");
  }
  pol.rules.resize(n);
  for (auto& rule : pol.rules) {
    rule.t = bin::get<Day>(in);
    rule.current = bin::get<LevelRange>(in);
    rule.next = bin::get<LevelRange>(in);
    rule.dims = bin::get_vec<int>(in);
    if (bin::get<std::uint8_t>(in)) {
      rule.basis = LocalBasis::load(in);
      rule.coef = bin::get_vec<double>(in);
      if (rule.coef.size() != static_cast<std::size_t>(rule.next.size()) *
                                  static_cast<std::size_t>(rule.basis->coefficient_count())) {
        throw std::runtime_error("archive: coefficient block size mismatch");
      }
    }
  }
  return pol;
}

}  // namespace swing
