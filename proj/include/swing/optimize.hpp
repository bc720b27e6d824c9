#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "swing/contract.hpp"
#include "swing/model.hpp"
#include "swing/regress.hpp"

namespace swing {

struct VolumeGrid {
  double step = 0.4;          // Delta between volume levels
  double control_step = 0.1;  // delta q between candidate controls

  int top_level(const ContractSpec& c) const;  // L = Q_max / Delta
  double volume(int level) const { return step * level; }
  void validate(const ContractSpec& c) const;
};

// Levels [lo, hi] of the volume consumed before day t that can occur on an
// admissible trajectory (hi may be one level above the exact maximum so
// that interpolation always has a bracket).
struct LevelRange {
  int lo = 0;
  int hi = 0;
  int size() const { return hi - lo + 1; }
  bool contains(int l) const { return l >= lo && l <= hi; }
};

// Indexed by day 0 .. t_end + 1.
std::vector<LevelRange> reachable_levels(const ContractSpec& c, const VolumeGrid& g);

// Linear interpolation between the values at Q_l and Q_{l+1}.
double interpolate_values(const VolumeGrid& g, int l, double v_l, double v_next, double Q);

// Position of volume Q on the level axis: Q = (level + frac) * Delta.
struct GridPoint {
  int level = 0;
  double frac = 0.0;
};
GridPoint locate(const VolumeGrid& g, double Q);
// locate() clamped to the levels of `next`.
inline GridPoint next_point(const VolumeGrid& g, const LevelRange& next, double Q) {
  GridPoint gp = locate(g, Q);
  if (gp.level >= next.hi || gp.level < next.lo) {
    gp.level = gp.level < next.lo ? next.lo : next.hi;
    gp.frac = 0.0;
  }
  return gp;
}

// Admissible controls at (t, Q), clamped so that Q + q stays inside the
// levels reachable at t + 1.
VolumeRange control_range(const ContractSpec& c, const VolumeGrid& g, const LevelRange& next, Day t,
                          double Q);
// q_lo, every multiple of delta q strictly inside, q_hi.
std::vector<double> candidate_controls(const VolumeGrid& g, const VolumeRange& r);

// Regressor dimensions (logical ids 0 = spot, 1 = index, 2 = partial) used
// at day t.
std::vector<int> regressor_dims(const RegressorSpec& r, const ContractSpec& c, const IndexSpec& ix, Day t);
void regressor_row(const std::vector<int>& dims, Day t, const PathSet& p, const IndexPaths& ix,
                   std::size_t path, double* out);
Eigen::MatrixXd regressor_matrix(const std::vector<int>& dims, Day t, const PathSet& p, const IndexPaths& ix);

// Continuation estimators of one exercise day: a partition of the regressor
// space and one coefficient block per next-day volume level.
struct DateRule {
  Day t = 0;
  LevelRange current;
  LevelRange next;
  std::vector<int> dims;
  std::shared_ptr<const LocalBasis> basis;  // null when no choice is ever open
  std::vector<double> coef;                 // next.size() blocks

  const double* level_coef(int next_level) const {
    return coef.data() + static_cast<std::size_t>(next_level - next.lo) *
                             static_cast<std::size_t>(basis->coefficient_count());
  }
  // Estimated continuation at Q (off-grid allowed) given regressor row x.
  double continuation(const VolumeGrid& g, double Q, const double* x) const;
};

struct Policy {
  ContractSpec contract;
  VolumeGrid grid;
  RegressorSpec regressor;
  std::vector<LevelRange> levels;  // per day 0 .. t_end + 1
  std::vector<DateRule> rules;     // per exercise day, rules[t - t_start]
  double value = 0.0;
  double std_error = 0.0;

  const DateRule& rule(Day t) const { return rules[static_cast<std::size_t>(t - contract.t_start)]; }

  void save(std::ostream& out) const;
  static Policy load(std::istream& in);
};

// What the backward pass exposes at each day after taking its decisions.
struct BackwardStep {
  Day t = 0;
  LevelRange current;
  LevelRange next;
  const std::vector<double>* control = nullptr;  // q*(l, path), level-major over current
  const LocalBasis* basis = nullptr;             // partition at t, may be null
  const std::vector<int>* dims = nullptr;
  std::size_t paths = 0;

  double q(int level, std::size_t path) const {
    return (*control)[static_cast<std::size_t>(level - current.lo) * paths + path];
  }
};

using BackwardObserver = std::function<void(const BackwardStep&)>;

struct BackwardOptions {
  bool keep_rules = true;
  BackwardObserver observer;
  // Fit the partition at every day (also when no choice is open), so that
  // observers can regress on it.
  bool always_partition = false;
  // Receives the realized pathwise values at day 0 when set.
  std::vector<double>* pathwise = nullptr;
};

// Least-squares Monte Carlo over the volume grid. The realized pathwise
// value at the chosen volume propagates backwards.
Policy backward_solve(const PathSet& p, const IndexPaths& ix, const ContractSpec& c, const VolumeGrid& g,
                      const RegressorSpec& r, const BackwardOptions& opt = {});

// Payoff per unit volume at exercise day t.
inline double unit_payoff(const PathSet& p, const IndexPaths& ix, std::size_t path, Day t) {
  return p.spot(path, t, 0) - ix.index_at(t, path);
}

}  // namespace swing
