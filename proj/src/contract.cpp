#include "swing/contract.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace swing {

void ContractSpec::validate() const {
  if (t_start < 0 || t_start > t_end) {
    throw std::invalid_argument("contract: need 0 <= t_start <= t_end");
  }
  if (q_max < 0.0) throw std::invalid_argument("contract: q_max must be >= 0");
  if (Q_min < 0.0 || Q_min > Q_max) {
    throw std::invalid_argument("contract: need 0 <= Q_min <= Q_max");
  }
  if (Q_max > q_max * exercise_days() + 1e-9) {
    throw std::invalid_argument("contract: Q_max exceeds q_max times the number of exercise days");
  }
}

VolumeRange feasible_range(const ContractSpec& c, Day t, double Q) {
  if (!c.exercisable(t)) {
    throw std::domain_error("feasible_range: day " + std::to_string(t) +
                            " is outside the exercise window");
  }
  const double remaining = static_cast<double>(c.t_end - t);
  VolumeRange r;
  r.lo = std::max(0.0, c.Q_min - Q - c.q_max * remaining);
  r.hi = std::min(c.q_max, c.Q_max - Q);
  if (r.lo > r.hi + 1e-9) {
    throw InfeasibleState("no admissible volume at day " + std::to_string(t) + " with Q = " +
                          std::to_string(Q));
  }
  r.hi = std::max(r.hi, r.lo);
  return r;
}

std::vector<Day> monthly_resets(const Calendar& cal, Day t_start, Day t_end) {
  std::vector<Day> out;
  for (Day d = cal.month_start(t_start); d <= t_end; d = cal.add_months(d, 1)) out.push_back(d);
  return out;
}

IndexComponent make_component(const Calendar& cal, const std::vector<Day>& resets, int commodity,
                              double weight, double offset, int lag_months, int window_months,
                              int fx) {
  if (lag_months < 0 || window_months < 1) {
    throw std::invalid_argument("index component: need lag >= 0 and window >= 1 month");
  }
  IndexComponent c;
  c.commodity = commodity;
  c.weight = weight;
  c.offset = offset;
  c.fx = fx;
  for (Day t : resets) {
    const Day end = cal.add_months(t, -lag_months);
    c.lag.push_back(t - end);
    c.window.push_back(end - cal.add_months(end, -window_months));
  }
  return c;
}

void IndexSpec::validate(const ContractSpec& c, const MarketModel& m) const {
  if (resets.empty()) throw std::invalid_argument("index: no reset dates");
  for (std::size_t k = 1; k < resets.size(); ++k) {
    if (resets[k] <= resets[k - 1]) throw std::invalid_argument("index: resets must increase");
  }
  if (resets.front() > c.t_start || resets.back() > c.t_end) {
    throw std::invalid_argument("index: resets must cover [t_start, t_end]");
  }
  if (last_day != c.t_end) throw std::invalid_argument("index: last_day must equal t_end");
  for (std::size_t n = 0; n < components.size(); ++n) {
    const auto& comp = components[n];
    const std::string tag = "index component " + std::to_string(n);
    if (comp.commodity < 1 || comp.commodity >= static_cast<int>(m.commodities.size())) {
      throw std::invalid_argument(tag + ": commodity must name an index market");
    }
    if (comp.fx >= static_cast<int>(m.fx.size()) || comp.fx < -1) {
      throw std::invalid_argument(tag + ": unknown fx index");
    }
    if (comp.lag.size() != resets.size() || comp.window.size() != resets.size()) {
      throw std::invalid_argument(tag + ": lag and window needed for every reset");
    }
    for (int k = 0; k < periods(); ++k) {
      if (comp.lag[static_cast<std::size_t>(k)] < 0 || comp.window[static_cast<std::size_t>(k)] < 1) {
        throw std::invalid_argument(tag + ": need lag >= 0 and window >= 1");
      }
      if (comp.window_begin(resets, k) < 0) {
        throw std::invalid_argument(tag + ": averaging window starts before the valuation date");
      }
    }
  }
}

int reset_index_of(const IndexSpec& spec, Day i) {
  if (spec.resets.empty() || i < spec.resets.front()) {
    throw std::domain_error("reset_index_of: day " + std::to_string(i) + " precedes the first reset");
  }
  const auto it = std::upper_bound(spec.resets.begin(), spec.resets.end(), i);
  return static_cast<int>(it - spec.resets.begin()) - 1;
}

double moving_average(const PathSet& p, std::size_t path, int commodity, Day reset, Day lag,
                      Day window) {
  const Day begin = reset - lag - window;
  if (window < 1 || begin < 0 || reset - lag > p.horizon() + 1) {
    throw std::domain_error("moving_average: window leaves the simulation grid");
  }
  double sum = 0.0;
  for (Day m = begin; m < reset - lag; ++m) sum += p.spot(path, m, commodity);
  return sum / static_cast<double>(window);
}

namespace {

double fx_at(const PathSet& p, std::size_t path, int fx, Day d) {
  return fx < 0 ? 1.0 : p.fx(path, d, fx);
}

}  // namespace

double index_value(const IndexSpec& spec, const PathSet& p, std::size_t path, Day i) {
  const int k = reset_index_of(spec, i);
  const Day reset = spec.resets[static_cast<std::size_t>(k)];
  double v = spec.a0;
  for (const auto& c : spec.components) {
    const double avg = moving_average(p, path, c.commodity, reset, c.lag[static_cast<std::size_t>(k)],
                                      c.window[static_cast<std::size_t>(k)]);
    v += c.weight * (avg - c.offset) * fx_at(p, path, c.fx, reset);
  }
  return v;
}

bool partial_has_fixings(const IndexSpec& spec, Day i) {
  const int k = next_reset_of(spec, i);
  if (k >= spec.periods()) return false;
  for (const auto& c : spec.components) {
    if (c.window_begin(spec.resets, k) <= i) return true;
  }
  return false;
}

double partial_index(const IndexSpec& spec, const PathSet& p, std::size_t path, Day i) {
  const int k = next_reset_of(spec, i);
  if (i < 0 || k >= spec.periods()) {
    throw std::domain_error("partial_index: day " + std::to_string(i) + " is at or after the last reset");
  }
  double v = spec.a0;
  for (const auto& c : spec.components) {
    const Day begin = c.window_begin(spec.resets, k);
    const Day end = std::min(c.window_end(spec.resets, k), i + 1);
    const double x = fx_at(p, path, c.fx, i);
    if (end <= begin) {
      v += c.weight * (p.spot(path, i, c.commodity) - c.offset) * x;
      continue;
    }
    double sum = 0.0;
    for (Day m = begin; m < end; ++m) sum += p.spot(path, m, c.commodity);
    v += c.weight * (sum / static_cast<double>(end - begin) - c.offset) * x;
  }
  return v;
}

IndexPaths::IndexPaths(const IndexSpec& spec, const PathSet& p) : spec_(spec), paths_(p.paths()) {
  const int nk = spec.periods();
  const int nc = static_cast<int>(spec.components.size());
  Day last = spec.resets.back();
  for (const auto& c : spec.components) {
    for (int k = 0; k < nk; ++k) last = std::max(last, c.window_end(spec.resets, k));
  }
  if (last > p.horizon() + 1) throw std::domain_error("index windows exceed the simulated horizon");
  for (Day d = 0; d < last; ++d) {
    if (!p.stores(d)) throw std::domain_error("index paths need every day up to the last fixing");
  }

  prefix_.assign(static_cast<std::size_t>(nc), {});
  for (int c = 0; c < nc; ++c) {
    auto& pre = prefix_[static_cast<std::size_t>(c)];
    pre.assign((static_cast<std::size_t>(last) + 1) * paths_, 0.0);
    const int j = spec.components[static_cast<std::size_t>(c)].commodity;
#pragma omp parallel for schedule(static)
    for (std::int64_t q = 0; q < static_cast<std::int64_t>(paths_); ++q) {
      const auto path = static_cast<std::size_t>(q);
      double s = 0.0;
      for (Day d = 0; d < last; ++d) {
        s += p.spot(path, d, j);
        pre[static_cast<std::size_t>(d + 1) * paths_ + path] = s;
      }
    }
  }

  average_.assign(static_cast<std::size_t>(nc), std::vector<double>(static_cast<std::size_t>(nk) * paths_));
  index_.assign(static_cast<std::size_t>(nk) * paths_, spec.a0);
  for (int c = 0; c < nc; ++c) {
    const auto& comp = spec.components[static_cast<std::size_t>(c)];
    for (int k = 0; k < nk; ++k) {
      const Day b = comp.window_begin(spec.resets, k);
      const Day e = comp.window_end(spec.resets, k);
      const Day reset = spec.resets[static_cast<std::size_t>(k)];
      for (std::size_t path = 0; path < paths_; ++path) {
        const double avg = (spot_prefix(c, e, path) - spot_prefix(c, b, path)) / static_cast<double>(e - b);
        average_[static_cast<std::size_t>(c)][idx(k, path)] = avg;
        index_[idx(k, path)] += comp.weight * (avg - comp.offset) * fx_at(p, path, comp.fx, reset);
      }
    }
  }

  const Day partial_days = spec.resets.back();
  partial_.assign(static_cast<std::size_t>(partial_days) * paths_, spec.a0);
  for (Day i = 0; i < partial_days; ++i) {
    const int k = next_reset_of(spec, i);
    for (int c = 0; c < nc; ++c) {
      const auto& comp = spec.components[static_cast<std::size_t>(c)];
      const Day b = comp.window_begin(spec.resets, k);
      const Day e = std::min(comp.window_end(spec.resets, k), i + 1);
      for (std::size_t path = 0; path < paths_; ++path) {
        const double x = fx_at(p, path, comp.fx, i);
        const double level = e <= b ? p.spot(path, i, comp.commodity)
                                    : (spot_prefix(c, e, path) - spot_prefix(c, b, path)) /
                                          static_cast<double>(e - b);
        partial_[static_cast<std::size_t>(i) * paths_ + path] += comp.weight * (level - comp.offset) * x;
      }
    }
  }
}

void IndexPaths::dump_csv(const std::string& file, std::size_t max_paths) const {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  out.precision(17);
  out << "path,reset,reset_day,index";
  for (std::size_t c = 0; c < spec_.components.size(); ++c) out << ",average" << c;
  out << '\n';
  for (std::size_t path = 0; path < std::min(max_paths, paths_); ++path) {
    for (int k = 0; k < spec_.periods(); ++k) {
      out << path << ',' << k << ',' << spec_.resets[static_cast<std::size_t>(k)] << ',' << index(k, path);
      for (std::size_t c = 0; c < spec_.components.size(); ++c) {
        out << ',' << average(static_cast<int>(c), k, path);
      }
      out << '\n';
    }
  }
}

}  // namespace swing
