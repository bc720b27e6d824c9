#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "swing/calendar.hpp"
#include "swing/model.hpp"

namespace swing {

// Raised when a volume state admits no decision; this signals a grid or
// interpolation bug rather than bad input.
class InfeasibleState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ContractSpec {
  Day t_start = 0;
  Day t_end = 0;
  double q_max = 0.0;  // per day
  double Q_min = 0.0;
  double Q_max = 0.0;

  int exercise_days() const { return t_end - t_start + 1; }
  bool exercisable(Day t) const { return t >= t_start && t <= t_end; }
  void validate() const;
};

struct VolumeRange {
  double lo = 0.0;
  double hi = 0.0;
};

VolumeRange feasible_range(const ContractSpec& c, Day t, double Q);

struct IndexComponent {
  int commodity = 1;
  double weight = 0.0;  // a_j
  double offset = 0.0;  // b_j
  std::vector<Day> lag;     // per reset, days
  std::vector<Day> window;  // per reset, days
  int fx = -1;              // index into MarketModel::fx, -1 when domestic

  Day window_begin(const std::vector<Day>& resets, int k) const {
    return resets[static_cast<std::size_t>(k)] - lag[static_cast<std::size_t>(k)] -
           window[static_cast<std::size_t>(k)];
  }
  Day window_end(const std::vector<Day>& resets, int k) const {
    return resets[static_cast<std::size_t>(k)] - lag[static_cast<std::size_t>(k)];
  }
};

struct IndexSpec {
  double a0 = 0.0;
  std::vector<IndexComponent> components;
  std::vector<Day> resets;  // T_0 < ... < T_n
  Day last_day = 0;         // last exercise day; closes the final period

  int periods() const { return static_cast<int>(resets.size()); }
  Day period_begin(int k) const { return resets[static_cast<std::size_t>(k)]; }
  Day period_end(int k) const {  // exclusive
    return k + 1 < periods() ? resets[static_cast<std::size_t>(k) + 1] : last_day + 1;
  }
  void validate(const ContractSpec& c, const MarketModel& m) const;
};

// Builds lag/window day counts per reset from month counts on the calendar:
// the window for reset T ends lag_months before T and spans window_months.
IndexComponent make_component(const Calendar& cal, const std::vector<Day>& resets, int commodity,
                              double weight, double offset, int lag_months, int window_months,
                              int fx);

// First-of-month resets covering [t_start, t_end].
std::vector<Day> monthly_resets(const Calendar& cal, Day t_start, Day t_end);

int reset_index_of(const IndexSpec& spec, Day i);

double moving_average(const PathSet& p, std::size_t path, int commodity, Day reset, Day lag,
                      Day window);
double index_value(const IndexSpec& spec, const PathSet& p, std::size_t path, Day i);
double partial_index(const IndexSpec& spec, const PathSet& p, std::size_t path, Day i);

// The reset whose index is under construction at day i.
inline int next_reset_of(const IndexSpec& spec, Day i) {
  return i < spec.resets.front() ? 0 : reset_index_of(spec, i) + 1;
}

// True when at least one component of the next reset's index has a fixing
// at or before day i.
bool partial_has_fixings(const IndexSpec& spec, Day i);

// Index quantities precomputed for every path of a path set.
class IndexPaths {
 public:
  IndexPaths(const IndexSpec& spec, const PathSet& p);

  const IndexSpec& spec() const { return spec_; }
  std::size_t paths() const { return paths_; }
  double index(int k, std::size_t path) const { return index_[idx(k, path)]; }
  double index_at(Day i, std::size_t path) const { return index(reset_index_of(spec_, i), path); }
  double average(int component, int k, std::size_t path) const {
    return average_[static_cast<std::size_t>(component)][idx(k, path)];
  }
  // Defined for 0 <= i < T_n.
  double partial(Day i, std::size_t path) const {
    return partial_[static_cast<std::size_t>(i) * paths_ + path];
  }
  // Sum of component spots over days [0, m).
  double spot_prefix(int component, Day m, std::size_t path) const {
    return prefix_[static_cast<std::size_t>(component)][static_cast<std::size_t>(m) * paths_ + path];
  }

  void dump_csv(const std::string& file, std::size_t max_paths) const;

 private:
  std::size_t idx(int k, std::size_t path) const { return static_cast<std::size_t>(k) * paths_ + path; }

  IndexSpec spec_;
  std::size_t paths_;
  std::vector<double> index_;
  std::vector<std::vector<double>> average_;
  std::vector<double> partial_;
  std::vector<std::vector<double>> prefix_;
};

}  // namespace swing
