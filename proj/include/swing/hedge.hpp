#pragma once

#include <functional>
#include <string>
#include <vector>

#include "swing/calendar.hpp"
#include "swing/contract.hpp"
#include "swing/model.hpp"
#include "swing/optimize.hpp"

namespace swing {

// Delivery period [begin, end] (inclusive); the product starts at begin.
struct Product {
  Day begin = 0;
  Day end = 0;
  int days() const { return end - begin + 1; }
  bool contains(Day m) const { return m >= begin && m <= end; }
  bool operator==(const Product&) const = default;
};

// Products quoted at each day for one commodity. At day i the quoted
// products partition the days of [lo, hi] after i.
class ProductCalendar {
 public:
  ProductCalendar() = default;

  // Day-ahead products to the end of the ISO week, then week blocks to the
  // end of the month, then calendar months; all clipped to [lo, hi].
  static ProductCalendar standard(const Calendar& cal, Day lo, Day hi);

  // Explicit listing: a product is quoted on [quoted_from, quoted_to].
  struct Quote {
    Product product;
    Day quoted_from = 0;
    Day quoted_to = 0;
  };
  static ProductCalendar listed(const std::vector<Quote>& quotes, Day lo, Day hi);

  Day lo() const { return lo_; }
  Day hi() const { return hi_; }
  // Quoted at day i (empty once i >= hi).
  const std::vector<Product>& at(Day i) const;
  // Index of the product quoted at i that contains delivery day m, or -1.
  int find(Day i, Day m) const;

  // Disjointness, coverage and refinement from every day to the next;
  // throws std::invalid_argument naming the offending pair.
  void validate() const;

 private:
  Day lo_ = 0;
  Day hi_ = -1;
  std::vector<std::vector<Product>> by_day_;  // days 0 .. hi - 1
};

// Relevant delivery range of an index commodity: the hull of the averaging
// windows of its components. Returns {1, 0} when the commodity is unused.
Product commodity_window_hull(const IndexSpec& ix, int commodity);

class HedgeReplay;

// Hedge instrument identifiers.
enum class TargetKind { Gas, Commodity, Fx };
struct Target {
  TargetKind kind = TargetKind::Gas;
  int index = 0;    // commodity (Gas: 0) or fx index
  int product = 0;  // product index at the read-out day (unused for Fx)
};

// Pathwise ledgers of one day of the replayed backward pass. Regressands are
// tangent-normalised; a delta is scale(target) times the regression of
// regressand(target) on the regressors of the day.
class DeltaView {
 public:
  Day t = 0;
  LevelRange levels;
  const LocalBasis* basis = nullptr;
  const std::vector<int>* dims = nullptr;

  const std::vector<Product>& products(int commodity) const;
  int fx_count() const;
  double scale(const Target& target) const;
  void regressand(const Target& target, int level, double* y) const;
  // Coefficients of the regression at one level (basis->coefficient_count()).
  void fit(const Target& target, int level, double* coef) const;
  // Same for several levels at once (coefficient blocks in order); the
  // level-independent part of the regressand is computed once.
  void fit_levels(const Target& target, const std::vector<int>& levels, double* coef) const;
  // True when the regressand is identically zero on this day, so the delta
  // is zero without fitting.
  bool vanishes(const Target& target) const;
  // Pathwise (unregressed) ledger value, for tests.
  double pathwise(const Target& target, int level, std::size_t path) const;

 private:
  friend class HedgeReplay;
  const HedgeReplay* owner_ = nullptr;
};

// Replays the backward pass on the optimisation paths and rolls the gas
// product ledgers and the per-period volume ledgers backwards alongside it.
class HedgeReplay {
 public:
  HedgeReplay(const PathSet& p, const IndexPaths& ix, const ContractSpec& c, const VolumeGrid& g,
              const RegressorSpec& r, std::vector<ProductCalendar> calendars);

  // Calls visit(view) for every day from t_end down to 0 and returns the
  // replayed policy value (equal to the optimisation value).
  double run(const std::function<void(const DeltaView&)>& visit);

  const ProductCalendar& calendar(int commodity) const {
    return calendars_[static_cast<std::size_t>(commodity)];
  }

 private:
  friend class DeltaView;
  void on_step(const BackwardStep& step, const std::function<void(const DeltaView&)>& visit);
  double ledger_sum_f0(int commodity, const Product& prod) const;

  const PathSet& p_;
  const IndexPaths& ix_;
  ContractSpec c_;
  VolumeGrid g_;
  RegressorSpec r_;
  std::vector<ProductCalendar> calendars_;
  std::size_t M_;

  // State at the current day t (levels current).
  Day t_ = -1;
  LevelRange cur_;
  std::vector<std::vector<double>> gas_;     // per gas product at t
  std::vector<std::vector<double>> volume_;  // per period k
  std::vector<double> control_;              // q*(t)
  // State carried from day t + 1.
  LevelRange next_;
  std::vector<std::vector<double>> gas_next_;
  std::vector<std::vector<double>> volume_next_;
  std::vector<double> control_next_;
};

}  // namespace swing
