#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swing/calendar.hpp"

namespace swing {

// Volatility per year^(1/2), constant on each day segment [d, d + 1).
// A single value means a flat term structure; otherwise one entry per day
// and the last entry extends to the right.
class VolCurve {
 public:
  VolCurve() = default;
  VolCurve(double flat) : values_{flat} {}  // NOLINT: implicit from scalar is intended
  explicit VolCurve(std::vector<double> daily) : values_(std::move(daily)) {}

  double at(Day d) const {
    if (values_.empty()) return 0.0;
    const auto i = static_cast<std::size_t>(d < 0 ? 0 : d);
    return i < values_.size() ? values_[i] : values_.back();
  }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

struct Factor {
  VolCurve sigma;
  double mean_reversion = 0.0;  // per year
};

struct CommodityModel {
  std::string name;
  std::vector<Factor> factors;
  std::vector<double> initial_curve;  // F(0, T) for T = 0 .. horizon

  double initial(Day delivery) const;
};

// Exchange rate in domestic currency per unit of foreign currency. The
// domestic short rate is zero.
struct FxModel {
  std::string name;
  double spot = 1.0;
  double sigma = 0.0;
  VolCurve foreign_rate;  // r_f per year, piecewise constant per day
};

// Brownian drivers are ordered commodity by commodity, factor by factor,
// followed by one driver per exchange rate.
struct MarketModel {
  std::vector<CommodityModel> commodities;  // [0] is the gas market
  std::vector<FxModel> fx;                  // non-domestic rates only
  Eigen::MatrixXd correlation;
  Day horizon = 0;  // last simulated day

  int driver_count() const;
  int factor_count() const;  // total curve factors over all commodities
  int factor_offset(int commodity) const;
  int fx_driver(int fx_index) const { return factor_count() + fx_index; }

  // Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

// Symmetric PSD square root of a correlation or covariance matrix via
// eigendecomposition. Eigenvalues in [-1e-8, 0) are clipped to zero (with a
// warning below -1e-10); anything more negative is a configuration error.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m, const std::string& what);

// V^j(t1, t2): integral over [0, t1] of the instantaneous log-variance of
// F^j(., t2), summed segment by segment in closed form.
double variance_V(const MarketModel& model, int commodity, Day t1, Day t2);

// Tables shared by simulation and forward reconstruction.
class ModelTables {
 public:
  explicit ModelTables(const MarketModel& model);

  double variance(int commodity, Day t, Day delivery) const {
    return variance_[static_cast<std::size_t>(commodity)]
                    [static_cast<std::size_t>(t) * stride_ + static_cast<std::size_t>(delivery)];
  }
  // exp(-a_i (k / 365)) for k = 0 .. horizon
  double decay(int commodity, int factor, int k) const {
    return decay_[static_cast<std::size_t>(commodity)][static_cast<std::size_t>(factor)]
                 [static_cast<std::size_t>(k)];
  }
  // integral of r_f over [0, t] in years
  double foreign_rate_integral(int fx, Day t) const {
    return rate_integral_[static_cast<std::size_t>(fx)][static_cast<std::size_t>(t)];
  }
  // Lower factor of the step covariance of all drivers over [d, d + 1).
  const Eigen::MatrixXd& step_factor(Day d) const {
    return step_factor_[static_cast<std::size_t>(step_slot_[static_cast<std::size_t>(d)])];
  }
  Day horizon() const { return horizon_; }

 private:
  Day horizon_;
  std::size_t stride_;
  std::vector<std::vector<double>> variance_;
  std::vector<std::vector<std::vector<double>>> decay_;
  std::vector<std::vector<double>> rate_integral_;
  std::vector<Eigen::MatrixXd> step_factor_;
  std::vector<int> step_slot_;
};

// Simulated factor states, spots and exchange rates. Storage is
// date-major: all paths of one stored day are contiguous.
class PathSet {
 public:
  PathSet() = default;

  std::size_t paths() const { return paths_; }
  std::uint64_t seed() const { return seed_; }
  int commodities() const { return commodities_; }
  int fx_count() const { return fx_count_; }
  Day horizon() const { return horizon_; }
  bool stores(Day d) const {
    return d >= 0 && d <= horizon_ && slot_[static_cast<std::size_t>(d)] >= 0;
  }
  const std::vector<Day>& stored_days() const { return days_; }

  double w(std::size_t path, Day d, int commodity, int factor) const {
    return at(path, d)[factor_offset_[static_cast<std::size_t>(commodity)] + factor];
  }
  double spot(std::size_t path, Day d, int commodity) const {
    return at(path, d)[factors_ + commodity];
  }
  double fx(std::size_t path, Day d, int fx_index) const {
    return at(path, d)[factors_ + commodities_ + fx_index];
  }
  const ModelTables& tables() const { return *tables_; }
  const MarketModel& model() const { return *model_; }

  // Builds a path set from explicit factor states and exchange rates;
  // spots follow from the model. w is [path][day][factor], fx is
  // [path][day][fx]. Days 0 .. horizon are all stored.
  static PathSet from_states(const MarketModel& model,
                             const std::vector<std::vector<std::vector<double>>>& w,
                             const std::vector<std::vector<std::vector<double>>>& fx);

  friend PathSet simulate(const MarketModel& model, std::size_t n_paths, std::uint64_t seed,
                          const std::vector<Day>& store_days);
  friend PathSet simulate_serial(const MarketModel& model, std::size_t n_paths,
                                 std::uint64_t seed, const std::vector<Day>& store_days);

 private:
  const double* at(std::size_t path, Day d) const {
    return &data_[(static_cast<std::size_t>(slot_[static_cast<std::size_t>(d)]) * paths_ + path) *
                  width_];
  }
  double* at_mut(std::size_t path, Day d) {
    return &data_[(static_cast<std::size_t>(slot_[static_cast<std::size_t>(d)]) * paths_ + path) *
                  width_];
  }
  void allocate(const MarketModel& model, std::size_t n_paths, std::uint64_t seed,
                const std::vector<Day>& store_days);
  void fill_spots(std::size_t path, Day d);

  std::shared_ptr<const MarketModel> model_;
  std::shared_ptr<const ModelTables> tables_;
  std::size_t paths_ = 0;
  std::uint64_t seed_ = 0;
  int commodities_ = 0;
  int fx_count_ = 0;
  int factors_ = 0;
  std::size_t width_ = 0;
  Day horizon_ = 0;
  std::vector<int> factor_offset_;
  std::vector<Day> days_;
  std::vector<int> slot_;
  std::vector<double> data_;
};

// Exact Gaussian stepping of the factor states and the log exchange rates
// over the daily grid 0 .. model.horizon. Only store_days are kept (all days
// when empty). Path p draws from Philox counters keyed by (seed, p), so the
// result does not depend on the number of worker threads.
PathSet simulate(const MarketModel& model, std::size_t n_paths, std::uint64_t seed,
                 const std::vector<Day>& store_days = {});

double forward_price(const PathSet& p, std::size_t path, int commodity, Day t, Day delivery);
double tangent_forward(const PathSet& p, std::size_t path, int commodity, Day t, Day delivery);
double tangent_fx(const PathSet& p, std::size_t path, int fx_index, Day t);

// Writes (path, day, commodity, spot, fx...) rows.
void dump_paths_csv(const PathSet& p, const std::string& file, std::size_t max_paths);

}  // namespace swing
