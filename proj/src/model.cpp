#include "swing/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "swing/rng.hpp"

namespace swing {

namespace {

constexpr double kStep = 1.0 / kDaysPerYear;

// (1 - exp(-b h)) / b, the integral of exp(-b s) over [0, h].
double decay_integral(double b, double h) {
  if (std::abs(b) < 1e-14) return h;
  return -std::expm1(-b * h) / b;
}

double log_tangent(const PathSet& p, std::size_t path, int j, Day t, Day delivery) {
  const ModelTables& tables = p.tables();
  const auto& factors = p.model().commodities[static_cast<std::size_t>(j)].factors;
  double x = -0.5 * tables.variance(j, t, delivery);
  for (int i = 0; i < static_cast<int>(factors.size()); ++i) {
    x += tables.decay(j, i, delivery - t) * p.w(path, t, j, i);
  }
  return x;
}

}  // namespace

double CommodityModel::initial(Day delivery) const {
  if (delivery < 0 || static_cast<std::size_t>(delivery) >= initial_curve.size()) {
    throw std::domain_error("delivery day " + std::to_string(delivery) +
                            " is outside the initial curve of '" + name + "'");
  }
  return initial_curve[static_cast<std::size_t>(delivery)];
}

int MarketModel::factor_count() const {
  int n = 0;
  for (const auto& c : commodities) n += static_cast<int>(c.factors.size());
  return n;
}

int MarketModel::driver_count() const { return factor_count() + static_cast<int>(fx.size()); }

int MarketModel::factor_offset(int commodity) const {
  int n = 0;
  for (int j = 0; j < commodity; ++j) {
    n += static_cast<int>(commodities[static_cast<std::size_t>(j)].factors.size());
  }
  return n;
}

void MarketModel::validate() const {
  if (commodities.empty()) throw std::invalid_argument("model: no commodities");
  if (horizon < 0) throw std::invalid_argument("model: negative horizon");
  for (const auto& c : commodities) {
    if (c.factors.empty()) {
      throw std::invalid_argument("model: commodity '" + c.name + "' has no factors");
    }
    for (const auto& f : c.factors) {
      if (f.mean_reversion < 0.0) {
        throw std::invalid_argument("model: commodity '" + c.name + "' has negative mean reversion");
      }
      for (double s : f.sigma.values()) {
        if (s < 0.0) {
          throw std::invalid_argument("model: commodity '" + c.name + "' has negative volatility");
        }
      }
    }
    if (c.initial_curve.size() < static_cast<std::size_t>(horizon) + 1) {
      throw std::invalid_argument("model: initial curve of '" + c.name +
                                  "' does not cover the horizon");
    }
    for (double f : c.initial_curve) {
      if (!(f > 0.0)) {
        throw std::invalid_argument("model: initial curve of '" + c.name +
                                    "' must be strictly positive");
      }
    }
  }
  for (const auto& x : fx) {
    if (x.sigma < 0.0) throw std::invalid_argument("model: fx '" + x.name + "' has negative sigma");
    if (!(x.spot > 0.0)) throw std::invalid_argument("model: fx '" + x.name + "' spot must be > 0");
  }
  const int n = driver_count();
  if (correlation.rows() != n || correlation.cols() != n) {
    throw std::invalid_argument("model: correlation must be " + std::to_string(n) + "x" +
                                std::to_string(n) + " (one row per curve factor and fx rate)");
  }
  for (int i = 0; i < n; ++i) {
    if (std::abs(correlation(i, i) - 1.0) > 1e-12) {
      throw std::invalid_argument("model: correlation diagonal must be 1");
    }
    for (int k = 0; k < n; ++k) {
      if (std::abs(correlation(i, k) - correlation(k, i)) > 1e-12) {
        throw std::invalid_argument("model: correlation is not symmetric");
      }
      if (std::abs(correlation(i, k)) > 1.0) {
        throw std::invalid_argument("model: correlation entries must lie in [-1, 1]");
      }
    }
  }
  psd_factor(correlation, "correlation");
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m, const std::string& what) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) {
    throw std::invalid_argument(what + " matrix: eigendecomposition failed");
  }
  const double scale = std::max(m.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  Eigen::VectorXd lambda = eig.eigenvalues() / scale;
  const double lowest = lambda.minCoeff();
  if (lowest < -1e-8) {
    throw std::invalid_argument(what + " matrix is not positive semi-definite (eigenvalue " +
                                std::to_string(lowest) + ")");
  }
  if (lowest < -1e-10) {
    std::cerr << "warning: " << what << " matrix eigenvalue " << lowest << " clipped to 0\n";
  }
  lambda = lambda.cwiseMax(0.0) * scale;
  return eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();
}

double variance_V(const MarketModel& model, int j, Day t1, Day t2) {
  if (t1 < 0 || t1 > t2) {
    throw std::domain_error("variance_V requires 0 <= t1 <= t2");
  }
  const auto& factors = model.commodities.at(static_cast<std::size_t>(j)).factors;
  const int base = model.factor_offset(j);
  const int n = static_cast<int>(factors.size());
  double v = 0.0;
  for (Day d = 0; d < t1; ++d) {
    const double lag = static_cast<double>(t2 - d - 1) * kStep;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        const double b = factors[i].mean_reversion + factors[k].mean_reversion;
        v += model.correlation(base + i, base + k) * factors[i].sigma.at(d) *
             factors[k].sigma.at(d) * std::exp(-b * lag) * decay_integral(b, kStep);
      }
    }
  }
  return v;
}

ModelTables::ModelTables(const MarketModel& model)
    : horizon_(model.horizon), stride_(static_cast<std::size_t>(model.horizon) + 1) {
  const std::size_t nc = model.commodities.size();
  variance_.resize(nc);
  decay_.resize(nc);
  for (std::size_t j = 0; j < nc; ++j) {
    const auto& factors = model.commodities[j].factors;
    const int base = model.factor_offset(static_cast<int>(j));
    const int n = static_cast<int>(factors.size());
    auto& table = variance_[j];
    table.assign(stride_ * stride_, 0.0);
    for (Day t2 = 0; t2 <= horizon_; ++t2) {
      double v = 0.0;
      for (Day d = 0; d < t2; ++d) {
        const double lag = static_cast<double>(t2 - d - 1) * kStep;
        for (int i = 0; i < n; ++i) {
          for (int k = 0; k < n; ++k) {
            const double b = factors[i].mean_reversion + factors[k].mean_reversion;
            v += model.correlation(base + i, base + k) * factors[i].sigma.at(d) *
                 factors[k].sigma.at(d) * std::exp(-b * lag) * decay_integral(b, kStep);
          }
        }
        table[static_cast<std::size_t>(d + 1) * stride_ + static_cast<std::size_t>(t2)] = v;
      }
    }
    decay_[j].resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      auto& row = decay_[j][static_cast<std::size_t>(i)];
      row.resize(stride_);
      for (std::size_t k = 0; k < stride_; ++k) {
        row[k] = std::exp(-factors[i].mean_reversion * static_cast<double>(k) * kStep);
      }
    }
  }

  rate_integral_.resize(model.fx.size());
  for (std::size_t x = 0; x < model.fx.size(); ++x) {
    auto& acc = rate_integral_[x];
    acc.assign(stride_, 0.0);
    for (Day d = 0; d < horizon_; ++d) {
      acc[static_cast<std::size_t>(d) + 1] = acc[static_cast<std::size_t>(d)] +
                                             model.fx[x].foreign_rate.at(d) * kStep;
    }
  }

  // Step covariance of all drivers over [d, d + 1): rho_ik s_i s_k times the
  // integral of exp(-(b_i + b_k) s) over one day.
  const int nd = model.driver_count();
  std::vector<double> sig(static_cast<std::size_t>(nd));
  std::vector<double> rev(static_cast<std::size_t>(nd));
  Eigen::MatrixXd previous;
  step_slot_.assign(static_cast<std::size_t>(std::max<Day>(horizon_, 1)), 0);
  for (Day d = 0; d < horizon_; ++d) {
    int at = 0;
    for (const auto& c : model.commodities) {
      for (const auto& f : c.factors) {
        sig[static_cast<std::size_t>(at)] = f.sigma.at(d);
        rev[static_cast<std::size_t>(at)] = f.mean_reversion;
        ++at;
      }
    }
    for (const auto& x : model.fx) {
      sig[static_cast<std::size_t>(at)] = x.sigma;
      rev[static_cast<std::size_t>(at)] = 0.0;
      ++at;
    }
    Eigen::MatrixXd cov(nd, nd);
    for (int i = 0; i < nd; ++i) {
      for (int k = 0; k < nd; ++k) {
        cov(i, k) = model.correlation(i, k) * sig[static_cast<std::size_t>(i)] *
                    sig[static_cast<std::size_t>(k)] *
                    decay_integral(rev[static_cast<std::size_t>(i)] + rev[static_cast<std::size_t>(k)],
                                   kStep);
      }
    }
    if (d > 0 && cov == previous) {
      step_slot_[static_cast<std::size_t>(d)] = step_slot_[static_cast<std::size_t>(d) - 1];
      continue;
    }
    if (cov.isZero(0.0)) {
      step_factor_.push_back(Eigen::MatrixXd::Zero(nd, nd));
    } else {
      step_factor_.push_back(psd_factor(cov, "step covariance"));
    }
    step_slot_[static_cast<std::size_t>(d)] = static_cast<int>(step_factor_.size()) - 1;
    previous = std::move(cov);
  }
  if (step_factor_.empty()) step_factor_.push_back(Eigen::MatrixXd::Zero(nd, nd));
}

void PathSet::allocate(const MarketModel& model, std::size_t n_paths, std::uint64_t seed,
                       const std::vector<Day>& store_days) {
  if (n_paths == 0) throw std::invalid_argument("simulate: n_paths must be >= 1");
  model.validate();
  model_ = std::make_shared<const MarketModel>(model);
  tables_ = std::make_shared<const ModelTables>(*model_);
  paths_ = n_paths;
  seed_ = seed;
  horizon_ = model.horizon;
  commodities_ = static_cast<int>(model.commodities.size());
  fx_count_ = static_cast<int>(model.fx.size());
  factors_ = model.factor_count();
  width_ = static_cast<std::size_t>(factors_ + commodities_ + fx_count_);
  factor_offset_.clear();
  for (int j = 0; j < commodities_; ++j) factor_offset_.push_back(model.factor_offset(j));

  days_ = store_days;
  if (days_.empty()) {
    for (Day d = 0; d <= horizon_; ++d) days_.push_back(d);
  }
  std::sort(days_.begin(), days_.end());
  days_.erase(std::unique(days_.begin(), days_.end()), days_.end());
  if (days_.front() < 0 || days_.back() > horizon_) {
    throw std::invalid_argument("simulate: stored days must lie in [0, horizon]");
  }
  slot_.assign(static_cast<std::size_t>(horizon_) + 1, -1);
  for (std::size_t s = 0; s < days_.size(); ++s) {
    slot_[static_cast<std::size_t>(days_[s])] = static_cast<int>(s);
  }
  data_.assign(days_.size() * paths_ * width_, 0.0);
}

void PathSet::fill_spots(std::size_t path, Day d) {
  double* row = at_mut(path, d);
  for (int j = 0; j < commodities_; ++j) {
    const double x = log_tangent(*this, path, j, d, d);
    row[factors_ + j] = model_->commodities[static_cast<std::size_t>(j)].initial(d) * std::exp(x);
  }
}

namespace {

// Advances one path over the whole grid, writing stored days through
// `store`. Shared by the parallel and the serial drivers.
template <class Store>
void step_path(const MarketModel& model, const ModelTables& tables, std::uint64_t seed,
               std::size_t path, Store&& store) {
  const int nf = model.factor_count();
  const int nd = model.driver_count();
  const int nx = static_cast<int>(model.fx.size());
  const Philox4x32 rng(seed);
  Eigen::VectorXd z(nd);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(nf);
  Eigen::VectorXd log_x(nx);
  for (int x = 0; x < nx; ++x) log_x(x) = std::log(model.fx[static_cast<std::size_t>(x)].spot);

  std::vector<double> one_day_decay(static_cast<std::size_t>(nf));
  {
    int at = 0;
    for (int j = 0; j < static_cast<int>(model.commodities.size()); ++j) {
      for (int i = 0; i < static_cast<int>(model.commodities[static_cast<std::size_t>(j)].factors.size());
           ++i) {
        one_day_decay[static_cast<std::size_t>(at++)] = tables.decay(j, i, 1);
      }
    }
  }

  store(Day{0}, w, log_x);
  for (Day d = 0; d < model.horizon; ++d) {
    for (int b = 0; 2 * b < nd; ++b) {
      const auto block = rng({static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(b),
                              static_cast<std::uint32_t>(path),
                              static_cast<std::uint32_t>(path >> 32) ^
                                  (static_cast<std::uint32_t>(RngStream::kPaths) << 24)});
      const auto pair = normal_pair(block);
      z(2 * b) = pair[0];
      if (2 * b + 1 < nd) z(2 * b + 1) = pair[1];
    }
    const Eigen::VectorXd e = tables.step_factor(d) * z;
    for (int i = 0; i < nf; ++i) w(i) = one_day_decay[static_cast<std::size_t>(i)] * w(i) + e(i);
    for (int x = 0; x < nx; ++x) {
      const double sx = model.fx[static_cast<std::size_t>(x)].sigma;
      const double carry = tables.foreign_rate_integral(x, d + 1) - tables.foreign_rate_integral(x, d);
      log_x(x) += -carry - 0.5 * sx * sx * kStep + e(nf + x);
    }
    store(d + 1, w, log_x);
  }
}

}  // namespace

PathSet simulate(const MarketModel& model, std::size_t n_paths, std::uint64_t seed,
                 const std::vector<Day>& store_days) {
  PathSet out;
  out.allocate(model, n_paths, seed, store_days);
  const auto n = static_cast<std::int64_t>(n_paths);
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < n; ++p) {
    const auto path = static_cast<std::size_t>(p);
    step_path(*out.model_, *out.tables_, seed, path,
              [&](Day d, const Eigen::VectorXd& w, const Eigen::VectorXd& log_x) {
                if (!out.stores(d)) return;
                double* row = out.at_mut(path, d);
                for (int i = 0; i < out.factors_; ++i) row[i] = w(i);
                for (int x = 0; x < out.fx_count_; ++x) {
                  row[out.factors_ + out.commodities_ + x] = std::exp(log_x(x));
                }
                out.fill_spots(path, d);
              });
  }
  return out;
}

PathSet simulate_serial(const MarketModel& model, std::size_t n_paths, std::uint64_t seed,
                        const std::vector<Day>& store_days) {
  PathSet out;
  out.allocate(model, n_paths, seed, store_days);
  for (std::size_t path = 0; path < n_paths; ++path) {
    step_path(*out.model_, *out.tables_, seed, path,
              [&](Day d, const Eigen::VectorXd& w, const Eigen::VectorXd& log_x) {
                if (!out.stores(d)) return;
                double* row = out.at_mut(path, d);
                for (int i = 0; i < out.factors_; ++i) row[i] = w(i);
                for (int x = 0; x < out.fx_count_; ++x) {
                  row[out.factors_ + out.commodities_ + x] = std::exp(log_x(x));
                }
                out.fill_spots(path, d);
              });
  }
  return out;
}

PathSet PathSet::from_states(const MarketModel& model,
                             const std::vector<std::vector<std::vector<double>>>& w,
                             const std::vector<std::vector<std::vector<double>>>& fx) {
  PathSet out;
  out.allocate(model, w.size(), 0, {});
  if (fx.size() != w.size()) throw std::invalid_argument("from_states: path count mismatch");
  for (std::size_t path = 0; path < w.size(); ++path) {
    if (w[path].size() != static_cast<std::size_t>(out.horizon_) + 1 ||
        fx[path].size() != w[path].size()) {
      throw std::invalid_argument("from_states: one state per day 0 .. horizon is required");
    }
    for (Day d = 0; d <= out.horizon_; ++d) {
      const auto& ws = w[path][static_cast<std::size_t>(d)];
      const auto& xs = fx[path][static_cast<std::size_t>(d)];
      if (ws.size() != static_cast<std::size_t>(out.factors_) ||
          xs.size() != static_cast<std::size_t>(out.fx_count_)) {
        throw std::invalid_argument("from_states: state width mismatch");
      }
      double* row = out.at_mut(path, d);
      std::copy(ws.begin(), ws.end(), row);
      std::copy(xs.begin(), xs.end(), row + out.factors_ + out.commodities_);
      out.fill_spots(path, d);
    }
  }
  return out;
}

double tangent_forward(const PathSet& p, std::size_t path, int commodity, Day t, Day delivery) {
  if (t > delivery) throw std::domain_error("tangent_forward requires t <= delivery");
  if (delivery > p.horizon()) throw std::domain_error("delivery beyond the simulated horizon");
  if (!p.stores(t)) throw std::domain_error("day " + std::to_string(t) + " is not stored");
  return std::exp(log_tangent(p, path, commodity, t, delivery));
}

double forward_price(const PathSet& p, std::size_t path, int commodity, Day t, Day delivery) {
  const double f0 = p.model().commodities.at(static_cast<std::size_t>(commodity)).initial(delivery);
  return f0 * tangent_forward(p, path, commodity, t, delivery);
}

double tangent_fx(const PathSet& p, std::size_t path, int fx_index, Day t) {
  if (fx_index < 0 || fx_index >= p.fx_count()) {
    throw std::domain_error("fx index " + std::to_string(fx_index) + " is not an exchange rate");
  }
  return p.fx(path, t, fx_index) / p.model().fx[static_cast<std::size_t>(fx_index)].spot;
}

void dump_paths_csv(const PathSet& p, const std::string& file, std::size_t max_paths) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file);
  out << "path,day,commodity,spot";
  for (int x = 0; x < p.fx_count(); ++x) out << ",fx" << x;
  out << '\n';
  out.precision(17);
  const std::size_t n = std::min(max_paths, p.paths());
  for (std::size_t path = 0; path < n; ++path) {
    for (Day d : p.stored_days()) {
      for (int j = 0; j < p.commodities(); ++j) {
        out << path << ',' << d << ',' << j << ',' << p.spot(path, d, j);
        for (int x = 0; x < p.fx_count(); ++x) out << ',' << p.fx(path, d, x);
        out << '\n';
      }
    }
  }
}

}  // namespace swing
