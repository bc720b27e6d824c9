#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "swing/hedge.hpp"
#include "swing/model.hpp"

namespace swing {

// Product prices sum over m in p of F(min(s, m), m) on every fresh path.
// Delivered days come from spot prefix sums; the forward part of a day's
// strip is computed once and cached.
class ForwardStrips {
 public:
  ForwardStrips(const PathSet& f, int commodity, Day lo, Day hi)
      : f_(f), j_(commodity), lo_(lo), hi_(hi), prefix_(f.paths() * (width() + 1)) {
    const std::size_t M = f.paths();
    const std::size_t n = width() + 1;
    for (std::size_t path = 0; path < M; ++path) prefix_[path * n] = 0.0;
    for (Day m = lo; m <= hi; ++m) {
      const auto c = static_cast<std::size_t>(m - lo);
      for (std::size_t path = 0; path < M; ++path) {
        prefix_[path * n + c + 1] = prefix_[path * n + c] + f.spot(path, m, commodity);
      }
    }
  }

  struct Strip {
    Day s = 0;
    Day first = 0;  // first forward day
    Day filled = 0;  // forwards known over [first, filled]
    Day flat = 0;  // from this day on the mean-reverting factors no longer move the forwards
    std::vector<double> fwd;  // path-major prefix sums over [first, hi], one extra slot per path
  };

  Strip& get(Day s) {
    s = std::min(s, hi_);
    auto it = cache_.find(s);
    if (it != cache_.end()) return *it->second;
    auto strip = std::make_shared<Strip>();
    strip->s = s;
    strip->first = std::max(s + 1, lo_);
    strip->filled = strip->first - 1;
    strip->flat = flat_from(s);
    return *cache_.emplace(s, std::move(strip)).first->second;
  }
  void keep_only(const std::vector<Day>& days) {
    for (auto it = cache_.begin(); it != cache_.end();) {
      const bool used = std::any_of(days.begin(), days.end(), [&](Day d) { return std::min(d, hi_) == it->first; });
      it = used ? std::next(it) : cache_.erase(it);
    }
  }
  // Extends the forwards of st through day `upto`. Past st.flat a forward
  // is exp(log F0 - V/2) exp(sum of the non-reverting factors).
  void ensure(Strip& st, Day upto) const {
    upto = std::min(upto, hi_);
    if (upto <= st.filled) return;
    const std::size_t M = f_.paths();
    const std::size_t n = stride(st);
    if (st.fwd.empty()) st.fwd.assign(M * n, 0.0);
    const Day from = st.filled + 1;
    const auto& cm = f_.model().commodities[static_cast<std::size_t>(j_)];
    const ModelTables& tab = f_.tables();
    const auto nf = static_cast<int>(cm.factors.size());
    const Eigen::Index count = upto - from + 1;
    const Eigen::Index moving = std::clamp<Eigen::Index>(st.flat - from, 0, count);
    const auto off = static_cast<std::size_t>(from - st.first);
    Eigen::ArrayXd base(count);
    Eigen::ArrayXXd decay(moving, nf);
    for (Eigen::Index a = 0; a < count; ++a) {
      const Day m = from + static_cast<Day>(a);
      base(a) = std::log(cm.initial(m)) - 0.5 * tab.variance(j_, st.s, m);
      if (a < moving) {
        for (int i = 0; i < nf; ++i) decay(a, i) = tab.decay(j_, i, m - st.s);
      }
    }
    const Eigen::ArrayXd tail = base.tail(count - moving).exp();
#pragma omp parallel
    {
      Eigen::ArrayXd x(moving);
#pragma omp for schedule(static)
      for (std::int64_t pi = 0; pi < static_cast<std::int64_t>(M); ++pi) {
        const auto path = static_cast<std::size_t>(pi);
        double* row = st.fwd.data() + path * n + off;
        x = base.head(moving);
        double level = 0.0;
        for (int i = 0; i < nf; ++i) {
          const double w = f_.w(path, st.s, j_, i);
          x += decay.col(i) * w;
          if (cm.factors[static_cast<std::size_t>(i)].mean_reversion == 0.0) level += w;
        }
        x = x.exp();
        for (Eigen::Index a = 0; a < moving; ++a) row[a + 1] = row[a] + x(a);
        const double g = std::exp(level);
        for (Eigen::Index a = moving; a < count; ++a) row[a + 1] = row[a] + g * tail(a - moving);
      }
    }
    st.filled = upto;
  }
  double sum(const Strip& st, std::size_t path, const Product& p) const {
    double v = 0.0;
    const Day past_end = std::min(p.end, st.first - 1);
    if (past_end >= p.begin) v += spot_sum(path, p.begin, past_end + 1);
    const Day b = std::max(p.begin, st.first);
    if (b <= p.end) {
      const double* row = st.fwd.data() + path * stride(st);
      v += row[p.end + 1 - st.first] - row[b - st.first];
    }
    return v;
  }

 private:
  std::size_t width() const { return static_cast<std::size_t>(hi_ - lo_ + 1); }
  std::size_t stride(const Strip& st) const { return static_cast<std::size_t>(std::max(0, hi_ - st.first + 1)) + 1; }
  // First delivery day at which every mean-reverting factor contributes
  // less than 2^-60 to the log forward on every path.
  Day flat_from(Day s) const {
    const auto& cm = f_.model().commodities[static_cast<std::size_t>(j_)];
    const ModelTables& tab = f_.tables();
    Day flat = std::max(s + 1, lo_);
    for (std::size_t i = 0; i < cm.factors.size(); ++i) {
      if (cm.factors[i].mean_reversion == 0.0) continue;
      double wmax = 0.0;
      for (std::size_t path = 0; path < f_.paths(); ++path) {
        wmax = std::max(wmax, std::abs(f_.w(path, s, j_, static_cast<int>(i))));
      }
      Day m = flat;
      while (m <= hi_ && tab.decay(j_, static_cast<int>(i), m - s) * wmax >= 0x1p-60) ++m;
      flat = m;
    }
    return flat;
  }
  // Sum of spots over [a, b).
  double spot_sum(std::size_t path, Day a, Day b) const {
    const double* row = &prefix_[path * (width() + 1)];
    return row[b - lo_] - row[a - lo_];
  }

  const PathSet& f_;
  int j_;
  Day lo_;
  Day hi_;
  std::vector<double> prefix_;  // path-major spot prefix sums, width + 1 per path
  std::map<Day, std::shared_ptr<Strip>> cache_;
};

}  // namespace swing
