#include "swing/hedge.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>

namespace swing {

namespace {

std::string show(const Product& p) {
  return "[" + std::to_string(p.begin) + ", " + std::to_string(p.end) + "]";
}

void clip_into(std::vector<Product>& out, Day a, Day b, Day lo, Day hi) {
  a = std::max(a, lo);
  b = std::min(b, hi);
  if (a <= b) out.push_back({a, b});
}

}  // namespace

ProductCalendar ProductCalendar::standard(const Calendar& cal, Day lo, Day hi) {
  ProductCalendar pc;
  pc.lo_ = lo;
  pc.hi_ = hi;
  if (hi < lo) return pc;
  pc.by_day_.resize(static_cast<std::size_t>(std::max<Day>(hi, 0)));
  for (Day i = 0; i < hi; ++i) {
    auto& out = pc.by_day_[static_cast<std::size_t>(i)];
    const Day first = i + 1;
    const Day month_end = cal.month_end(first);
    const Day day_end = std::min(cal.week_end(first), month_end);
    Day s = first;
    for (; s <= day_end && s <= hi; ++s) clip_into(out, s, s, lo, hi);
    while (s <= month_end && s <= hi) {
      const Day e = std::min(cal.week_end(s), month_end);
      clip_into(out, s, e, lo, hi);
      s = e + 1;
    }
    while (s <= hi) {
      const Day e = cal.month_end(s);
      clip_into(out, s, e, lo, hi);
      s = e + 1;
    }
  }
  return pc;
}

ProductCalendar ProductCalendar::listed(const std::vector<Quote>& quotes, Day lo, Day hi) {
  ProductCalendar pc;
  pc.lo_ = lo;
  pc.hi_ = hi;
  if (hi < lo) return pc;
  pc.by_day_.resize(static_cast<std::size_t>(std::max<Day>(hi, 0)));
  for (const auto& q : quotes) {
    if (q.product.begin > q.product.end) {
      throw std::invalid_argument("product calendar: empty delivery period " + show(q.product));
    }
    for (Day i = std::max<Day>(q.quoted_from, 0); i <= q.quoted_to && i < hi; ++i) {
      pc.by_day_[static_cast<std::size_t>(i)].push_back(q.product);
    }
  }
  for (auto& v : pc.by_day_) {
    std::sort(v.begin(), v.end(), [](const Product& a, const Product& b) { return a.begin < b.begin; });
  }
  return pc;
}

const std::vector<Product>& ProductCalendar::at(Day i) const {
  static const std::vector<Product> none;
  if (i < 0 || i >= static_cast<Day>(by_day_.size())) return none;
  return by_day_[static_cast<std::size_t>(i)];
}

int ProductCalendar::find(Day i, Day m) const {
  const auto& v = at(i);
  auto it = std::upper_bound(v.begin(), v.end(), m, [](Day x, const Product& p) { return x < p.begin; });
  if (it == v.begin()) return -1;
  --it;
  return it->contains(m) ? static_cast<int>(it - v.begin()) : -1;
}

void ProductCalendar::validate() const {
  for (Day i = 0; i < static_cast<Day>(by_day_.size()); ++i) {
    const auto& v = at(i);
    const std::string when = "product calendar at day " + std::to_string(i) + ": ";
    Day expect = std::max(lo_, i + 1);
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k > 0 && v[k].begin <= v[k - 1].end) {
        throw std::invalid_argument(when + "products " + show(v[k - 1]) + " and " + show(v[k]) + " overlap");
      }
      if (v[k].begin != expect) {
        throw std::invalid_argument(when + "delivery days from " + std::to_string(expect) +
                                    " are not covered before " + show(v[k]));
      }
      expect = v[k].end + 1;
    }
    if (expect != hi_ + 1) {
      throw std::invalid_argument(when + "delivery days from " + std::to_string(expect) + " to " +
                                  std::to_string(hi_) + " are not covered");
    }
    for (const auto& c : at(i + 1)) {
      const int parent = find(i, c.begin);
      if (parent < 0 || v[static_cast<std::size_t>(parent)].end < c.end) {
        const std::string other = parent < 0 ? "nothing" : show(v[static_cast<std::size_t>(parent)]);
        throw std::invalid_argument("product calendar: product " + show(c) + " quoted at day " +
                                    std::to_string(i + 1) + " does not refine " + other +
                                    " quoted at day " + std::to_string(i));
      }
    }
  }
}

Product commodity_window_hull(const IndexSpec& ix, int commodity) {
  Product h{1, 0};
  bool any = false;
  for (const auto& c : ix.components) {
    if (c.commodity != commodity) continue;
    for (int k = 0; k < ix.periods(); ++k) {
      const Day b = c.window_begin(ix.resets, k);
      const Day e = c.window_end(ix.resets, k) - 1;
      if (!any) {
        h = {b, e};
        any = true;
      } else {
        h.begin = std::min(h.begin, b);
        h.end = std::max(h.end, e);
      }
    }
  }
  return h;
}

// ---------------------------------------------------------------------------

HedgeReplay::HedgeReplay(const PathSet& p, const IndexPaths& ix, const ContractSpec& c, const VolumeGrid& g,
                         const RegressorSpec& r, std::vector<ProductCalendar> calendars)
    : p_(p), ix_(ix), c_(c), g_(g), r_(r), calendars_(std::move(calendars)), M_(p.paths()) {
  if (calendars_.size() != static_cast<std::size_t>(p.commodities())) {
    throw std::invalid_argument("hedge: one product calendar per commodity is required");
  }
  for (const auto& cal : calendars_) {
    if (cal.hi() > p.horizon()) throw std::invalid_argument("hedge: product calendar beyond the horizon");
  }
}

double HedgeReplay::run(const std::function<void(const DeltaView&)>& visit) {
  const auto levels = reachable_levels(c_, g_);
  t_ = c_.t_end + 1;
  cur_ = levels.back();
  const std::size_t n = static_cast<std::size_t>(cur_.size()) * M_;
  gas_.assign(calendar(0).at(t_).size(), std::vector<double>(n, 0.0));
  volume_.assign(static_cast<std::size_t>(ix_.spec().periods()), std::vector<double>(n, 0.0));
  control_.assign(n, 0.0);

  BackwardOptions opt;
  opt.keep_rules = false;
  opt.always_partition = true;
  opt.observer = [&](const BackwardStep& s) { on_step(s, visit); };
  const Policy pol = backward_solve(p_, ix_, c_, g_, r_, opt);
  return pol.value;
}

void HedgeReplay::on_step(const BackwardStep& step, const std::function<void(const DeltaView&)>& visit) {
  const Day t = step.t;
  next_ = cur_;
  gas_next_ = std::move(gas_);
  volume_next_ = std::move(volume_);
  control_next_ = std::move(control_);
  cur_ = step.current;
  t_ = t;
  const std::size_t n = static_cast<std::size_t>(cur_.size()) * M_;
  const LevelRange nxt = next_;

  // Next-day grid point of every (level, path) under the chosen control.
  std::vector<GridPoint> points(n);
#pragma omp parallel for schedule(static)
  for (int l = cur_.lo; l <= cur_.hi; ++l) {
    const std::size_t off = static_cast<std::size_t>(l - cur_.lo) * M_;
    for (std::size_t path = 0; path < M_; ++path) {
      points[off + path] = next_point(g_, nxt, g_.volume(l) + step.q(l, path));
    }
  }

  // Gas product ledgers.
  const auto& prods = calendar(0).at(t);
  const auto& prods_next = calendar(0).at(t + 1);
  gas_.assign(prods.size(), {});
  const bool next_exercise = c_.exercisable(t + 1);
  for (std::size_t a = 0; a < prods.size(); ++a) {
    const Product& prod = prods[a];
    std::vector<std::size_t> children;
    for (std::size_t b = 0; b < prods_next.size(); ++b) {
      if (prods_next[b].begin >= prod.begin && prods_next[b].end <= prod.end) children.push_back(b);
    }
    const bool delivers_next = prod.contains(t + 1) && next_exercise;
    // G(t + 1, level', path)
    std::vector<double> g(static_cast<std::size_t>(nxt.size()) * M_, 0.0);
    for (std::size_t b : children) {
      const auto& child = gas_next_[b];
      for (std::size_t k = 0; k < g.size(); ++k) g[k] += child[k];
    }
    if (delivers_next) {
      for (int l = nxt.lo; l <= nxt.hi; ++l) {
        const std::size_t off = static_cast<std::size_t>(l - nxt.lo) * M_;
        for (std::size_t path = 0; path < M_; ++path) {
          g[off + path] += control_next_[off + path] * p_.spot(path, t + 1, 0);
        }
      }
    }
    auto& out = gas_[a];
    out.assign(n, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(n); ++r) {
      const GridPoint& gp = points[static_cast<std::size_t>(r)];
      const std::size_t at = static_cast<std::size_t>(gp.level - nxt.lo) * M_ + static_cast<std::size_t>(r) % M_;
      double v = g[at];
      if (gp.frac != 0.0) v += gp.frac * (g[at + M_] - v);
      out[static_cast<std::size_t>(r)] = v;
    }
  }

  // Period volume ledgers.
  const IndexSpec& ix = ix_.spec();
  volume_.assign(static_cast<std::size_t>(ix.periods()), {});
  for (int k = 0; k < ix.periods(); ++k) {
    if (ix.period_end(k) <= t) continue;
    const auto& vn = volume_next_[static_cast<std::size_t>(k)];
    auto& out = volume_[static_cast<std::size_t>(k)];
    out.assign(n, 0.0);
    const bool inside = t >= ix.period_begin(k) && t < ix.period_end(k) && c_.exercisable(t);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(n); ++r) {
      const auto ri = static_cast<std::size_t>(r);
      const GridPoint& gp = points[ri];
      const std::size_t at = static_cast<std::size_t>(gp.level - nxt.lo) * M_ + ri % M_;
      double v = 0.0;
      if (!vn.empty()) {
        v = vn[at];
        if (gp.frac != 0.0) v += gp.frac * (vn[at + M_] - v);
      }
      out[ri] = (inside ? (*step.control)[ri] : 0.0) + v;
    }
  }
  control_ = *step.control;

  DeltaView view;
  view.t = t;
  view.levels = cur_;
  view.basis = step.basis;
  view.dims = step.dims;
  view.owner_ = this;
  visit(view);
}

double HedgeReplay::ledger_sum_f0(int commodity, const Product& prod) const {
  const auto& cm = p_.model().commodities[static_cast<std::size_t>(commodity)];
  double s = 0.0;
  for (Day m = prod.begin; m <= prod.end; ++m) s += cm.initial(m);
  return s;
}

const std::vector<Product>& DeltaView::products(int commodity) const {
  return owner_->calendar(commodity).at(t);
}

int DeltaView::fx_count() const { return owner_->p_.fx_count(); }

double DeltaView::scale(const Target& target) const {
  switch (target.kind) {
    case TargetKind::Gas:
      return 1.0 / owner_->ledger_sum_f0(0, products(0)[static_cast<std::size_t>(target.product)]);
    case TargetKind::Commodity:
      return -1.0 / owner_->ledger_sum_f0(
                        target.index, products(target.index)[static_cast<std::size_t>(target.product)]);
    case TargetKind::Fx:
      return -1.0;
  }
  return 0.0;
}

bool DeltaView::vanishes(const Target& target) const {
  const HedgeReplay& o = *owner_;
  const IndexSpec& ix = o.ix_.spec();
  switch (target.kind) {
    case TargetKind::Gas: {
      const Product& prod = products(0)[static_cast<std::size_t>(target.product)];
      for (Day m = std::max(prod.begin, t + 1); m <= prod.end; ++m) {
        if (o.c_.exercisable(m)) return false;
      }
      return true;
    }
    case TargetKind::Commodity: {
      const Product& prod = products(target.index)[static_cast<std::size_t>(target.product)];
      for (const auto& comp : ix.components) {
        if (comp.commodity != target.index || comp.weight == 0.0) continue;
        for (int k = 0; k < ix.periods(); ++k) {
          if (o.volume_[static_cast<std::size_t>(k)].empty()) continue;
          const Day b = std::max(comp.window_begin(ix.resets, k), prod.begin);
          const Day e = std::min(comp.window_end(ix.resets, k), prod.end + 1);
          if (e > b) return false;
        }
      }
      return true;
    }
    case TargetKind::Fx:
      for (const auto& comp : ix.components) {
        if (comp.fx != target.index || comp.weight == 0.0) continue;
        for (Day reset : ix.resets) {
          if (reset > t) return false;
        }
      }
      return true;
  }
  return false;
}

double DeltaView::pathwise(const Target& target, int level, std::size_t path) const {
  const HedgeReplay& o = *owner_;
  const std::size_t row = static_cast<std::size_t>(level - levels.lo) * o.M_ + path;
  const IndexSpec& ix = o.ix_.spec();
  switch (target.kind) {
    case TargetKind::Gas:
      return o.gas_[static_cast<std::size_t>(target.product)][row];
    case TargetKind::Commodity: {
      const Product& prod = products(target.index)[static_cast<std::size_t>(target.product)];
      double y = 0.0;
      for (std::size_t ci = 0; ci < ix.components.size(); ++ci) {
        const auto& comp = ix.components[ci];
        if (comp.commodity != target.index || comp.weight == 0.0) continue;
        for (int k = 0; k < ix.periods(); ++k) {
          const auto& vol = o.volume_[static_cast<std::size_t>(k)];
          if (vol.empty()) continue;
          const Day b = std::max(comp.window_begin(ix.resets, k), prod.begin);
          const Day e = std::min(comp.window_end(ix.resets, k), prod.end + 1);
          if (e <= b) continue;
          const Day reset = ix.resets[static_cast<std::size_t>(k)];
          const double x = comp.fx < 0 ? 1.0 : o.p_.fx(path, reset, comp.fx);
          const double fixings = o.ix_.spot_prefix(static_cast<int>(ci), e, path) -
                                 o.ix_.spot_prefix(static_cast<int>(ci), b, path);
          y += comp.weight * x * vol[row] * fixings / static_cast<double>(comp.window[static_cast<std::size_t>(k)]);
        }
      }
      return y;
    }
    case TargetKind::Fx: {
      double y = 0.0;
      for (std::size_t ci = 0; ci < ix.components.size(); ++ci) {
        const auto& comp = ix.components[ci];
        if (comp.fx != target.index || comp.weight == 0.0) continue;
        for (int k = 0; k < ix.periods(); ++k) {
          const Day reset = ix.resets[static_cast<std::size_t>(k)];
          if (reset <= t) continue;
          const auto& vol = o.volume_[static_cast<std::size_t>(k)];
          const double growth = o.p_.fx(path, reset, comp.fx) / o.p_.fx(path, t, comp.fx);
          y += comp.weight * vol[row] * (o.ix_.average(static_cast<int>(ci), k, path) - comp.offset) * growth;
        }
      }
      return y;
    }
  }
  return 0.0;
}

void DeltaView::regressand(const Target& target, int level, double* y) const {
  const HedgeReplay& o = *owner_;
  Day start = 0;
  if (target.kind != TargetKind::Fx) start = products(target.index)[static_cast<std::size_t>(target.product)].begin;
  const int j = target.kind == TargetKind::Gas ? 0 : target.index;
  for (std::size_t path = 0; path < o.M_; ++path) {
    double v = pathwise(target, level, path);
    if (target.kind != TargetKind::Fx) v /= tangent_forward(o.p_, path, j, t, start);
    y[path] = v;
  }
}

void DeltaView::fit(const Target& target, int level, double* coef) const {
  std::vector<double> y(owner_->M_);
  regressand(target, level, y.data());
  basis->fit_into(y.data(), 1, coef);
}

void DeltaView::fit_levels(const Target& target, const std::vector<int>& lv, double* coef) const {
  const HedgeReplay& o = *owner_;
  const std::size_t M = o.M_;
  const IndexSpec& ix = o.ix_.spec();
  std::vector<double> inv(M, 1.0);
  if (target.kind != TargetKind::Fx) {
    const Day start = products(target.index)[static_cast<std::size_t>(target.product)].begin;
    const int j = target.kind == TargetKind::Gas ? 0 : target.index;
    for (std::size_t path = 0; path < M; ++path) inv[path] = 1.0 / tangent_forward(o.p_, path, j, t, start);
  }

  // y(level, path) = sum over periods k of w_k(path) V_k(level, path), or the
  // gas ledger, times inv(path).
  std::vector<int> period;
  std::vector<std::vector<double>> w;
  auto term = [&](int k) -> std::vector<double>& {
    for (std::size_t a = 0; a < period.size(); ++a) {
      if (period[a] == k) return w[a];
    }
    period.push_back(k);
    w.emplace_back(M, 0.0);
    return w.back();
  };
  if (target.kind == TargetKind::Commodity) {
    const Product& prod = products(target.index)[static_cast<std::size_t>(target.product)];
    for (std::size_t ci = 0; ci < ix.components.size(); ++ci) {
      const auto& comp = ix.components[ci];
      if (comp.commodity != target.index || comp.weight == 0.0) continue;
      for (int k = 0; k < ix.periods(); ++k) {
        if (o.volume_[static_cast<std::size_t>(k)].empty()) continue;
        const Day b = std::max(comp.window_begin(ix.resets, k), prod.begin);
        const Day e = std::min(comp.window_end(ix.resets, k), prod.end + 1);
        if (e <= b) continue;
        const Day reset = ix.resets[static_cast<std::size_t>(k)];
        const double scale = comp.weight / static_cast<double>(comp.window[static_cast<std::size_t>(k)]);
        auto& wk = term(k);
        for (std::size_t path = 0; path < M; ++path) {
          const double x = comp.fx < 0 ? 1.0 : o.p_.fx(path, reset, comp.fx);
          const double fixings = o.ix_.spot_prefix(static_cast<int>(ci), e, path) -
                                 o.ix_.spot_prefix(static_cast<int>(ci), b, path);
          wk[path] += scale * x * fixings * inv[path];
        }
      }
    }
  } else if (target.kind == TargetKind::Fx) {
    for (std::size_t ci = 0; ci < ix.components.size(); ++ci) {
      const auto& comp = ix.components[ci];
      if (comp.fx != target.index || comp.weight == 0.0) continue;
      for (int k = 0; k < ix.periods(); ++k) {
        const Day reset = ix.resets[static_cast<std::size_t>(k)];
        if (reset <= t) continue;
        auto& wk = term(k);
        for (std::size_t path = 0; path < M; ++path) {
          const double growth = o.p_.fx(path, reset, comp.fx) / o.p_.fx(path, t, comp.fx);
          wk[path] += comp.weight * (o.ix_.average(static_cast<int>(ci), k, path) - comp.offset) * growth;
        }
      }
    }
  }

  const auto nc = static_cast<std::size_t>(basis->coefficient_count());
#pragma omp parallel
  {
    std::vector<double> y(M);
#pragma omp for schedule(dynamic)
    for (std::int64_t a = 0; a < static_cast<std::int64_t>(lv.size()); ++a) {
      const std::size_t row = static_cast<std::size_t>(lv[static_cast<std::size_t>(a)] - levels.lo) * M;
      if (target.kind == TargetKind::Gas) {
        const auto& gl = o.gas_[static_cast<std::size_t>(target.product)];
        for (std::size_t path = 0; path < M; ++path) y[path] = gl[row + path] * inv[path];
      } else {
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t b = 0; b < period.size(); ++b) {
          const double* vol = o.volume_[static_cast<std::size_t>(period[b])].data() + row;
          const double* wk = w[b].data();
          for (std::size_t path = 0; path < M; ++path) y[path] += wk[path] * vol[path];
        }
      }
      basis->fit_into(y.data(), 1, coef + static_cast<std::size_t>(a) * nc);
    }
  }
}

}  // namespace swing
