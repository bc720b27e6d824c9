#include "swing/config.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "swing/binary_io.hpp"

namespace swing {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config: " + key + ": " + what);
}

void allow_keys(const json& j, const std::string& key, std::initializer_list<const char*> names) {
  if (!j.is_object()) fail(key, "expected an object");
  std::set<std::string> ok(names.begin(), names.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) fail(key.empty() ? it.key() : key + "." + it.key(), "unknown key");
  }
}

const json& need(const json& j, const std::string& key, const char* name) {
  if (!j.contains(name)) fail(key.empty() ? name : key + "." + name, "missing");
  return j.at(name);
}

std::string sub(const std::string& key, const char* name) { return key.empty() ? name : key + "." + name; }
std::string sub(const std::string& key, std::size_t i) { return key + "[" + std::to_string(i) + "]"; }

double number(const json& j, const std::string& key) {
  if (!j.is_number()) fail(key, "expected a number");
  return j.get<double>();
}

double number_or(const json& j, const std::string& key, const char* name, double fallback) {
  return j.contains(name) ? number(j.at(name), sub(key, name)) : fallback;
}

std::string text(const json& j, const std::string& key) {
  if (!j.is_string()) fail(key, "expected a string");
  return j.get<std::string>();
}

std::size_t count(const json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(key, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

Day date(const Calendar& cal, const json& j, const std::string& key) {
  try {
    return cal.day_of(text(j, key));
  } catch (const std::invalid_argument& e) {
    fail(key, e.what());
  }
}

// Number (flat) or list of {from, <field>} steps, expanded to one value per
// day 0 .. horizon.
std::vector<double> daily_steps(const Calendar& cal, const json& j, const std::string& key, const char* field,
                                Day horizon) {
  if (j.is_number()) return std::vector<double>(static_cast<std::size_t>(horizon) + 1, j.get<double>());
  if (!j.is_array() || j.empty()) fail(key, "expected a number or a nonempty list of steps");
  std::vector<double> out(static_cast<std::size_t>(horizon) + 1);
  Day prev = -1;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string k = sub(key, i);
    allow_keys(j[i], k, {"from", field});
    const Day from = i == 0 && !j[i].contains("from") ? 0 : date(cal, need(j[i], k, "from"), sub(k, "from"));
    if (from <= prev && i > 0) fail(k, "steps must be in increasing date order");
    const double v = number(need(j[i], k, field), sub(k, field));
    for (Day d = std::max<Day>(i == 0 ? 0 : from, 0); d <= horizon; ++d) out[static_cast<std::size_t>(d)] = v;
    prev = from;
  }
  return out;
}

VolCurve vol_curve(const Calendar& cal, const json& j, const std::string& key, Day horizon) {
  if (j.is_number()) return VolCurve(j.get<double>());
  return VolCurve(daily_steps(cal, j, key, "value", horizon));
}

Frequency frequency(const json& j, const std::string& key) {
  try {
    return frequency_from_string(text(j, key));
  } catch (const std::invalid_argument& e) {
    fail(key, e.what());
  }
}

json policy_sections(const json& root) {
  json p;
  for (const char* k : {"valuation_date", "horizon", "commodities", "fx", "correlation", "contract", "index", "grid",
                        "regressor"}) {
    if (root.contains(k)) p[k] = root.at(k);
  }
  p["paths"] = root.at("paths").at("optimisation");
  p["seed"] = root.at("seeds").at("optimisation");
  return p;
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t RunConfig::policy_hash() const { return fnv1a(policy_sections(json::parse(text)).dump()); }

int RunConfig::commodity_id(const std::string& name) const {
  for (std::size_t i = 0; i < model.commodities.size(); ++i) {
    if (model.commodities[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int RunConfig::fx_id(const std::string& name) const {
  for (std::size_t i = 0; i < model.fx.size(); ++i) {
    if (model.fx[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

RunConfig load_config(const std::string& file, const Overrides& o) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config file '" + file + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), o);
}

RunConfig parse_config(const std::string& json_text, const Overrides& o) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }
  allow_keys(root, "", {"valuation_date", "horizon", "commodities", "fx", "correlation", "contract", "index", "grid",
                        "regressor", "products", "hedge", "paths", "seeds", "output_dir"});
  if (!root.contains("paths")) root["paths"] = json::object();
  if (!root.contains("seeds")) root["seeds"] = json::object();
  allow_keys(root["paths"], "paths", {"optimisation", "simulation"});
  allow_keys(root["seeds"], "seeds", {"optimisation", "simulation"});
  if (!root["paths"].contains("optimisation")) root["paths"]["optimisation"] = 10000;
  if (!root["paths"].contains("simulation")) root["paths"]["simulation"] = 10000;
  if (!root["seeds"].contains("optimisation")) root["seeds"]["optimisation"] = 1;
  if (!root["seeds"].contains("simulation")) root["seeds"]["simulation"] = 2;
  if (o.has_seed) {
    root["seeds"]["optimisation"] = o.seed;
    root["seeds"]["simulation"] = o.seed + 1;
  }
  if (o.paths > 0) {
    root["paths"]["optimisation"] = o.paths;
    root["paths"]["simulation"] = o.paths;
  }
  if (!o.output_dir.empty()) root["output_dir"] = o.output_dir;

  RunConfig cfg;
  cfg.text = root.dump();
  cfg.optimisation_paths = count(root["paths"]["optimisation"], "paths.optimisation");
  cfg.simulation_paths = count(root["paths"]["simulation"], "paths.simulation");
  cfg.optimisation_seed = count(root["seeds"]["optimisation"], "seeds.optimisation");
  cfg.simulation_seed = count(root["seeds"]["simulation"], "seeds.simulation");
  if (cfg.optimisation_seed == cfg.simulation_seed) fail("seeds", "optimisation and simulation seeds must differ");
  if (cfg.optimisation_paths == 0 || cfg.simulation_paths == 0) fail("paths", "path counts must be positive");
  if (root.contains("output_dir")) cfg.output_dir = text(root["output_dir"], "output_dir");

  try {
    cfg.calendar = Calendar(Calendar::parse_iso(text(need(root, "", "valuation_date"), "valuation_date")));
  } catch (const std::invalid_argument& e) {
    if (std::string(e.what()).rfind("config:", 0) == 0) throw;
    fail("valuation_date", e.what());
  }
  const Calendar& cal = cfg.calendar;

  // contract
  {
    const json& c = need(root, "", "contract");
    allow_keys(c, "contract", {"start", "end", "q_max", "Q_min", "Q_max"});
    cfg.contract.t_start = date(cal, need(c, "contract", "start"), "contract.start");
    cfg.contract.t_end = date(cal, need(c, "contract", "end"), "contract.end");
    cfg.contract.q_max = number(need(c, "contract", "q_max"), "contract.q_max");
    cfg.contract.Q_min = number(need(c, "contract", "Q_min"), "contract.Q_min");
    cfg.contract.Q_max = number(need(c, "contract", "Q_max"), "contract.Q_max");
    try {
      cfg.contract.validate();
    } catch (const std::invalid_argument& e) {
      fail("contract", e.what());
    }
  }
  const Day horizon = root.contains("horizon") ? date(cal, root["horizon"], "horizon") : cfg.contract.t_end;
  if (horizon < cfg.contract.t_end) fail("horizon", "must not precede contract.end");
  cfg.model.horizon = horizon;

  // market
  {
    const json& cs = need(root, "", "commodities");
    if (!cs.is_array() || cs.empty()) fail("commodities", "expected a nonempty list (the first is the gas market)");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string k = sub("commodities", i);
      allow_keys(cs[i], k, {"name", "curve", "factors"});
      CommodityModel m;
      m.name = text(need(cs[i], k, "name"), sub(k, "name"));
      m.initial_curve = daily_steps(cal, need(cs[i], k, "curve"), sub(k, "curve"), "price", horizon);
      const json& fs = need(cs[i], k, "factors");
      if (!fs.is_array() || fs.empty()) fail(sub(k, "factors"), "expected a nonempty list");
      for (std::size_t f = 0; f < fs.size(); ++f) {
        const std::string fk = sub(sub(k, "factors"), f);
        allow_keys(fs[f], fk, {"sigma", "mean_reversion"});
        Factor fac;
        fac.sigma = vol_curve(cal, need(fs[f], fk, "sigma"), sub(fk, "sigma"), horizon);
        fac.mean_reversion = number(need(fs[f], fk, "mean_reversion"), sub(fk, "mean_reversion"));
        m.factors.push_back(fac);
      }
      if (cfg.commodity_id(m.name) >= 0) fail(sub(k, "name"), "duplicate commodity '" + m.name + "'");
      cfg.model.commodities.push_back(std::move(m));
    }
    if (root.contains("fx")) {
      const json& xs = root["fx"];
      if (!xs.is_array()) fail("fx", "expected a list");
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const std::string k = sub("fx", i);
        allow_keys(xs[i], k, {"name", "spot", "sigma", "foreign_rate"});
        FxModel x;
        x.name = text(need(xs[i], k, "name"), sub(k, "name"));
        x.spot = number(need(xs[i], k, "spot"), sub(k, "spot"));
        x.sigma = number(need(xs[i], k, "sigma"), sub(k, "sigma"));
        x.foreign_rate = xs[i].contains("foreign_rate")
                             ? vol_curve(cal, xs[i]["foreign_rate"], sub(k, "foreign_rate"), horizon)
                             : VolCurve(0.0);
        if (cfg.fx_id(x.name) >= 0) fail(sub(k, "name"), "duplicate exchange rate '" + x.name + "'");
        cfg.model.fx.push_back(std::move(x));
      }
    }
    const int n = cfg.model.driver_count();
    cfg.model.correlation = Eigen::MatrixXd::Identity(n, n);
    auto driver = [&](const std::string& name, const std::string& key) {
      const auto slash = name.find('/');
      if (slash == std::string::npos) fail(key, "driver '" + name + "' is not of the form <commodity>/<factor> or fx/<name>");
      const std::string head = name.substr(0, slash);
      const std::string tail = name.substr(slash + 1);
      if (head == "fx") {
        const int x = cfg.fx_id(tail);
        if (x < 0) fail(key, "unknown exchange rate '" + tail + "'");
        return cfg.model.fx_driver(x);
      }
      const int c = cfg.commodity_id(head);
      if (c < 0) fail(key, "unknown commodity '" + head + "'");
      int f = -1;
      try {
        f = std::stoi(tail);
      } catch (const std::exception&) {
        fail(key, "bad factor number in '" + name + "'");
      }
      if (f < 0 || f >= static_cast<int>(cfg.model.commodities[static_cast<std::size_t>(c)].factors.size())) {
        fail(key, "factor out of range in '" + name + "'");
      }
      return cfg.model.factor_offset(c) + f;
    };
    if (root.contains("correlation")) {
      const json& cs2 = root["correlation"];
      if (!cs2.is_array()) fail("correlation", "expected a list of {a, b, rho}");
      for (std::size_t i = 0; i < cs2.size(); ++i) {
        const std::string k = sub("correlation", i);
        allow_keys(cs2[i], k, {"a", "b", "rho"});
        const int a = driver(text(need(cs2[i], k, "a"), sub(k, "a")), sub(k, "a"));
        const int b = driver(text(need(cs2[i], k, "b"), sub(k, "b")), sub(k, "b"));
        if (a == b) fail(k, "a driver cannot be correlated with itself");
        const double rho = number(need(cs2[i], k, "rho"), sub(k, "rho"));
        cfg.model.correlation(a, b) = rho;
        cfg.model.correlation(b, a) = rho;
      }
    }
    try {
      cfg.model.validate();
    } catch (const std::exception& e) {
      fail("commodities/fx/correlation", e.what());
    }
  }

  // index
  {
    const json& ij = need(root, "", "index");
    allow_keys(ij, "index", {"a0", "resets", "components"});
    cfg.index.a0 = number(need(ij, "index", "a0"), "index.a0");
    cfg.index.last_day = cfg.contract.t_end;
    const json& rj = need(ij, "index", "resets");
    if (rj.is_string() && rj.get<std::string>() == "monthly") {
      cfg.index.resets = monthly_resets(cal, cfg.contract.t_start, cfg.contract.t_end);
    } else if (rj.is_array()) {
      for (std::size_t i = 0; i < rj.size(); ++i) cfg.index.resets.push_back(date(cal, rj[i], sub("index.resets", i)));
    } else {
      fail("index.resets", "expected \"monthly\" or a list of dates");
    }
    const json& cj = need(ij, "index", "components");
    if (!cj.is_array()) fail("index.components", "expected a list");
    for (std::size_t i = 0; i < cj.size(); ++i) {
      const std::string k = sub("index.components", i);
      allow_keys(cj[i], k, {"commodity", "weight", "offset", "window_months", "lag_months", "fx"});
      const std::string name = text(need(cj[i], k, "commodity"), sub(k, "commodity"));
      const int c = cfg.commodity_id(name);
      if (c < 0) fail(sub(k, "commodity"), "unknown commodity '" + name + "'");
      if (c == 0) fail(sub(k, "commodity"), "the gas market cannot be an index component");
      int fx = -1;
      if (cj[i].contains("fx") && !cj[i]["fx"].is_null()) {
        const std::string xn = text(cj[i]["fx"], sub(k, "fx"));
        fx = cfg.fx_id(xn);
        if (fx < 0) fail(sub(k, "fx"), "unknown exchange rate '" + xn + "'");
      }
      const auto window = static_cast<int>(count(need(cj[i], k, "window_months"), sub(k, "window_months")));
      const auto lag = cj[i].contains("lag_months") ? static_cast<int>(count(cj[i]["lag_months"], sub(k, "lag_months"))) : 0;
      if (window == 0) fail(sub(k, "window_months"), "must be positive");
      cfg.index.components.push_back(make_component(cal, cfg.index.resets, c,
                                                    number(need(cj[i], k, "weight"), sub(k, "weight")),
                                                    number_or(cj[i], k, "offset", 0.0), lag, window, fx));
    }
    try {
      cfg.index.validate(cfg.contract, cfg.model);
    } catch (const std::invalid_argument& e) {
      fail("index", e.what());
    }
  }

  // grid and regressor
  {
    if (root.contains("grid")) {
      const json& g = root["grid"];
      allow_keys(g, "grid", {"volume_step", "control_step"});
      cfg.grid.step = number_or(g, "grid", "volume_step", cfg.grid.step);
      cfg.grid.control_step = number_or(g, "grid", "control_step", cfg.grid.control_step);
    }
    try {
      cfg.grid.validate(cfg.contract);
      reachable_levels(cfg.contract, cfg.grid);
    } catch (const std::invalid_argument& e) {
      fail("grid", e.what());
    }
    if (root.contains("regressor")) {
      const json& r = root["regressor"];
      allow_keys(r, "regressor", {"kind", "cells", "degree"});
      if (r.contains("kind")) {
        try {
          cfg.regressor.kind = regressor_kind_from_string(text(r["kind"], "regressor.kind"));
        } catch (const std::invalid_argument& e) {
          fail("regressor.kind", e.what());
        }
      }
      auto ints = [&](const char* name, std::vector<int>& out) {
        if (!r.contains(name)) return;
        const json& a = r[name];
        if (!a.is_array()) fail(sub("regressor", name), "expected a list");
        out.clear();
        for (std::size_t i = 0; i < a.size(); ++i) out.push_back(static_cast<int>(count(a[i], sub(sub("regressor", name), i))));
      };
      ints("cells", cfg.regressor.cells);
      ints("degree", cfg.regressor.degree);
    }
    try {
      cfg.regressor.validate();
    } catch (const std::invalid_argument& e) {
      fail("regressor", e.what());
    }
  }

  // products
  {
    const json pj = root.contains("products") ? root["products"] : json::object();
    if (!pj.is_object()) fail("products", "expected an object keyed by commodity");
    for (auto it = pj.begin(); it != pj.end(); ++it) {
      if (cfg.commodity_id(it.key()) < 0) fail(sub("products", it.key().c_str()), "unknown commodity");
    }
    for (std::size_t c = 0; c < cfg.model.commodities.size(); ++c) {
      const std::string& name = cfg.model.commodities[c].name;
      Product range = c == 0 ? Product{cfg.contract.t_start, cfg.contract.t_end}
                             : commodity_window_hull(cfg.index, static_cast<int>(c));
      if (range.end > horizon) fail("horizon", "does not cover the delivery days of " + name);
      const std::string k = sub("products", name.c_str());
      ProductCalendar pc;
      if (!pj.contains(name) || (pj[name].is_string() && pj[name].get<std::string>() == "standard")) {
        pc = ProductCalendar::standard(cal, range.begin, range.end);
      } else {
        const json& lj = pj[name];
        allow_keys(lj, k, {"listed"});
        const json& qs = need(lj, k, "listed");
        if (!qs.is_array()) fail(sub(k, "listed"), "expected a list");
        std::vector<ProductCalendar::Quote> quotes;
        for (std::size_t i = 0; i < qs.size(); ++i) {
          const std::string qk = sub(sub(k, "listed"), i);
          allow_keys(qs[i], qk, {"begin", "end", "from", "to"});
          ProductCalendar::Quote q;
          q.product.begin = date(cal, need(qs[i], qk, "begin"), sub(qk, "begin"));
          q.product.end = date(cal, need(qs[i], qk, "end"), sub(qk, "end"));
          q.quoted_from = date(cal, need(qs[i], qk, "from"), sub(qk, "from"));
          q.quoted_to = date(cal, need(qs[i], qk, "to"), sub(qk, "to"));
          quotes.push_back(q);
        }
        try {
          pc = ProductCalendar::listed(quotes, range.begin, range.end);
        } catch (const std::invalid_argument& e) {
          fail(k, e.what());
        }
      }
      try {
        pc.validate();
      } catch (const std::invalid_argument& e) {
        fail(k, e.what());
      }
      cfg.products.push_back(std::move(pc));
    }
  }

  // hedge
  {
    const json hj = root.contains("hedge") ? root["hedge"] : json::object();
    allow_keys(hj, "hedge", {"plans", "tracked", "tracked_paths", "bootstrap"});
    const int nc = static_cast<int>(cfg.model.commodities.size());
    const int nx = static_cast<int>(cfg.model.fx.size());
    if (hj.contains("tracked_paths")) cfg.tracked_paths = count(hj["tracked_paths"], "hedge.tracked_paths");
    if (hj.contains("bootstrap")) cfg.bootstrap = static_cast<int>(count(hj["bootstrap"], "hedge.bootstrap"));
    if (!hj.contains("plans")) {
      cfg.plans = component_plans(nc, nx);
    } else {
      const json& ps = hj["plans"];
      if (!ps.is_array()) fail("hedge.plans", "expected a list");
      for (std::size_t i = 0; i < ps.size(); ++i) {
        const std::string k = sub("hedge.plans", i);
        if (ps[i].is_string()) {
          const std::string preset = ps[i].get<std::string>();
          std::vector<HedgePlan> more;
          if (preset == "components") more = component_plans(nc, nx);
          else if (preset == "frequency") more = frequency_plans(nc, nx);
          else if (preset == "thinning") more = thinning_plans(nc, nx);
          else fail(k, "unknown preset '" + preset + "' (components, frequency, thinning)");
          cfg.plans.insert(cfg.plans.end(), more.begin(), more.end());
          continue;
        }
        allow_keys(ps[i], k,
                   {"name", "gas", "commodities", "fx", "frequency", "frequency_before_start", "gas_frequency",
                    "extra_dates"});
        HedgePlan p;
        p.name = text(need(ps[i], k, "name"), sub(k, "name"));
        if (ps[i].contains("gas")) {
          if (!ps[i]["gas"].is_boolean()) fail(sub(k, "gas"), "expected true or false");
          p.gas = ps[i]["gas"].get<bool>();
        }
        if (ps[i].contains("commodities")) {
          const json& a = ps[i]["commodities"];
          if (!a.is_array()) fail(sub(k, "commodities"), "expected a list of names");
          for (std::size_t m = 0; m < a.size(); ++m) {
            const std::string name = text(a[m], sub(sub(k, "commodities"), m));
            const int c = cfg.commodity_id(name);
            if (c <= 0) fail(sub(sub(k, "commodities"), m), "'" + name + "' is not an index commodity");
            p.commodities.push_back(c);
          }
        }
        if (ps[i].contains("fx")) {
          const json& a = ps[i]["fx"];
          if (!a.is_array()) fail(sub(k, "fx"), "expected a list of names");
          for (std::size_t m = 0; m < a.size(); ++m) {
            const std::string name = text(a[m], sub(sub(k, "fx"), m));
            const int x = cfg.fx_id(name);
            if (x < 0) fail(sub(sub(k, "fx"), m), "unknown exchange rate '" + name + "'");
            p.fx.push_back(x);
          }
        }
        if (ps[i].contains("frequency")) {
          p.index_schedule.after = frequency(ps[i]["frequency"], sub(k, "frequency"));
          p.index_schedule.before = p.index_schedule.after;
        }
        if (ps[i].contains("frequency_before_start")) {
          p.index_schedule.before = frequency(ps[i]["frequency_before_start"], sub(k, "frequency_before_start"));
        }
        if (ps[i].contains("gas_frequency")) {
          p.gas_schedule.after = frequency(ps[i]["gas_frequency"], sub(k, "gas_frequency"));
          p.gas_schedule.before = p.gas_schedule.after;
        }
        if (ps[i].contains("extra_dates")) {
          const json& a = ps[i]["extra_dates"];
          if (!a.is_array()) fail(sub(k, "extra_dates"), "expected a list of dates");
          for (std::size_t m = 0; m < a.size(); ++m) {
            const Day d = date(cal, a[m], sub(sub(k, "extra_dates"), m));
            if (d < 0 || d > horizon) {
              std::cerr << "warning: " << sub(sub(k, "extra_dates"), m) << " lies outside the simulated days and is ignored\n";
              continue;
            }
            p.index_schedule.extra.push_back(d);
            p.gas_schedule.extra.push_back(d);
          }
        }
        cfg.plans.push_back(std::move(p));
      }
    }
    std::set<std::string> names;
    for (const auto& p : cfg.plans) {
      if (!names.insert(p.name).second) fail("hedge.plans", "duplicate plan name '" + p.name + "'");
    }
    if (hj.contains("tracked")) {
      const json& ts = hj["tracked"];
      if (!ts.is_array()) fail("hedge.tracked", "expected a list");
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const std::string k = sub("hedge.tracked", i);
        allow_keys(ts[i], k, {"name", "commodity", "month", "fx"});
        TrackedExposure e;
        e.name = text(need(ts[i], k, "name"), sub(k, "name"));
        if (ts[i].contains("fx")) {
          const std::string xn = text(ts[i]["fx"], sub(k, "fx"));
          e.kind = TargetKind::Fx;
          e.index = cfg.fx_id(xn);
          if (e.index < 0) fail(sub(k, "fx"), "unknown exchange rate '" + xn + "'");
        } else {
          const std::string cn = text(need(ts[i], k, "commodity"), sub(k, "commodity"));
          e.index = cfg.commodity_id(cn);
          if (e.index < 0) fail(sub(k, "commodity"), "unknown commodity '" + cn + "'");
          e.kind = e.index == 0 ? TargetKind::Gas : TargetKind::Commodity;
          const std::string month = text(need(ts[i], k, "month"), sub(k, "month"));
          const Day first = date(cal, json(month + "-01"), sub(k, "month"));
          e.month_begin = first;
          e.month_end = cal.month_end(first);
        }
        cfg.tracked.push_back(std::move(e));
      }
    }
  }
  return cfg;
}

void save_archive(const std::string& file, const Archive& a) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write archive '" + file + "'");
  out.write("SWGH", 4);
  bin::put(out, kArchiveVersion);
  bin::put(out, a.config_hash);
  bin::put(out, a.paths);
  bin::put(out, a.seed);
  a.policy.save(out);
  if (!out) throw std::runtime_error("failed writing archive '" + file + "'");
}

Archive load_archive(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open archive '" + file + "'");
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "SWGH") throw std::runtime_error("'" + file + "' is not a policy archive");
  const auto version = bin::get<std::uint32_t>(in);
  if (version != kArchiveVersion) {
    throw std::runtime_error("archive '" + file + "' has format version " + std::to_string(version) +
                             ", expected " + std::to_string(kArchiveVersion));
  }
  Archive a;
  a.config_hash = bin::get<std::uint64_t>(in);
  a.paths = bin::get<std::uint64_t>(in);
  a.seed = bin::get<std::uint64_t>(in);
  a.policy = Policy::load(in);
  return a;
}

}  // namespace swing
