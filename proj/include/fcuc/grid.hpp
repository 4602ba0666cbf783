#pragma once

// Static grid data model: buses, lines, generator fleet, per-unit bases,
// plus scenario (demand/RES profile) handling and stochastic sampling.

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcuc/rng.hpp"

namespace fcuc {

struct Bus {
  int id = 0;
};

struct Generator {
  int id = 0;
  int bus = 0;
  double cost = 0.0;           // $/MWh
  double no_load_cost = 0.0;   // $/h
  double startup_cost = 0.0;   // $
  double reserve_cost = 0.0;   // $/MWh
  double p_min = 0.0;          // MW
  double p_max = 0.0;          // MW
  double ramp_hr = 0.0;        // MW/h
  double ramp_re = 0.0;        // MW
  int min_up = 1;              // h
  int min_down = 1;            // h
  double inertia_h = 0.0;      // s on machine base
  double rating_mva = 0.0;     // MVA
  int initial_status = 0;      // committed at t=0
  double initial_output = 0.0; // MW at t=0
};

struct Line {
  int id = 0;
  int from = 0;
  int to = 0;
  double susceptance = 0.0;  // pu
  double p_max = 0.0;        // MW thermal limit
};

struct GridModel {
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  double s_base_mva = 100.0;
  double f_nom_hz = 60.0;
  double voltage_pu = 1.0;  // flat profile

  int bus_index(int bus_id) const {
    for (size_t i = 0; i < buses.size(); ++i)
      if (buses[i].id == bus_id) return static_cast<int>(i);
    return -1;
  }
  int num_buses() const { return static_cast<int>(buses.size()); }
  int num_lines() const { return static_cast<int>(lines.size()); }
  int num_generators() const { return static_cast<int>(generators.size()); }
};

// Demand/RES profile over the horizon, bus-major storage.
struct Scenario {
  int num_buses = 0;
  int num_periods = 0;
  std::vector<double> demand_mw;  // size num_buses * num_periods
  std::vector<double> res_mw;
  std::uint64_t seed = 0;

  double& demand(int b, int t) { return demand_mw[size_t(b) * num_periods + t]; }
  double demand(int b, int t) const { return demand_mw[size_t(b) * num_periods + t]; }
  double& res(int b, int t) { return res_mw[size_t(b) * num_periods + t]; }
  double res(int b, int t) const { return res_mw[size_t(b) * num_periods + t]; }

  double total_demand(int t) const {
    double s = 0.0;
    for (int b = 0; b < num_buses; ++b) s += demand(b, t);
    return s;
  }
  double total_res(int t) const {
    double s = 0.0;
    for (int b = 0; b < num_buses; ++b) s += res(b, t);
    return s;
  }

  static Scenario zeros(int num_buses, int num_periods) {
    Scenario s;
    s.num_buses = num_buses;
    s.num_periods = num_periods;
    s.demand_mw.assign(size_t(num_buses) * num_periods, 0.0);
    s.res_mw.assign(size_t(num_buses) * num_periods, 0.0);
    return s;
  }
};

namespace detail {

inline double require_number(const nlohmann::json& j, const std::string& key,
                             const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::runtime_error("schema error: missing or non-numeric field '" + key +
                             "' in " + ctx);
  return j[key].get<double>();
}

inline int require_int(const nlohmann::json& j, const std::string& key,
                       const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw std::runtime_error("schema error: missing or non-integer field '" + key +
                             "' in " + ctx);
  return j[key].get<int>();
}

}  // namespace detail

inline GridModel load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse error: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("parse error: " + std::string(e.what()));
  }
  for (const char* key : {"buses", "lines", "generators"})
    if (!j.contains(key) || !j[key].is_array())
      throw std::runtime_error("schema error: missing array '" + std::string(key) + "'");

  GridModel g;
  g.s_base_mva = j.value("s_base_mva", 100.0);
  g.f_nom_hz = j.value("f_nom_hz", 60.0);
  g.voltage_pu = j.value("voltage_pu", 1.0);
  for (const auto& jb : j["buses"]) {
    Bus b;
    b.id = detail::require_int(jb, "id", "bus");
    g.buses.push_back(b);
  }
  for (const auto& jl : j["lines"]) {
    Line l;
    l.id = detail::require_int(jl, "id", "line");
    l.from = detail::require_int(jl, "from", "line");
    l.to = detail::require_int(jl, "to", "line");
    l.susceptance = detail::require_number(jl, "susceptance", "line");
    l.p_max = detail::require_number(jl, "p_max", "line");
    g.lines.push_back(l);
  }
  for (const auto& jg : j["generators"]) {
    Generator gen;
    gen.id = detail::require_int(jg, "id", "generator");
    gen.bus = detail::require_int(jg, "bus", "generator");
    gen.cost = detail::require_number(jg, "cost", "generator");
    gen.no_load_cost = detail::require_number(jg, "no_load_cost", "generator");
    gen.startup_cost = detail::require_number(jg, "startup_cost", "generator");
    gen.reserve_cost = detail::require_number(jg, "reserve_cost", "generator");
    gen.p_min = detail::require_number(jg, "p_min", "generator");
    gen.p_max = detail::require_number(jg, "p_max", "generator");
    gen.ramp_hr = detail::require_number(jg, "ramp_hr", "generator");
    gen.ramp_re = detail::require_number(jg, "ramp_re", "generator");
    gen.min_up = detail::require_int(jg, "min_up", "generator");
    gen.min_down = detail::require_int(jg, "min_down", "generator");
    gen.inertia_h = detail::require_number(jg, "inertia_h", "generator");
    gen.rating_mva = detail::require_number(jg, "rating_mva", "generator");
    gen.initial_status = jg.value("initial_status", 0);
    gen.initial_output = jg.value("initial_output", 0.0);
    g.generators.push_back(gen);
  }
  return g;
}

inline void save_grid(const GridModel& g, const std::string& path) {
  nlohmann::json j;
  j["s_base_mva"] = g.s_base_mva;
  j["f_nom_hz"] = g.f_nom_hz;
  j["voltage_pu"] = g.voltage_pu;
  j["buses"] = nlohmann::json::array();
  for (const Bus& b : g.buses) j["buses"].push_back({{"id", b.id}});
  j["lines"] = nlohmann::json::array();
  for (const Line& l : g.lines)
    j["lines"].push_back({{"id", l.id},
                          {"from", l.from},
                          {"to", l.to},
                          {"susceptance", l.susceptance},
                          {"p_max", l.p_max}});
  j["generators"] = nlohmann::json::array();
  for (const Generator& gen : g.generators)
    j["generators"].push_back({{"id", gen.id},
                               {"bus", gen.bus},
                               {"cost", gen.cost},
                               {"no_load_cost", gen.no_load_cost},
                               {"startup_cost", gen.startup_cost},
                               {"reserve_cost", gen.reserve_cost},
                               {"p_min", gen.p_min},
                               {"p_max", gen.p_max},
                               {"ramp_hr", gen.ramp_hr},
                               {"ramp_re", gen.ramp_re},
                               {"min_up", gen.min_up},
                               {"min_down", gen.min_down},
                               {"inertia_h", gen.inertia_h},
                               {"rating_mva", gen.rating_mva},
                               {"initial_status", gen.initial_status},
                               {"initial_output", gen.initial_output}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_grid: cannot open " + path);
  out << j.dump(2) << "\n";
}

// Connectivity over the line graph (ignores line direction).
inline bool grid_connected(const GridModel& g) {
  const int n = g.num_buses();
  if (n == 0) return false;
  std::vector<std::vector<int>> adj(n);
  for (const Line& l : g.lines) {
    const int a = g.bus_index(l.from), b = g.bus_index(l.to);
    if (a < 0 || b < 0) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == n;
}

inline std::vector<std::string> validate_grid(const GridModel& g) {
  std::vector<std::string> report;
  auto complain = [&](const std::string& msg) { report.push_back(msg); };
  if (g.f_nom_hz <= 0) complain("nominal frequency must be positive");
  if (g.s_base_mva <= 0) complain("system base must be positive");
  std::set<int> bus_ids;
  for (const Bus& b : g.buses) {
    if (!bus_ids.insert(b.id).second)
      complain("duplicate bus id " + std::to_string(b.id));
  }
  for (const Line& l : g.lines) {
    const std::string tag = "line " + std::to_string(l.id) + ": ";
    if (!bus_ids.count(l.from) || !bus_ids.count(l.to))
      complain(tag + "dangling bus reference");
    if (l.from == l.to) complain(tag + "self loop");
    if (l.susceptance <= 0) complain(tag + "susceptance must be positive");
    if (l.p_max <= 0) complain(tag + "thermal limit must be positive");
  }
  for (const Generator& gen : g.generators) {
    const std::string tag = "generator " + std::to_string(gen.id) + ": ";
    if (!bus_ids.count(gen.bus)) complain(tag + "dangling bus reference");
    if (gen.p_min < 0) complain(tag + "negative minimum output");
    if (gen.p_min > gen.p_max) complain(tag + "inverted capacity bounds");
    if (gen.inertia_h <= 0) complain(tag + "inertia constant must be positive");
    if (gen.rating_mva <= 0) complain(tag + "rating must be positive");
    if (gen.min_up < 1 || gen.min_down < 1)
      complain(tag + "min up/down times must be at least 1");
    if (gen.cost < 0 || gen.no_load_cost < 0 || gen.startup_cost < 0 ||
        gen.reserve_cost < 0)
      complain(tag + "negative cost");
  }
  if (!g.buses.empty() && !grid_connected(g)) complain("network is not connected");
  return report;
}

inline Scenario load_scenario(const GridModel& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse error: cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header != "bus,period,demand_mw,res_mw")
    throw std::runtime_error("schema error: bad scenario header '" + header + "'");
  int max_period = 0;
  struct Row {
    int bus, period;
    double d, r;
  };
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    Row row;
    char c1, c2, c3;
    if (!(ss >> row.bus >> c1 >> row.period >> c2 >> row.d >> c3 >> row.r))
      throw std::runtime_error("parse error: bad scenario row '" + line + "'");
    rows.push_back(row);
    max_period = std::max(max_period, row.period);
  }
  Scenario s = Scenario::zeros(g.num_buses(), max_period);
  for (const Row& row : rows) {
    const int b = g.bus_index(row.bus);
    if (b < 0)
      throw std::runtime_error("schema error: scenario references unknown bus " +
                               std::to_string(row.bus));
    if (row.period < 1 || row.period > max_period)
      throw std::runtime_error("schema error: bad period");
    s.demand(b, row.period - 1) = row.d;
    s.res(b, row.period - 1) = row.r;
  }
  return s;
}

inline void save_scenario(const GridModel& g, const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_scenario: cannot open " + path);
  out << "bus,period,demand_mw,res_mw\n";
  char buf[128];
  for (int b = 0; b < s.num_buses; ++b)
    for (int t = 0; t < s.num_periods; ++t) {
      std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%.10g\n", g.buses[b].id, t + 1,
                    s.demand(b, t), s.res(b, t));
      out << buf;
    }
}

// Gaussian profile sampling around a per-scenario shifted mean, truncated at
// zero. The mean shift is drawn per bus and profile from mean_shift in
// [lo, hi] as a fraction of the base value.
inline std::vector<Scenario> sample_scenarios(const GridModel& g, const Scenario& base,
                                              int count, double shift_lo, double shift_hi,
                                              double sigma, std::uint64_t seed) {
  if (shift_lo > shift_hi) throw std::invalid_argument("sample_scenarios: invalid range");
  if (sigma < 0) throw std::invalid_argument("sample_scenarios: negative sigma");
  if (base.num_buses != g.num_buses())
    throw std::invalid_argument("sample_scenarios: scenario/grid bus mismatch");
  std::vector<Scenario> out;
  out.reserve(std::max(count, 0));
  Rng rng(seed);
  for (int k = 0; k < count; ++k) {
    Scenario s = Scenario::zeros(base.num_buses, base.num_periods);
    s.seed = seed + static_cast<std::uint64_t>(k);
    for (int b = 0; b < base.num_buses; ++b) {
      const double dshift = rng.uniform(shift_lo, shift_hi);
      const double rshift = rng.uniform(shift_lo, shift_hi);
      for (int t = 0; t < base.num_periods; ++t) {
        const double dmean = base.demand(b, t) * (1.0 + dshift);
        const double rmean = base.res(b, t) * (1.0 + rshift);
        s.demand(b, t) = std::max(0.0, rng.gaussian(dmean, sigma * base.demand(b, t)));
        s.res(b, t) = std::max(0.0, rng.gaussian(rmean, sigma * base.res(b, t)));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace fcuc
