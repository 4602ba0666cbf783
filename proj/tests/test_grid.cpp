#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "fcuc/grid.hpp"

using namespace fcuc;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

GridModel small_grid(int nbus, int nline, int ngen) {
  GridModel g;
  for (int b = 0; b < nbus; ++b) g.buses.push_back({b + 1});
  for (int l = 0; l < nline; ++l) {
    Line ln;
    ln.id = l + 1;
    ln.from = g.buses[l % nbus].id;
    ln.to = g.buses[(l + 1) % nbus].id;
    ln.susceptance = 5.0;
    ln.p_max = 200.0;
    g.lines.push_back(ln);
  }
  for (int k = 0; k < ngen; ++k) {
    Generator gen;
    gen.id = k + 1;
    gen.bus = g.buses[k % nbus].id;
    gen.cost = 20.0 + k;
    gen.p_min = 10.0;
    gen.p_max = 100.0;
    gen.ramp_hr = 60.0;
    gen.ramp_re = 30.0;
    gen.inertia_h = 4.0;
    gen.rating_mva = 120.0;
    g.generators.push_back(gen);
  }
  return g;
}

}  // namespace

TEST_CASE("load_grid preserves element counts and applies defaults") {
  const std::string path = "grid_small.json";
  write_file(path, R"({
    "buses": [{"id": 1}, {"id": 2}],
    "lines": [{"id": 1, "from": 1, "to": 2, "susceptance": 8.0, "p_max": 150.0}],
    "generators": [
      {"id": 1, "bus": 1, "cost": 15, "no_load_cost": 100, "startup_cost": 400,
       "reserve_cost": 3, "p_min": 20, "p_max": 120, "ramp_hr": 80, "ramp_re": 40,
       "min_up": 2, "min_down": 2, "inertia_h": 5.0, "rating_mva": 150},
      {"id": 2, "bus": 2, "cost": 30, "no_load_cost": 50, "startup_cost": 200,
       "reserve_cost": 4, "p_min": 10, "p_max": 80, "ramp_hr": 60, "ramp_re": 30,
       "min_up": 1, "min_down": 1, "inertia_h": 3.5, "rating_mva": 100}
    ]})");
  GridModel g = load_grid(path);
  CHECK(g.num_buses() == 2);
  CHECK(g.num_lines() == 1);
  CHECK(g.num_generators() == 2);
  CHECK(g.s_base_mva == Catch::Approx(100.0));
  CHECK(g.f_nom_hz == Catch::Approx(60.0));
  CHECK(g.voltage_pu == Catch::Approx(1.0));
  std::remove(path.c_str());
}

TEST_CASE("load_grid rejects a line without susceptance") {
  const std::string path = "grid_bad.json";
  write_file(path, R"({
    "buses": [{"id": 1}, {"id": 2}],
    "lines": [{"id": 1, "from": 1, "to": 2, "p_max": 150.0}],
    "generators": []})");
  CHECK_THROWS_WITH(load_grid(path), Catch::Matchers::ContainsSubstring("schema error"));
  std::remove(path.c_str());
}

TEST_CASE("load_grid rejects malformed json") {
  const std::string path = "grid_malformed.json";
  write_file(path, "{ not json");
  CHECK_THROWS_WITH(load_grid(path), Catch::Matchers::ContainsSubstring("parse error"));
  std::remove(path.c_str());
}

TEST_CASE("a 24-bus 33-generator 38-line instance loads with matching counts") {
  GridModel g;
  for (int b = 1; b <= 24; ++b) g.buses.push_back({b});
  for (int l = 0; l < 38; ++l) {
    Line ln;
    ln.id = l + 1;
    ln.from = (l % 24) + 1;
    ln.to = ((l + 1) % 24) + 1;
    ln.susceptance = 10.0;
    ln.p_max = 400.0;
    g.lines.push_back(ln);
  }
  for (int k = 0; k < 33; ++k) {
    Generator gen;
    gen.id = k + 1;
    gen.bus = (k % 24) + 1;
    gen.cost = 20;
    gen.p_max = 100;
    gen.inertia_h = 4;
    gen.rating_mva = 120;
    g.generators.push_back(gen);
  }
  const std::string path = "grid_24bus.json";
  save_grid(g, path);
  GridModel loaded = load_grid(path);
  CHECK(loaded.num_buses() == 24);
  CHECK(loaded.num_generators() == 33);
  CHECK(loaded.num_lines() == 38);
  std::remove(path.c_str());
}

TEST_CASE("save then load round-trips the grid") {
  GridModel g = small_grid(3, 3, 2);
  g.generators[1].initial_status = 1;
  g.generators[1].initial_output = 55.5;
  const std::string path = "grid_rt.json";
  save_grid(g, path);
  GridModel r = load_grid(path);
  REQUIRE(r.num_generators() == g.num_generators());
  for (int i = 0; i < g.num_generators(); ++i) {
    CHECK(r.generators[i].id == g.generators[i].id);
    CHECK(r.generators[i].cost == g.generators[i].cost);
    CHECK(r.generators[i].initial_output == g.generators[i].initial_output);
  }
  REQUIRE(r.num_lines() == g.num_lines());
  for (int i = 0; i < g.num_lines(); ++i) {
    CHECK(r.lines[i].susceptance == g.lines[i].susceptance);
    CHECK(r.lines[i].p_max == g.lines[i].p_max);
  }
  std::remove(path.c_str());
}

TEST_CASE("validate_grid flags the spec edge cases") {
  SECTION("dangling bus reference") {
    GridModel g = small_grid(3, 3, 1);
    g.generators[0].bus = 99;
    auto report = validate_grid(g);
    bool found = false;
    for (const auto& r : report)
      if (r.find("dangling bus reference") != std::string::npos) found = true;
    CHECK(found);
  }
  SECTION("inverted capacity bounds") {
    GridModel g = small_grid(3, 3, 1);
    g.generators[0].p_min = 120.0;
    auto report = validate_grid(g);
    bool found = false;
    for (const auto& r : report)
      if (r.find("inverted capacity bounds") != std::string::npos) found = true;
    CHECK(found);
  }
  SECTION("well-formed grid gives an empty report") {
    GridModel g = small_grid(6, 6, 4);
    CHECK(validate_grid(g).empty());
  }
  SECTION("disconnected network is reported") {
    GridModel g = small_grid(4, 0, 1);
    g.lines.push_back({1, 1, 2, 5.0, 100.0});
    auto report = validate_grid(g);
    bool found = false;
    for (const auto& r : report)
      if (r.find("not connected") != std::string::npos) found = true;
    CHECK(found);
  }
}

TEST_CASE("scenario csv round trip") {
  GridModel g = small_grid(2, 2, 1);
  Scenario s = Scenario::zeros(2, 3);
  for (int b = 0; b < 2; ++b)
    for (int t = 0; t < 3; ++t) {
      s.demand(b, t) = 100.0 * (b + 1) + t;
      s.res(b, t) = 10.0 * b + 0.5 * t;
    }
  const std::string path = "scenario_rt.csv";
  save_scenario(g, s, path);
  Scenario r = load_scenario(g, path);
  REQUIRE(r.num_periods == 3);
  for (int b = 0; b < 2; ++b)
    for (int t = 0; t < 3; ++t) {
      CHECK(r.demand(b, t) == Catch::Approx(s.demand(b, t)));
      CHECK(r.res(b, t) == Catch::Approx(s.res(b, t)));
    }
  std::remove(path.c_str());
}

TEST_CASE("sample_scenarios obeys count, range, and determinism") {
  GridModel g = small_grid(3, 3, 2);
  Scenario base = Scenario::zeros(3, 24);
  for (int b = 0; b < 3; ++b)
    for (int t = 0; t < 24; ++t) {
      base.demand(b, t) = 80.0 + 5.0 * b + 2.0 * t;
      base.res(b, t) = (b == 1) ? 30.0 + t : 0.0;
    }

  SECTION("count zero gives an empty sequence") {
    CHECK(sample_scenarios(g, base, 0, -0.2, 0.2, 0.05, 1).empty());
  }
  SECTION("inverted range is rejected") {
    CHECK_THROWS_AS(sample_scenarios(g, base, 1, 0.2, -0.2, 0.05, 1),
                    std::invalid_argument);
  }
  SECTION("with sigma zero every scenario mean stays within +-20%") {
    auto scens = sample_scenarios(g, base, 100, -0.2, 0.2, 0.0, 42);
    REQUIRE(scens.size() == 100);
    for (const Scenario& s : scens) {
      for (int b = 0; b < 3; ++b) {
        double base_mean = 0, s_mean = 0;
        for (int t = 0; t < 24; ++t) {
          base_mean += base.demand(b, t);
          s_mean += s.demand(b, t);
        }
        const double ratio = s_mean / base_mean;
        CHECK(ratio >= 0.8 - 1e-9);
        CHECK(ratio <= 1.2 + 1e-9);
      }
    }
  }
  SECTION("values are nonnegative and dimensions match") {
    auto scens = sample_scenarios(g, base, 20, -0.2, 0.2, 0.5, 7);
    for (const Scenario& s : scens) {
      REQUIRE(s.num_buses == 3);
      REQUIRE(s.num_periods == 24);
      for (double v : s.demand_mw) CHECK(v >= 0.0);
      for (double v : s.res_mw) CHECK(v >= 0.0);
    }
  }
  SECTION("identical seed reproduces bit-identical scenarios") {
    auto a = sample_scenarios(g, base, 5, -0.2, 0.2, 0.05, 99);
    auto b = sample_scenarios(g, base, 5, -0.2, 0.2, 0.05, 99);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].demand_mw == b[i].demand_mw);
      CHECK(a[i].res_mw == b[i].res_mw);
    }
  }
}
