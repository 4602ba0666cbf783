#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "fcuc/milp.hpp"
#include "fcuc/milp_solver.hpp"

using namespace fcuc::milp;

namespace {

// Brute-force LP oracle for 2-variable models with finite box bounds:
// enumerate all vertices from pairs of tight constraints/bounds.
struct VertexOracle {
  Status status = Status::Infeasible;
  double objective = 0.0;
};

VertexOracle lp_vertex_oracle(const Model& m) {
  REQUIRE(m.num_variables() == 2);
  struct Line {
    double a0, a1, b;
  };
  std::vector<Line> lines;
  for (int i = 0; i < m.num_constraints(); ++i) {
    double a0 = 0, a1 = 0;
    for (const Term& t : m.constraint(i).terms) (t.var == 0 ? a0 : a1) = t.coef;
    lines.push_back({a0, a1, m.constraint(i).rhs});
  }
  for (int v = 0; v < 2; ++v) {
    lines.push_back({v == 0 ? 1.0 : 0.0, v == 1 ? 1.0 : 0.0, m.variable(v).lo});
    lines.push_back({v == 0 ? 1.0 : 0.0, v == 1 ? 1.0 : 0.0, m.variable(v).hi});
  }
  VertexOracle out;
  auto feasible = [&](double x0, double x1) {
    std::vector<double> x{x0, x1};
    return m.max_violation(x) <= 1e-7;
  };
  for (size_t i = 0; i < lines.size(); ++i) {
    for (size_t j = i + 1; j < lines.size(); ++j) {
      const double det = lines[i].a0 * lines[j].a1 - lines[i].a1 * lines[j].a0;
      if (std::abs(det) < 1e-10) continue;
      const double x0 = (lines[i].b * lines[j].a1 - lines[i].a1 * lines[j].b) / det;
      const double x1 = (lines[i].a0 * lines[j].b - lines[i].b * lines[j].a0) / det;
      if (!feasible(x0, x1)) continue;
      const double obj = m.objective_coef(0) * x0 + m.objective_coef(1) * x1;
      if (out.status == Status::Infeasible || obj < out.objective) {
        out.status = Status::Optimal;
        out.objective = obj;
      }
    }
  }
  return out;
}

// Enumeration oracle for small MILPs: fix every binary assignment, solve the
// continuous remainder, take the best.
VertexOracle milp_enumeration_oracle(const Model& m, const std::vector<int>& bins) {
  VertexOracle out;
  Model work = m;
  const long combos = 1L << bins.size();
  for (long mask = 0; mask < combos; ++mask) {
    for (size_t k = 0; k < bins.size(); ++k) {
      const double v = (mask >> k) & 1 ? 1.0 : 0.0;
      work.set_bounds(bins[k], v, v);
    }
    Solution lp = solve_lp(work);
    if (lp.status != Status::Optimal) continue;
    if (out.status == Status::Infeasible || lp.objective < out.objective) {
      out.status = Status::Optimal;
      out.objective = lp.objective;
    }
  }
  return out;
}

Model random_milp(std::mt19937_64& rng, int n_bin, int n_cont, int n_rows) {
  Model m;
  std::uniform_int_distribution<int> coef(-5, 5);
  std::uniform_int_distribution<int> rhs(-4, 12);
  std::uniform_int_distribution<int> sense(0, 2);
  for (int j = 0; j < n_bin; ++j) m.add_variable(0, 1, true, "b" + std::to_string(j));
  for (int j = 0; j < n_cont; ++j) m.add_variable(0, 10, false, "x" + std::to_string(j));
  for (int j = 0; j < n_bin + n_cont; ++j) m.set_objective_coef(j, coef(rng));
  for (int i = 0; i < n_rows; ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < n_bin + n_cont; ++j) {
      const int c = coef(rng);
      if (c != 0) terms.push_back({j, double(c)});
    }
    if (terms.empty()) continue;
    m.add_constraint(terms, sense(rng) == 0 ? Sense::GreaterEq : Sense::LessEq, rhs(rng));
  }
  return m;
}

}  // namespace

TEST_CASE("add_variable assigns sequential ids and validates bounds") {
  Model m;
  CHECK(m.add_variable(0, 1, false) == 0);
  CHECK(m.add_variable(0, 5, false) == 1);
  CHECK_THROWS_AS(m.add_variable(2, 1, false), std::invalid_argument);
  const int b = m.add_variable(0, 1, true, "u");
  CHECK(m.variable(b).integral);
  CHECK(m.variable(b).lo == 0.0);
  CHECK(m.variable(b).hi == 1.0);
}

TEST_CASE("add_constraint merges duplicate ids and rejects unknown ones") {
  Model m;
  const int x = m.add_variable(0, 10, false);
  const int c = m.add_constraint({{x, 1.0}, {x, 2.0}}, Sense::LessEq, 3.0);
  REQUIRE(m.constraint(c).terms.size() == 1);
  CHECK(m.constraint(c).terms[0].coef == Catch::Approx(3.0));
  CHECK_THROWS_AS(m.add_constraint({{7, 1.0}}, Sense::LessEq, 0.0), std::invalid_argument);
}

TEST_CASE("empty constraint with negative rhs makes the model infeasible") {
  Model m;
  m.add_variable(0, 1, false);
  m.add_constraint({}, Sense::LessEq, -1.0);
  Solution s = solve_lp(m);
  CHECK(s.status == Status::Infeasible);
}

TEST_CASE("solve_lp basic cases") {
  SECTION("minimize x subject to x >= 3") {
    Model m;
    const int x = m.add_variable(0, 10, false);
    m.set_objective_coef(x, 1.0);
    m.add_constraint({{x, 1.0}}, Sense::GreaterEq, 3.0);
    Solution s = solve_lp(m);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == Catch::Approx(3.0).margin(1e-7));
  }
  SECTION("two-variable polytope optimum") {
    // min x+y s.t. x+2y >= 4, 3x+y >= 6, x,y >= 0 -> (8/5, 6/5), objective 2.8
    Model m;
    const int x = m.add_variable(0, kInf, false);
    const int y = m.add_variable(0, kInf, false);
    m.set_objective_coef(x, 1.0);
    m.set_objective_coef(y, 1.0);
    m.add_constraint({{x, 1.0}, {y, 2.0}}, Sense::GreaterEq, 4.0);
    m.add_constraint({{x, 3.0}, {y, 1.0}}, Sense::GreaterEq, 6.0);
    Solution s = solve_lp(m);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == Catch::Approx(2.8).margin(1e-6));
    CHECK(s.values[x] == Catch::Approx(1.6).margin(1e-6));
    CHECK(s.values[y] == Catch::Approx(1.2).margin(1e-6));
  }
  SECTION("conflicting bounds rows are infeasible") {
    Model m;
    const int x = m.add_variable(-100, 100, false);
    m.add_constraint({{x, 1.0}}, Sense::GreaterEq, 1.0);
    m.add_constraint({{x, 1.0}}, Sense::LessEq, 0.0);
    CHECK(solve_lp(m).status == Status::Infeasible);
  }
  SECTION("unbounded below") {
    Model m;
    const int x = m.add_variable(0, kInf, false);
    m.set_objective_coef(x, -1.0);
    CHECK(solve_lp(m).status == Status::Unbounded);
  }
  SECTION("free variable with equality row") {
    Model m;
    const int x = m.add_variable(-kInf, kInf, false);
    const int y = m.add_variable(0, 10, false);
    m.set_objective_coef(y, 1.0);
    m.add_constraint({{x, 1.0}, {y, 1.0}}, Sense::Equal, -5.0);
    m.add_constraint({{x, 1.0}}, Sense::GreaterEq, -7.0);
    Solution s = solve_lp(m);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == Catch::Approx(0.0).margin(1e-7));
    CHECK(s.values[x] == Catch::Approx(-5.0).margin(1e-6));
  }
}

TEST_CASE("solve_lp survives the classic cycling example") {
  // Beale's example; optimum is -1/20.
  Model m;
  const int x1 = m.add_variable(0, kInf, false);
  const int x2 = m.add_variable(0, kInf, false);
  const int x3 = m.add_variable(0, kInf, false);
  const int x4 = m.add_variable(0, kInf, false);
  m.set_objective_coef(x1, -0.75);
  m.set_objective_coef(x2, 150.0);
  m.set_objective_coef(x3, -0.02);
  m.set_objective_coef(x4, 6.0);
  m.add_constraint({{x1, 0.25}, {x2, -60.0}, {x3, -0.04}, {x4, 9.0}}, Sense::LessEq, 0.0);
  m.add_constraint({{x1, 0.5}, {x2, -90.0}, {x3, -0.02}, {x4, 3.0}}, Sense::LessEq, 0.0);
  m.add_constraint({{x3, 1.0}}, Sense::LessEq, 1.0);
  Solution s = solve_lp(m);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == Catch::Approx(-0.05).margin(1e-7));
}

TEST_CASE("solve_lp agrees with vertex enumeration on random boxed LPs") {
  std::mt19937_64 rng(20240701);
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> nrows(2, 5);
  std::uniform_int_distribution<int> rhs(-3, 8);
  int optimal_seen = 0;
  for (int inst = 0; inst < 80; ++inst) {
    Model m;
    m.add_variable(0, 6, false, "x0");
    m.add_variable(0, 6, false, "x1");
    m.set_objective_coef(0, coef(rng));
    m.set_objective_coef(1, coef(rng));
    const int rows = nrows(rng);
    for (int i = 0; i < rows; ++i) {
      std::vector<Term> terms;
      const int a0 = coef(rng), a1 = coef(rng);
      if (a0 == 0 && a1 == 0) continue;
      if (a0 != 0) terms.push_back({0, double(a0)});
      if (a1 != 0) terms.push_back({1, double(a1)});
      m.add_constraint(terms, (inst + i) % 2 ? Sense::LessEq : Sense::GreaterEq, rhs(rng));
    }
    VertexOracle oracle = lp_vertex_oracle(m);
    Solution s = solve_lp(m);
    INFO("instance " << inst);
    REQUIRE(s.status == oracle.status);
    if (s.status == Status::Optimal) {
      ++optimal_seen;
      CHECK(s.objective == Catch::Approx(oracle.objective).margin(1e-6));
      CHECK(m.max_violation(s.values) <= 1e-6);
    }
  }
  CHECK(optimal_seen > 20);  // the generator should produce plenty of feasible LPs
}

TEST_CASE("solve_milp solves the small knapsack in minimize form") {
  // max 5a+4b s.t. 3a+2b <= 4, binaries -> a=1, b=0, value 5
  Model m;
  const int a = m.add_variable(0, 1, true, "a");
  const int b = m.add_variable(0, 1, true, "b");
  m.set_objective_coef(a, -5.0);
  m.set_objective_coef(b, -4.0);
  m.add_constraint({{a, 3.0}, {b, 2.0}}, Sense::LessEq, 4.0);
  Solution s = solve_milp(m);
  REQUIRE(s.status == Status::Optimal);
  CHECK(-s.objective == Catch::Approx(5.0).margin(1e-7));
  CHECK(s.values[a] == Catch::Approx(1.0));
  CHECK(s.values[b] == Catch::Approx(0.0));
}

TEST_CASE("integral relaxation returns with zero branching") {
  Model m;
  const int x = m.add_variable(0, 1, true);
  m.set_objective_coef(x, 1.0);
  m.add_constraint({{x, 1.0}}, Sense::GreaterEq, 1.0);
  Solution s = solve_milp(m);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.node_count == 1);
  CHECK(s.objective == Catch::Approx(1.0));
}

TEST_CASE("solve_milp respects the relative gap contract") {
  std::mt19937_64 rng(77);
  SolverOptions opts;
  opts.mip_gap = 0.001;
  for (int inst = 0; inst < 20; ++inst) {
    Model m = random_milp(rng, 8, 4, 6);
    Solution s = solve_milp(m, opts);
    if (s.status != Status::Optimal) continue;
    CHECK((s.objective - s.best_bound) <= opts.mip_gap * std::max(1.0, std::abs(s.objective)) + 1e-9);
    CHECK(s.best_bound <= s.objective + 1e-9);
    CHECK(m.max_violation(s.values) <= 1e-5);
  }
}

TEST_CASE("solve_milp matches exhaustive enumeration on random instances") {
  std::mt19937_64 rng(123456);
  SolverOptions opts;
  opts.mip_gap = 0.0;
  int feasible_count = 0;
  for (int inst = 0; inst < 60; ++inst) {
    const int n_bin = 2 + int(rng() % 9);
    const int n_cont = int(rng() % 5);
    const int rows = 3 + int(rng() % 6);
    Model m = random_milp(rng, n_bin, n_cont, rows);
    std::vector<int> bins;
    for (int j = 0; j < n_bin; ++j) bins.push_back(j);
    VertexOracle oracle = milp_enumeration_oracle(m, bins);
    Solution s = solve_milp(m, opts);
    INFO("instance " << inst << " bins=" << n_bin << " cont=" << n_cont);
    if (oracle.status == Status::Infeasible) {
      CHECK(s.status == Status::Infeasible);
      continue;
    }
    ++feasible_count;
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objective == Catch::Approx(oracle.objective).margin(1e-6));
  }
  CHECK(feasible_count > 15);
}

TEST_CASE("adding a constraint never improves a minimization optimum") {
  std::mt19937_64 rng(9090);
  for (int inst = 0; inst < 15; ++inst) {
    Model m = random_milp(rng, 5, 3, 4);
    Solution before = solve_milp(m);
    if (before.status != Status::Optimal) continue;
    std::vector<Term> terms;
    for (int j = 0; j < m.num_variables(); ++j)
      terms.push_back({j, double(int(rng() % 7) - 3)});
    m.add_constraint(terms, Sense::GreaterEq, -2.0);
    Solution after = solve_milp(m);
    if (after.status != Status::Optimal) continue;
    CHECK(after.objective >= before.objective - 1e-6);
  }
}

TEST_CASE("write_lp emits the standard sections") {
  Model m;
  const int x = m.add_variable(0, 4, false, "flow");
  const int u = m.add_variable(0, 1, true, "on");
  m.set_objective_coef(x, 2.5);
  m.add_constraint({{x, 1.0}, {u, -4.0}}, Sense::LessEq, 0.0);
  const std::string path = "test_model.lp";
  m.write_lp(path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
  CHECK(text.find("Binary") != std::string::npos);
  CHECK(text.find("on") != std::string::npos);
  std::remove(path.c_str());
}
