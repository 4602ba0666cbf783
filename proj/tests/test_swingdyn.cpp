#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fcuc/swingdyn.hpp"

using namespace fcuc;

namespace {

GridModel two_bus_grid(double b = 5.0) {
  GridModel g;
  g.buses = {{1}, {2}};
  g.lines = {{1, 1, 2, b, 300.0}};
  Generator g1;
  g1.id = 1; g1.bus = 1; g1.p_max = 200; g1.inertia_h = 4.0; g1.rating_mva = 100;
  Generator g2 = g1;
  g2.id = 2; g2.bus = 2;
  g.generators = {g1, g2};
  return g;
}

GridModel chain3_grid() {
  // gen - load - gen chain, unit susceptances
  GridModel g;
  g.buses = {{1}, {2}, {3}};
  g.lines = {{1, 1, 2, 1.0, 300.0}, {2, 2, 3, 1.0, 300.0}};
  Generator g1;
  g1.id = 1; g1.bus = 1; g1.p_max = 100; g1.inertia_h = 5.0; g1.rating_mva = 100;
  Generator g2 = g1;
  g2.id = 2; g2.bus = 3;
  g.generators = {g1, g2};
  return g;
}

}  // namespace

TEST_CASE("build_laplacian evaluates the definition") {
  GridModel g = two_bus_grid(5.0);
  Eigen::MatrixXd L = build_laplacian(g);
  CHECK(L(0, 0) == Catch::Approx(5.0));
  CHECK(L(0, 1) == Catch::Approx(-5.0));
  CHECK(L(1, 0) == Catch::Approx(-5.0));
  CHECK(L(1, 1) == Catch::Approx(5.0));
}

TEST_CASE("laplacian rows sum to zero and scale with voltage") {
  GridModel g = chain3_grid();
  Eigen::MatrixXd L = build_laplacian(g);
  for (int i = 0; i < 3; ++i) CHECK(L.row(i).sum() == Catch::Approx(0.0).margin(1e-12));
  g.voltage_pu = 1.0;
  Eigen::MatrixXd L2 = build_laplacian(g);
  CHECK((L - L2).norm() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("build_laplacian rejects a disconnected network") {
  GridModel g = two_bus_grid();
  g.buses.push_back({3});
  CHECK_THROWS_WITH(build_laplacian(g), Catch::Matchers::ContainsSubstring("connected"));
}

TEST_CASE("kron_reduce matches the hand Schur complement on the 3-bus chain") {
  GridModel g = chain3_grid();
  Eigen::MatrixXd L = build_laplacian(g);
  KronResult kr = kron_reduce(L, {0, 2});
  CHECK(kr.laplacian(0, 0) == Catch::Approx(0.5));
  CHECK(kr.laplacian(0, 1) == Catch::Approx(-0.5));
  CHECK(kr.laplacian(1, 0) == Catch::Approx(-0.5));
  CHECK(kr.laplacian(1, 1) == Catch::Approx(0.5));
}

TEST_CASE("kron_reduce with no eliminated buses returns the input") {
  GridModel g = two_bus_grid();
  Eigen::MatrixXd L = build_laplacian(g);
  KronResult kr = kron_reduce(L, {0, 1});
  CHECK((kr.laplacian - L).norm() == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("reduced laplacian is symmetric PSD with one near-zero eigenvalue") {
  // ring of 6 buses, gens on three of them
  GridModel g;
  for (int b = 1; b <= 6; ++b) g.buses.push_back({b});
  for (int l = 0; l < 6; ++l)
    g.lines.push_back({l + 1, l + 1, (l + 1) % 6 + 1, 2.0 + l, 300.0});
  for (int k : {1, 3, 5}) {
    Generator gen;
    gen.id = k; gen.bus = k; gen.p_max = 100; gen.inertia_h = 4; gen.rating_mva = 100;
    g.generators.push_back(gen);
  }
  ReducedNetwork rn = build_reduced_network(g, {1, 1, 1});
  const Eigen::MatrixXd& L = rn.laplacian;
  CHECK((L - L.transpose()).norm() <= 1e-9);
  for (int i = 0; i < L.rows(); ++i) CHECK(L.row(i).sum() == Catch::Approx(0.0).margin(1e-9));
  int near_zero = 0;
  for (int i = 0; i < rn.eigenvalues.size(); ++i) {
    CHECK(rn.eigenvalues(i) >= -1e-9);
    if (std::abs(rn.eigenvalues(i)) < 1e-8) ++near_zero;
  }
  CHECK(near_zero == 1);
}

TEST_CASE("aggregate_inertia evaluates the kinetic-energy sum") {
  GridModel g = two_bus_grid();
  g.generators[0].inertia_h = 5.0;
  g.generators[0].rating_mva = 100.0;
  SECTION("one committed unit") {
    InertiaAggregate agg = aggregate_inertia(g, {1, 0});
    CHECK(agg.kinetic_mw_s == Catch::Approx(1000.0));
    CHECK(agg.per_bus_m_s[0] == Catch::Approx(10.0));
    CHECK(agg.per_bus_m_s[1] == Catch::Approx(0.0));
  }
  SECTION("all units off") {
    InertiaAggregate agg = aggregate_inertia(g, {0, 0});
    CHECK(agg.kinetic_mw_s == Catch::Approx(0.0));
  }
  SECTION("two identical units on one bus double the bus inertia") {
    GridModel g2 = two_bus_grid();
    g2.generators[1].bus = 1;
    InertiaAggregate one = aggregate_inertia(g2, {1, 0});
    InertiaAggregate two = aggregate_inertia(g2, {1, 1});
    CHECK(two.per_bus_m_s[0] == Catch::Approx(2.0 * one.per_bus_m_s[0]));
  }
}

TEST_CASE("uniform_rocof evaluates the equivalent-model rate") {
  CHECK(uniform_rocof(100.0, 2000.0, 60.0) == Catch::Approx(3.0));
  CHECK(uniform_rocof(0.0, 2000.0, 60.0) == Catch::Approx(0.0));
  CHECK(uniform_rocof(100.0, 4000.0, 60.0) == Catch::Approx(1.5));
  CHECK_THROWS_AS(uniform_rocof(100.0, 0.0, 60.0), std::invalid_argument);
}

TEST_CASE("no trip yields an identically flat trace") {
  GridModel g = two_bus_grid();
  DynamicsParams p;
  p.horizon_s = 2.0;
  FrequencyTrace tr = simulate_outage(g, {50.0, 50.0}, {1, 1}, -1, p);
  for (const auto& series : tr.delta_f_hz)
    for (double v : series) CHECK(v == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("single-machine response matches the first-order closed form") {
  // M = 10 s, gamma = 0.1 (so D = 1 pu), step loss of 1 pu
  const double M = 10.0, gamma = 0.1, dp = 1.0, fnom = 60.0;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(1, 1);
  Eigen::VectorXd m(1), P(1);
  m << M;
  P << -dp;
  DynamicsParams p;
  p.horizon_s = 10.0;
  p.gamma_damp = gamma;
  FrequencyTrace tr = simulate_swing(L, m, P, gamma, fnom, p);
  const double D = gamma * M;
  double max_err_pu = 0.0;
  for (size_t s = 0; s < tr.time_s.size(); ++s) {
    const double t = tr.time_s[s];
    const double exact_pu = -(dp / D) * (1.0 - std::exp(-D * t / M));
    const double got_pu = tr.delta_f_hz[0][s] / fnom;
    max_err_pu = std::max(max_err_pu, std::abs(got_pu - exact_pu));
  }
  CHECK(max_err_pu < 1e-4);
  // initial decline rate: dP * f_nom / M = 6 Hz/s
  const double r0 = std::abs(tr.delta_f_hz[0][1] - tr.delta_f_hz[0][0]) / p.step_s;
  CHECK(r0 == Catch::Approx(6.0).margin(0.01));
}

TEST_CASE("symmetric two-machine system responds identically at both buses") {
  Eigen::MatrixXd L(2, 2);
  L << 3.0, -3.0, -3.0, 3.0;
  Eigen::VectorXd m(2), P(2);
  m << 8.0, 8.0;
  P << -0.5, -0.5;
  DynamicsParams p;
  p.horizon_s = 5.0;
  p.gamma_damp = 0.2;
  FrequencyTrace tr = simulate_swing(L, m, P, p.gamma_damp, 60.0, p);
  for (size_t s = 0; s < tr.time_s.size(); ++s)
    CHECK(tr.delta_f_hz[0][s] == Catch::Approx(tr.delta_f_hz[1][s]).margin(1e-10));
}

TEST_CASE("undamped balanced disturbance conserves the center of inertia") {
  Eigen::MatrixXd L(2, 2);
  L << 4.0, -4.0, -4.0, 4.0;
  Eigen::VectorXd m(2), P(2);
  m << 6.0, 10.0;
  P << 1.0, -1.0;  // zero net imbalance
  DynamicsParams p;
  p.horizon_s = 5.0;
  p.gamma_damp = 0.0;
  FrequencyTrace tr = simulate_swing(L, m, P, 0.0, 60.0, p);
  const double msum = m.sum();
  for (size_t s = 0; s < tr.time_s.size(); ++s) {
    const double coi_pu =
        (m(0) * tr.delta_f_hz[0][s] + m(1) * tr.delta_f_hz[1][s]) / (60.0 * msum);
    CHECK(std::abs(coi_pu) < 1e-6);
  }
}

TEST_CASE("halving the integration step leaves the nadir unchanged") {
  GridModel g = chain3_grid();
  DynamicsParams p;
  p.horizon_s = 5.0;
  p.gamma_damp = 0.3;
  FrequencyTrace a = simulate_outage(g, {60.0, 40.0}, {1, 1}, 1, p);
  p.step_s = 0.0005;
  FrequencyTrace b = simulate_outage(g, {60.0, 40.0}, {1, 1}, 1, p);
  const double fa = measure_metrics(a, 0.1).delta_f_max_hz;
  const double fb = measure_metrics(b, 0.1).delta_f_max_hz;
  CHECK(std::abs(fa - fb) < 1e-5);
}

TEST_CASE("measure_metrics handles the spec edge cases") {
  SECTION("constant trace measures zero") {
    FrequencyTrace tr;
    tr.bus_ids = {1};
    for (int s = 0; s <= 100; ++s) tr.time_s.push_back(0.01 * s);
    tr.delta_f_hz.assign(1, std::vector<double>(101, 0.25));
    FrequencyMetrics mm = measure_metrics(tr, 0.1);
    CHECK(mm.rocof_max_hz_s == Catch::Approx(0.0));
    CHECK(mm.delta_f_max_hz == Catch::Approx(0.25));
  }
  SECTION("linear ramp of -0.5 Hz/s over one second") {
    FrequencyTrace tr;
    tr.bus_ids = {1};
    for (int s = 0; s <= 100; ++s) {
      tr.time_s.push_back(0.01 * s);
      ;
    }
    tr.delta_f_hz.assign(1, {});
    for (int s = 0; s <= 100; ++s) tr.delta_f_hz[0].push_back(-0.5 * 0.01 * s);
    FrequencyMetrics mm = measure_metrics(tr, 0.1);
    CHECK(mm.rocof_max_hz_s == Catch::Approx(0.5).margin(1e-9));
    CHECK(mm.delta_f_max_hz == Catch::Approx(0.5).margin(1e-9));
  }
  SECTION("window longer than the horizon is an error") {
    FrequencyTrace tr;
    tr.bus_ids = {1};
    for (int s = 0; s <= 10; ++s) tr.time_s.push_back(0.01 * s);
    tr.delta_f_hz.assign(1, std::vector<double>(11, 0.0));
    CHECK_THROWS_AS(measure_metrics(tr, 1.0), std::invalid_argument);
  }
  SECTION("appending settled samples does not change the metrics") {
    FrequencyTrace tr;
    tr.bus_ids = {1};
    for (int s = 0; s <= 200; ++s) tr.time_s.push_back(0.01 * s);
    tr.delta_f_hz.assign(1, {});
    for (int s = 0; s <= 200; ++s)
      tr.delta_f_hz[0].push_back(-0.4 * (1.0 - std::exp(-0.05 * s)));
    FrequencyMetrics before = measure_metrics(tr, 0.1);
    FrequencyTrace padded = tr;
    const double last = padded.delta_f_hz[0].back();
    for (int s = 1; s <= 50; ++s) {
      padded.time_s.push_back(2.0 + 0.01 * s);
      padded.delta_f_hz[0].push_back(last);
    }
    FrequencyMetrics after = measure_metrics(padded, 0.1);
    CHECK(after.delta_f_max_hz == Catch::Approx(before.delta_f_max_hz));
    CHECK(after.rocof_max_hz_s == Catch::Approx(before.rocof_max_hz_s));
  }
}

TEST_CASE("analytic_rocof agrees with the ODE oracle") {
  SECTION("zero disturbance gives zeros") {
    GridModel g = two_bus_grid();
    ReducedNetwork rn = build_reduced_network(g, {1, 1});
    DynamicsParams p;
    auto r = analytic_rocof(rn, 0, 0.0, g.f_nom_hz, p);
    for (double v : r) CHECK(v == Catch::Approx(0.0));
  }
  SECTION("two-machine symmetric case within 2% of simulation") {
    GridModel g = two_bus_grid(2.0);
    ReducedNetwork rn = build_reduced_network(g, {1, 1});
    DynamicsParams p;
    p.gamma_damp = 0.2;
    p.horizon_s = 2.0;
    const double dp_pu = 0.8;
    auto analytic = analytic_rocof(rn, 0, dp_pu, g.f_nom_hz, p);
    Eigen::VectorXd P = Eigen::VectorXd::Zero(2);
    P(0) = -dp_pu;
    FrequencyTrace tr =
        simulate_swing(rn.laplacian, rn.inertia_s, P, p.gamma_damp, g.f_nom_hz, p);
    for (int i = 0; i < 2; ++i) {
      const double sim = std::abs(tr.rocof_hz_s[i][0]);
      INFO("bus " << i << " analytic=" << analytic[i] << " sim=" << sim);
      CHECK(std::abs(analytic[i] - sim) <= 0.02 * std::max(sim, 1e-9));
    }
  }
  SECTION("window shrinking to the step recovers the uniform rate") {
    GridModel g;
    g.buses = {{1}};
    Generator gen;
    gen.id = 1; gen.bus = 1; gen.p_max = 100; gen.inertia_h = 5; gen.rating_mva = 200;
    g.generators = {gen};
    ReducedNetwork rn = build_reduced_network(g, {1});
    DynamicsParams p;
    p.rocof_window_s = 0.001;
    p.gamma_damp = 0.1;
    const double dp_pu = 1.0;
    auto r = analytic_rocof(rn, 0, dp_pu, g.f_nom_hz, p);
    const double expect = uniform_rocof(dp_pu * g.s_base_mva,
                                        2.0 * gen.inertia_h * gen.rating_mva, g.f_nom_hz);
    CHECK(r[0] == Catch::Approx(expect).epsilon(0.001));
  }
  SECTION("overdamped modes are rejected") {
    GridModel g = two_bus_grid(0.001);
    ReducedNetwork rn = build_reduced_network(g, {1, 1});
    DynamicsParams p;
    p.gamma_damp = 50.0;
    CHECK_THROWS_WITH(analytic_rocof(rn, 0, 1.0, g.f_nom_hz, p),
                      Catch::Matchers::ContainsSubstring("overdamped"));
  }
}

TEST_CASE("trace csv export uses the documented header") {
  GridModel g = two_bus_grid();
  DynamicsParams p;
  p.horizon_s = 0.5;
  FrequencyTrace tr = simulate_outage(g, {80.0, 20.0}, {1, 1}, 1, p);
  const std::string path = "trace_test.csv";
  save_trace(tr, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t_s,bus,delta_f_hz,rocof_hz_s");
  std::remove(path.c_str());
}
