#pragma once

// Bundled reference system: 6 buses on a meshed ring, 8 thermal units, a
// 24-hour demand shape peaking mid-day, and a midday wind block at bus 4.
// Small enough for the built-in solver, rich enough that the frequency
// constraints bind on the wind-heavy hours.

#include "fcuc/grid.hpp"

namespace fcuc::desk {

inline GridModel make_grid() {
  GridModel g;
  g.s_base_mva = 100.0;
  g.f_nom_hz = 60.0;
  for (int b = 1; b <= 6; ++b) g.buses.push_back({b});
  auto line = [&](int id, int from, int to, double b_pu, double cap) {
    g.lines.push_back({id, from, to, b_pu, cap});
  };
  line(1, 1, 2, 72.0, 480.0);
  line(2, 2, 3, 64.0, 450.0);
  line(3, 3, 4, 60.0, 420.0);
  line(4, 4, 5, 64.0, 450.0);
  line(5, 5, 6, 60.0, 420.0);
  line(6, 6, 1, 72.0, 480.0);
  line(7, 2, 5, 56.0, 390.0);
  line(8, 3, 6, 52.0, 360.0);
  auto gen = [&](int id, int bus, double c, double nl, double su, double re,
                 double pmin, double pmax, double rhr, double rre, int ut, int dt,
                 double h, double s, int u0, double p0) {
    Generator x;
    x.id = id;
    x.bus = bus;
    x.cost = c;
    x.no_load_cost = nl;
    x.startup_cost = su;
    x.reserve_cost = re;
    x.p_min = pmin;
    x.p_max = pmax;
    x.ramp_hr = rhr;
    x.ramp_re = rre;
    x.min_up = ut;
    x.min_down = dt;
    x.inertia_h = h;
    x.rating_mva = s;
    x.initial_status = u0;
    x.initial_output = p0;
    g.generators.push_back(x);
  };
  //  id bus  c    nl   su   re  pmin pmax rhr  rre ut dt   H    S   u0   p0
  gen(1, 1, 13.0, 180, 900, 4.0, 90, 240, 120, 160, 4, 4, 16.0, 600, 1, 180);
  gen(2, 2, 16.0, 150, 700, 4.0, 70, 200, 110, 130, 4, 3, 15.0, 520, 1, 140);
  gen(3, 3, 24.0, 110, 500, 5.0, 45, 150, 90, 100, 3, 3, 14.0, 420, 1, 80);
  gen(4, 4, 28.0, 100, 450, 5.0, 40, 130, 85, 85, 3, 2, 13.0, 360, 0, 0);
  gen(5, 5, 36.0, 80, 300, 6.0, 25, 110, 80, 75, 2, 2, 12.0, 300, 0, 0);
  gen(6, 6, 42.0, 70, 250, 6.0, 20, 100, 75, 65, 2, 2, 11.0, 260, 0, 0);
  gen(7, 2, 48.0, 50, 150, 7.0, 12, 80, 80, 55, 1, 1, 10.0, 220, 0, 0);
  gen(8, 5, 55.0, 40, 120, 7.0, 10, 70, 70, 45, 1, 1, 9.0, 190, 0, 0);
  return g;
}

// 24-hour base profile: trough near dawn, mid-day peak, midday wind at bus 4.
inline Scenario make_base_scenario() {
  const double total[24] = {430, 405, 385, 380, 395, 430, 480, 530,
                            575, 605, 625, 640, 635, 620, 600, 575,
                            560, 570, 585, 560, 530, 495, 460, 430};
  const double wind[24] = {50, 55, 60, 65, 75, 90, 115, 150,
                           190, 225, 248, 255, 250, 235, 205, 170,
                           135, 105, 85, 70, 60, 55, 50, 50};
  const double share[6] = {0.22, 0.20, 0.16, 0.12, 0.18, 0.12};
  Scenario s = Scenario::zeros(6, 24);
  for (int t = 0; t < 24; ++t) {
    for (int b = 0; b < 6; ++b) s.demand(b, t) = share[b] * total[t];
    s.res(3, t) = wind[t];  // bus 4
  }
  return s;
}

}  // namespace fcuc::desk
