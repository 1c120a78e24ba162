#include <doctest.h>

#include <cmath>
#include <numbers>

#include "secuav/errors.hpp"
#include "secuav/planner.hpp"
#include "secuav/power_alloc.hpp"
#include "test_support.hpp"

using namespace secuav;

TEST_CASE("active slots use strict inequality") {
  CHECK(active_slots({{2, 1}, {1, 2}}) == std::vector<std::size_t>{0});
  CHECK(active_slots({{1, 1}, {1, 2}}).empty());
  CHECK(active_slots({{0.5}, {0.7}}).empty());
}

TEST_CASE("stationary power solves the per-slot optimality condition") {
  for (int i = 0; i < 500; ++i) {
    const double b = testing::uniform(1e-5, 1e-2);
    const double a = b * testing::uniform(1.01, 50.0);
    const double nu = testing::uniform(1e-6, 1e-2);
    const double p = stationary_power(a, b, nu);
    if (p > 0.0) {
      const double lhs = a / (1 + a * p) - b / (1 + b * p);
      CHECK(lhs == doctest::Approx(nu * std::numbers::ln2).epsilon(1e-9));
    } else {
      CHECK((a - b) <= nu * std::numbers::ln2 * (1 + 1e-12));
    }
  }
  // b = 0 reduces to water filling.
  CHECK(stationary_power(0.01, 0.0, 1e-3) == doctest::Approx(1.0 / (1e-3 * std::numbers::ln2) - 100.0));
}

TEST_CASE("inactive everywhere gives silence") {
  const auto p = kkt_power({{1, 2, 3}, {1, 2, 4}}, 1000, 4000);
  CHECK(p.p == std::vector<double>{0, 0, 0});
  CHECK(p.mean() == 0.0);
}

TEST_CASE("single slot saturates the budget") {
  const auto p = kkt_power({{2}, {1}}, 1000, 1000);
  CHECK(p.p[0] == 1000.0);
}

TEST_CASE("two slots match the grid reference") {
  const SlotGains g{{10e-3, 2e-3}, {1e-3, 1e-3}};
  const auto p = kkt_power(g, 1000, 4000);
  const double reference = 3.1044880750358566;  // 2001x2001 grid optimum at (1350, 650)
  const double obj = power_objective(g, p.p);
  CHECK(obj >= reference - 1e-4);
  CHECK(obj - reference <= 1e-3);
  CHECK(p.p[0] == doctest::Approx(1350.0).epsilon(5e-3));
  CHECK(p.p[1] == doctest::Approx(650.0).epsilon(1e-2));
}

TEST_CASE("KKT conditions hold on random instances") {
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 9);
    SlotGains g;
    for (std::size_t i = 0; i < n; ++i) {
      const double b = testing::uniform(1e-4, 5e-3);
      g.b.push_back(b);
      g.a.push_back(b * testing::uniform(0.5, 20.0));
    }
    const double p_ave = testing::uniform(100, 1500);
    const double p_peak = p_ave * testing::uniform(1.0, 6.0);
    KktDiagnostics diag;
    const auto p = kkt_power(g, p_ave, p_peak, diag);
    CHECK(p.mean() <= p_ave * (1 + 1e-12));
    double uniform_obj = 0.0;
    const auto active = active_slots(g);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(p.p[i] >= 0.0);
      CHECK(p.p[i] <= p_peak);
      const double term = log2_1p(g.a[i] * p.p[i]) - log2_1p(g.b[i] * p.p[i]);
      CHECK(term >= 0.0);
      if (g.a[i] <= g.b[i]) CHECK(p.p[i] == 0.0);
      // Stationarity for interior active slots.
      if (p.p[i] > 0.0 && p.p[i] < p_peak && diag.nu > 0.0) {
        const double lhs = (g.a[i] / (1 + g.a[i] * p.p[i]) - g.b[i] / (1 + g.b[i] * p.p[i])) / std::numbers::ln2;
        CHECK(std::abs(lhs - diag.nu) <= 1e-6);
      }
      if (g.a[i] > g.b[i]) uniform_obj += log2_1p(g.a[i] * p_ave) - log2_1p(g.b[i] * p_ave);
    }
    // Uniform power on the active slots only is feasible.
    if (!active.empty()) CHECK(power_objective(g, p.p) >= uniform_obj - 1e-9);
    // Complementary slackness: a positive multiplier means the budget binds.
    if (diag.nu > 0.0) CHECK(std::abs(p.mean() - p_ave) <= 1e-8 * p_ave * 10);
    // Determinism.
    CHECK(kkt_power(g, p_ave, p_peak).p == p.p);
  }
}

TEST_CASE("budget validation") {
  CHECK_THROWS_AS(kkt_power({{2}, {1}}, 2000, 1000), ValidationError);
}

TEST_CASE("slot gains along the fly-hover-fly path") {
  const Scenario s = default_scenario();
  const Trajectory t = fly_hover_fly_init(s);
  const auto nc = slot_gains(s, t, ColludeMode::NonColluding);
  const auto c = slot_gains(s, t, ColludeMode::Colluding);
  std::size_t peak = 0;
  std::size_t nearest = 0;
  double best_d = 1e300;
  for (std::size_t n = 0; n < s.n_slots; ++n) {
    CHECK(c.b[n] >= nc.b[n]);
    CHECK(c.a[n] == nc.a[n]);
    if (nc.b[n] > nc.b[peak]) peak = n;
    for (const auto& w : s.eav_positions) {
      const double d = std::hypot(distance(t.q[n + 1], w), t.z[n + 1]);
      if (d < best_d) {
        best_d = d;
        nearest = n;
      }
    }
  }
  CHECK(peak == nearest);

  Scenario one = s;
  one.eav_positions = {{0, 180}};
  const auto a = slot_gains(one, t, ColludeMode::NonColluding);
  const auto b = slot_gains(one, t, ColludeMode::Colluding);
  CHECK(a.b == b.b);
}
