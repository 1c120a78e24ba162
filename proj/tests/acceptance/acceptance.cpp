// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "secuav/placement.hpp"
#include "secuav/planner.hpp"
#include "secuav/power_alloc.hpp"
#include "secuav/traj_sca.hpp"

using namespace secuav;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::mt19937_64 rng(7);

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr ColludeMode kModes[] = {ColludeMode::NonColluding, ColludeMode::Colluding};

// ---------------------------------------------------------------------------
// 1. KKT power against a brute-force grid.

// Maximizes Σ_n [log2(1+a p) − log2(1+b p)] over the grid p_n ∈ step·ℕ,
// p_n ≤ p_peak, Σ p_n ≤ N p_ave. The last slot takes the largest affordable
// grid value (each term is non-decreasing on active slots, zero otherwise).
double grid_optimum(const SlotGains& g, double p_ave, double p_peak, double step) {
  const std::size_t n = g.a.size();
  const auto budget_units = static_cast<long>(std::llround(static_cast<double>(n) * p_ave / step));
  const auto peak_units = static_cast<long>(std::llround(p_peak / step));
  const long max_units = std::min(budget_units, peak_units);
  std::vector<std::vector<double>> table(n, std::vector<double>(static_cast<std::size_t>(max_units) + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (long u = 0; u <= max_units; ++u) {
      const double p = static_cast<double>(u) * step;
      table[i][static_cast<std::size_t>(u)] = log2_1p(g.a[i] * p) - log2_1p(g.b[i] * p);
    }
  }
  auto last = [&](long remaining) {
    const long u = std::min(remaining, max_units);
    return g.a[n - 1] > g.b[n - 1] ? table[n - 1][static_cast<std::size_t>(u)] : 0.0;
  };
  double best = -std::numeric_limits<double>::infinity();
  if (n == 2) {
    for (long u0 = 0; u0 <= max_units; ++u0) {
      best = std::max(best, table[0][static_cast<std::size_t>(u0)] + last(budget_units - u0));
    }
  } else {
    for (long u0 = 0; u0 <= max_units; ++u0) {
      for (long u1 = 0; u1 <= max_units && u0 + u1 <= budget_units; ++u1) {
        best = std::max(best, table[0][static_cast<std::size_t>(u0)] + table[1][static_cast<std::size_t>(u1)] +
                                  last(budget_units - u0 - u1));
      }
    }
  }
  return best;
}

Outcome power_oracle() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = trial < 50 ? 2 : 3;
    SlotGains g;
    for (std::size_t i = 0; i < n; ++i) {
      const double b = uniform(1e-4, 5e-3);
      g.b.push_back(b);
      g.a.push_back(b * uniform(0.5, 12.0));
    }
    const double p_ave = 1000.0;
    const double step = p_ave / 1000.0;
    const double p_peak = std::round(uniform(1.0, 4.0) * p_ave);
    const double kkt = power_objective(g, kkt_power(g, p_ave, p_peak).p);
    const double grid = grid_optimum(g, p_ave, p_peak, step);
    worst = std::max(worst, std::abs(kkt - grid));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && secs < 60.0,
          fmt("50 two-slot + 50 three-slot instances, max |gap| %.2e bps/Hz, %.1f s", worst, secs)};
}

// ---------------------------------------------------------------------------
// 2. Altitude search against a 0.01 m grid.

Outcome altitude_oracle() {
  const auto t0 = Clock::now();
  // The default band only ever has optima at its ends; a wide band at low
  // power has interior optima over much of the region.
  Scenario wide = default_scenario();
  wide.z_min = 20.0;
  wide.z_max = 600.0;
  wide.p_static = 1.0;
  double worst_z = 0.0;
  double worst_rate = 0.0;
  int interior = 0;
  for (const Scenario& s : {default_scenario(), wide}) {
    const Region r = default_region(s);
    const auto steps = static_cast<int>(std::lround((s.z_max - s.z_min) / 0.01));
    for (int i = 0; i < 100; ++i) {
      const Vec2 q{uniform(r.x_min, r.x_max), uniform(r.y_min, r.y_max)};
      for (auto mode : kModes) {
        const double z = altitude_opt(s, q, mode);
        double best_z = s.z_min;
        double best = -std::numeric_limits<double>::infinity();
        for (int k = 0; k <= steps; ++k) {
          const double zz = s.z_min + 0.01 * k;
          const double v = secrecy_rate(s, q, zz, s.p_static, mode, Clamp::None);
          if (v > best) {
            best = v;
            best_z = zz;
          }
        }
        if (best_z > s.z_min && best_z < s.z_max) ++interior;
        worst_z = std::max(worst_z, std::abs(z - best_z));
        worst_rate = std::max(worst_rate, std::abs(secrecy_rate(s, q, z, s.p_static, mode, Clamp::None) - best));
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst_z <= 0.05 && worst_rate <= 1e-6 && secs < 30.0,
          fmt("2 bands x 100 points x 2 modes (%d interior optima), max |dz| %.3f m, max |drate| %.2e, %.1f s",
              interior, worst_z, worst_rate, secs)};
}

// ---------------------------------------------------------------------------
// 3. Under-estimator audits.

Outcome underestimators() {
  const Scenario s = default_scenario();
  const Region r = default_region(s);
  auto random_q = [&] { return Vec2{uniform(r.x_min, r.x_max), uniform(r.y_min, r.y_max)}; };
  auto random_z = [&] { return uniform(s.z_min, s.z_max); };
  int dist_violations = 0;
  int rate_violations = 0;
  double worst_tight = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec2 w = s.eav_positions[static_cast<std::size_t>(i) % s.num_eavs()];
    const Vec2 q0 = random_q();
    const double z0 = random_z();
    const auto lb = eav_dist_lb(q0, z0, w, s.alpha);
    const Vec2 q = random_q();
    const double z = random_z();
    if (lb(q, z) > distance_pow(q, z, w, s.alpha)) ++dist_violations;
    worst_tight = std::max(worst_tight, std::abs(lb(q0, z0) / distance_pow(q0, z0, w, s.alpha) - 1.0));
  }
  for (int i = 0; i < 10000; ++i) {
    // Expansion at one point, evaluation at another feasible proxy point.
    const Vec2 q0 = random_q();
    const double z0 = random_z();
    const Vec2 q = random_q();
    const double z = random_z();
    std::vector<double> zeta_exp;
    std::vector<double> zeta;
    std::vector<double> eta;
    for (const auto& w : s.gr_positions) {
      zeta_exp.push_back(distance_pow(q0, z0, w, s.alpha));
      zeta.push_back(distance_pow(q, z, w, s.alpha) * uniform(1.0, 1.5));
    }
    for (const auto& w : s.eav_positions) {
      const double e = std::max(eav_dist_lb(q0, z0, w, s.alpha)(q, z), std::pow(s.z_min, s.alpha));
      eta.push_back(e * uniform(0.5, 1.0));
    }
    const double p = uniform(0.0, s.p_peak);
    const double g0 = s.gain_ref();
    const std::optional<std::size_t> which[] = {std::optional<std::size_t>{0}, std::optional<std::size_t>{1},
                                                std::nullopt};
    for (const auto& j : which) {
      if (rate_lb_value(g0, p, zeta, zeta_exp, eta, j) > proxy_rate(g0, p, zeta, eta, j)) ++rate_violations;
      const double tight = proxy_rate(g0, p, zeta_exp, eta, j);
      const double at = rate_lb_value(g0, p, zeta_exp, zeta_exp, eta, j);
      worst_tight = std::max(worst_tight, std::abs(at - tight) / std::max(1.0, std::abs(tight)));
    }
  }
  return {dist_violations == 0 && rate_violations == 0 && worst_tight <= 1e-9,
          fmt("violations: distance %d/10000, rate %d/30000; max tightness error %.1e", dist_violations,
              rate_violations, worst_tight)};
}

// ---------------------------------------------------------------------------
// 4. Analytic derivatives against central differences.

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3}); }

Outcome gradients() {
  const Scenario s = default_scenario();
  const Region r = default_region(s);
  double worst_alt = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec2 q{uniform(r.x_min, r.x_max), uniform(r.y_min, r.y_max)};
    const double z = uniform(s.z_min + 1.0, s.z_max - 1.0);
    for (auto mode : kModes) {
      const double h = 1e-4;
      const double fd = (secrecy_rate(s, q, z + h, s.p_static, mode, Clamp::None) -
                         secrecy_rate(s, q, z - h, s.p_static, mode, Clamp::None)) /
                        (2 * h);
      const double an = rate_altitude_derivative(s, q, z, s.p_static, mode);
      worst_alt = std::max(worst_alt, std::abs(fd - an) / std::max(std::abs(an), 1e-6));
    }
  }

  Scenario sm = default_scenario();
  sm.t_s = 2.5;
  sm = sm.with_slots(20);
  const Trajectory t = fly_hover_fly_init(sm);
  std::vector<Subproblem> subs;
  for (auto mode : kModes) {
    for (bool fixed : {false, true}) {
      SubproblemOptions o;
      o.fixed_altitude = fixed;
      subs.push_back(build_subproblem(sm, t, kkt_power(slot_gains(sm, t, mode), sm.p_ave, sm.p_peak), mode, o));
    }
  }
  double worst_oracle = 0.0;
  long checked = 0;
  for (int i = 0; i < 100; ++i) {
    const auto& prog = subs[static_cast<std::size_t>(i) % subs.size()].program;
    std::vector<double> x = prog.x0;
    std::vector<double> dir(prog.dim);
    for (auto& d : dir) d = uniform(-1.0, 1.0);
    for (double a = 1.0; a > 1e-9; a *= 0.5) {
      std::vector<double> y = prog.x0;
      for (std::size_t k = 0; k < prog.dim; ++k) y[k] += a * dir[k] * std::max(1e-3, 1e-2 * std::abs(y[k]));
      if (strictly_feasible(prog, y)) {
        x = y;
        break;
      }
    }
    auto check = [&](const Term& term) {
      std::vector<double> loc(term.support.size());
      for (std::size_t k = 0; k < loc.size(); ++k) loc[k] = x[term.support[k]];
      TermEval ev;
      term.eval(loc, EvalNeeds::Gradient, ev);
      for (std::size_t k = 0; k < loc.size(); ++k) {
        const double h = 1e-5 * std::max(1.0, std::abs(loc[k]));
        auto plus = loc;
        auto minus = loc;
        plus[k] += h;
        minus[k] -= h;
        TermEval ep;
        TermEval em;
        term.eval(plus, EvalNeeds::Value, ep);
        term.eval(minus, EvalNeeds::Value, em);
        worst_oracle = std::max(worst_oracle, rel_err((ep.value - em.value) / (2 * h), ev.grad[k]));
        ++checked;
      }
    };
    for (const auto& term : prog.objective) check(term);
    for (const auto& term : prog.constraints) check(term);
  }
  return {worst_alt <= 1e-4 && worst_oracle <= 1e-4,
          fmt("altitude derivative max rel err %.1e; %ld oracle partials at 100 points, max rel err %.1e", worst_alt,
              checked, worst_oracle)};
}

// ---------------------------------------------------------------------------
// 5-8 share the planned results.

struct Plans {
  std::vector<PlanResult> short_runs;  // N = 20
  std::vector<PlanResult> full_runs;   // N = 100, all schemes and modes
  double short_seconds = 0.0;
};

const PlanResult& find(const std::vector<PlanResult>& v, Scheme sc, ColludeMode mode) {
  for (const auto& r : v) {
    if (r.scheme == sc && r.mode == mode) return r;
  }
  throw std::runtime_error("missing plan");
}

Outcome monotone(const Plans& plans) {
  double worst = 0.0;
  int sca_steps = 0;
  for (const auto& r : plans.short_runs) {
    for (std::size_t i = 1; i < r.outer_history.size(); ++i) {
      worst = std::max(worst, r.outer_history[i - 1] - r.outer_history[i]);
    }
    for (const auto& h : r.sca_histories) {
      for (std::size_t i = 1; i < h.size(); ++i) {
        worst = std::max(worst, h[i - 1] - h[i]);
        ++sca_steps;
      }
    }
  }
  return {worst <= 1e-6 && plans.short_seconds < 300.0,
          fmt("N=20, full3d+2d, both modes: %d SCA steps, largest decrease %.1e, %.1f s", sca_steps, worst,
              plans.short_seconds)};
}

Outcome dominance(const Plans& plans) {
  bool ok = true;
  std::string detail;
  for (auto mode : kModes) {
    const double f3 = find(plans.full_runs, Scheme::Full3D, mode).avg_rate;
    const double f2 = find(plans.full_runs, Scheme::FixedAlt2D, mode).avg_rate;
    const double fa = find(plans.full_runs, Scheme::FhfAdaptive, mode).avg_rate;
    const double fc = find(plans.full_runs, Scheme::FhfConstant, mode).avg_rate;
    ok = ok && f3 >= f2 - 1e-6 && f2 >= fa - 1e-6 && fa >= fc - 1e-6;
    detail += fmt("%s %.4f>=%.4f>=%.4f>=%.4f; ", to_string(mode), f3, f2, fa, fc);
  }
  for (Scheme sc : kAllSchemes) {
    ok = ok && find(plans.full_runs, sc, ColludeMode::NonColluding).avg_rate >=
                   find(plans.full_runs, sc, ColludeMode::Colluding).avg_rate - 1e-6;
  }
  return {ok, detail + "noncolluding >= colluding per scheme"};
}

Outcome quasi_stationary() {
  const Scenario s = default_scenario();
  const Region region = default_region(s);
  std::string detail;
  bool ok = true;
  int zero_near_eav[2] = {0, 0};
  int zero_total[2] = {0, 0};
  for (int m = 0; m < 2; ++m) {
    const auto field = field_map(s, kModes[m], region, 5.0);
    int gr_nearest = 0;
    int above_min = 0;
    for (const auto& f : field) {
      double dg = std::numeric_limits<double>::infinity();
      double de = std::numeric_limits<double>::infinity();
      for (const auto& w : s.gr_positions) dg = std::min(dg, distance(f.q, w));
      for (const auto& w : s.eav_positions) de = std::min(de, distance(f.q, w));
      if (dg <= de) {
        ++gr_nearest;
        if (f.z_star != s.z_min) ++above_min;
      }
      if (f.p_star == 0.0) {
        ++zero_total[m];
        if (de < dg) ++zero_near_eav[m];
      }
    }
    ok = ok && above_min == 0;
    detail += fmt("%s: %d/%d receiver-nearest points above z_min, %d zero-power; ", to_string(kModes[m]), above_min,
                  gr_nearest, zero_total[m]);
  }
  ok = ok && zero_near_eav[1] > 0 && zero_total[0] == 0;
  detail += fmt("colluding zero-power points nearest an eavesdropper: %d", zero_near_eav[1]);
  return {ok, detail};
}

double nearest_eav(const Scenario& s, const Trajectory& t, std::size_t i) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& w : s.eav_positions) d = std::min(d, std::hypot(distance(t.q[i], w), t.z[i]));
  return d;
}

Outcome zero_power(const Plans& plans) {
  const Scenario s = default_scenario();
  int inconsistent = 0;
  auto scan = [&](const std::vector<PlanResult>& v) {
    for (const auto& r : v) {
      for (std::size_t n = 0; n < r.power.p.size(); ++n) {
        if (r.power.p[n] == 0.0 && r.per_slot_rate[n] != 0.0) ++inconsistent;
      }
    }
  };
  scan(plans.short_runs);
  scan(plans.full_runs);

  // Colluding: a silent slot within 10% of the closest approach to an eavesdropper.
  const auto& c = find(plans.full_runs, Scheme::Full3D, ColludeMode::Colluding);
  double d_min = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= s.n_slots; ++n) d_min = std::min(d_min, nearest_eav(s, c.trajectory, n));
  int silent_near = 0;
  int silent = 0;
  for (std::size_t n = 1; n <= s.n_slots; ++n) {
    if (c.power.p[n - 1] != 0.0) continue;
    ++silent;
    if (nearest_eav(s, c.trajectory, n) <= 1.1 * d_min) ++silent_near;
  }
  const auto& nc = find(plans.full_runs, Scheme::Full3D, ColludeMode::NonColluding);
  const auto nc_silent = std::count(nc.power.p.begin(), nc.power.p.end(), 0.0);
  return {inconsistent == 0 && silent_near > 0 && nc_silent == 0,
          fmt("p=0 with rate>0: %d; colluding silent slots %d (%d near closest approach %.1f m); "
              "noncolluding silent slots %ld",
              inconsistent, silent, silent_near, d_min, static_cast<long>(nc_silent))};
}

}  // namespace

// --expect-fail K[,K...] names criteria known to fail; the exit status is
// zero only when exactly those fail. Their FAIL lines are still printed.
int main(int argc, char** argv) {
  std::set<int> expected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expect-fail" && i + 1 < argc) {
      std::string list = argv[++i];
      for (std::size_t pos = 0; pos < list.size();) {
        const std::size_t end = std::min(list.find(',', pos), list.size());
        expected.insert(std::stoi(list.substr(pos, end - pos)));
        pos = end + 1;
      }
    } else {
      std::fprintf(stderr, "usage: acceptance [--expect-fail K[,K...]]\n");
      return 2;
    }
  }
  std::set<int> failed;
  const auto t0 = Clock::now();
  std::vector<std::pair<std::string, std::function<Outcome()>>> early = {
      {"power oracle equivalence", power_oracle},
      {"altitude oracle equivalence", altitude_oracle},
      {"under-estimator audits", underestimators},
      {"gradient checks", gradients},
  };
  int failures = 0;
  int index = 0;
  auto report = [&](const std::string& name, const Outcome& o) {
    ++index;
    if (!o.pass) {
      ++failures;
      failed.insert(index);
    }
    std::printf("[%s] %d. %s: %s\n", o.pass ? "PASS" : "FAIL", index, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  };
  for (const auto& [name, fn] : early) report(name, fn());

  Plans plans;
  Scenario sm = default_scenario();
  sm.t_s = 2.5;
  sm = sm.with_slots(20);
  const auto ts = Clock::now();
  for (auto mode : kModes) {
    for (Scheme sc : {Scheme::Full3D, Scheme::FixedAlt2D}) plans.short_runs.push_back(plan(sm, mode, sc));
  }
  plans.short_seconds = seconds_since(ts);
  const Scenario s = default_scenario();
  for (auto mode : kModes) {
    for (Scheme sc : kAllSchemes) plans.full_runs.push_back(plan(s, mode, sc));
  }

  report("monotone ascent", monotone(plans));
  report("dominance ordering", dominance(plans));
  report("quasi-stationary behavior", quasi_stationary());
  report("zero-power consistency", zero_power(plans));
  std::printf("%d of %d criteria passed in %.1f s\n", index - failures, index, seconds_since(t0));
  if (!expected.empty()) {
    std::printf("expected failures:");
    for (int k : expected) std::printf(" %d", k);
    std::printf(" (%s)\n", failed == expected ? "matched" : "MISMATCH");
  }
  return failed == expected ? 0 : 1;
}
