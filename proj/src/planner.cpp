#include "secuav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "secuav/errors.hpp"

namespace secuav {

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Full3D:
      return "full3d";
    case Scheme::FixedAlt2D:
      return "2d";
    case Scheme::FhfAdaptive:
      return "fhf-adaptive";
    case Scheme::FhfConstant:
      return "fhf-constant";
  }
  return "?";
}

Scheme parse_scheme(std::string_view text) {
  for (Scheme s : kAllSchemes) {
    if (text == to_string(s)) return s;
  }
  throw ParseError("unknown scheme '" + std::string(text) + "'");
}

std::size_t medoid_gr(const Scenario& s) {
  std::size_t best = 0;
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.num_grs(); ++i) {
    double sum = 0.0;
    for (const auto& w : s.gr_positions) sum += distance(s.gr_positions[i], w);
    if (sum < best_sum) {
      best_sum = sum;
      best = i;
    }
  }
  return best;
}

Trajectory fly_hover_fly_init(const Scenario& s) {
  const std::size_t N = s.n_slots;
  const double v = s.max_step();
  const Vec2 hover = s.gr_positions[medoid_gr(s)];

  Trajectory t;
  t.q.assign(N + 2, s.q_start);
  t.z.assign(N + 2, s.z_start);

  const double d1 = distance(s.q_start, hover);
  const Vec2 u1 = d1 > 0.0 ? (1.0 / d1) * (hover - s.q_start) : Vec2{0.0, 0.0};
  auto outbound = [&](std::size_t i) { return s.q_start + std::min(static_cast<double>(i) * v, d1) * u1; };

  // Largest τ from which q_end is still reachable in the remaining moves.
  std::size_t tau = 0;
  for (std::size_t i = 0; i <= N; ++i) {
    if (distance(s.q_end, outbound(i)) <= static_cast<double>(N + 1 - i) * v + 1e-9) tau = i;
  }
  for (std::size_t i = 1; i <= tau; ++i) t.q[i] = outbound(i);

  const Vec2 turn = t.q[tau];
  const double d2 = distance(s.q_end, turn);
  const Vec2 u2 = d2 > 0.0 ? (1.0 / d2) * (turn - s.q_end) : Vec2{0.0, 0.0};
  for (std::size_t i = tau + 1; i <= N + 1; ++i) {
    const double back = static_cast<double>(N + 1 - i) * v;
    t.q[i] = s.q_end + std::min(back, d2) * u2;
  }
  t.q[N + 1] = s.q_end;

  const double dz = s.z_end - s.z_start;
  for (std::size_t i = 1; i <= N; ++i) {
    const double k = static_cast<double>(i);
    const double z = s.z_start + std::clamp(dz, -k * s.max_descent(), k * s.max_climb());
    t.z[i] = std::clamp(z, s.z_min, s.z_max);
  }
  t.z[N + 1] = s.z_end;
  return t;
}

PlanResult evaluate_plan(const Scenario& s, const Trajectory& traj, const PowerSchedule& power, ColludeMode mode,
                         Scheme scheme) {
  PlanResult r;
  r.trajectory = traj;
  r.power = power;
  r.mode = mode;
  r.scheme = scheme;
  const std::size_t N = traj.num_slots();
  r.per_slot_rate.resize(N);
  double total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    r.per_slot_rate[n] = secrecy_rate(s, traj.q[n + 1], traj.z[n + 1], power.p[n], mode);
    total += r.per_slot_rate[n];
  }
  r.avg_rate = N == 0 ? 0.0 : total / static_cast<double>(N);
  return r;
}

PlanResult alternate(const Scenario& s, ColludeMode mode, const Trajectory& traj_init, const PlanOptions& opts) {
  if (auto check = validate_trajectory(s, traj_init); !check) {
    throw ValidationError("initial trajectory: " + check.violation);
  }
  PlanResult best;
  bool have_best = false;
  std::vector<double> history;
  std::vector<ScaTraceRow> trace;
  std::vector<std::vector<double>> sca_histories;
  int sca_steps = 0;
  Trajectory traj = traj_init;
  double prev = 0.0;

  for (int outer = 0;; ++outer) {
    const PowerSchedule power = kkt_power(slot_gains(s, traj, mode), s.p_ave, s.p_peak);
    PlanResult cand = evaluate_plan(s, traj, power, mode, Scheme::Full3D);
    history.push_back(cand.avg_rate);
    if (!have_best || cand.avg_rate > best.avg_rate) {
      best = std::move(cand);
      have_best = true;
    }
    const double current = history.back();
    if (outer > 0 && (current - prev) / std::max(std::abs(prev), 1e-12) < opts.outer_rel_tol) break;
    if (outer == opts.max_outer) break;
    prev = current;

    ScaResult sca;
    try {
      sca = sca_optimize_traj(s, power, traj, mode, opts.sca);
    } catch (const SolverError& e) {
      throw SolverError("outer iteration " + std::to_string(outer + 1) + ": " + e.what());
    }
    trace.insert(trace.end(), sca.trace.begin(), sca.trace.end());
    sca_histories.push_back(std::move(sca.history));
    traj = std::move(sca.trajectory);
    ++sca_steps;
  }

  best.outer_iterations = sca_steps;
  best.outer_history = std::move(history);
  best.trace = std::move(trace);
  best.sca_histories = std::move(sca_histories);
  return best;
}

PlanResult plan(const Scenario& s, ColludeMode mode, Scheme scheme, const PlanOptions& opts) {
  validate_scenario(s);
  const Trajectory init = fly_hover_fly_init(s);
  switch (scheme) {
    case Scheme::Full3D: {
      PlanOptions o = opts;
      o.sca.fixed_altitude = false;
      return alternate(s, mode, init, o);
    }
    case Scheme::FixedAlt2D: {
      Trajectory flat = init;
      for (std::size_t i = 1; i <= s.n_slots; ++i) flat.z[i] = opts.fixed_altitude;
      if (auto check = validate_trajectory(s, flat); !check) {
        throw ValidationError("fixed altitude is not reachable: " + check.violation);
      }
      PlanOptions o = opts;
      o.sca.fixed_altitude = true;
      PlanResult r = alternate(s, mode, flat, o);
      r.scheme = scheme;
      return r;
    }
    case Scheme::FhfAdaptive: {
      PlanResult r = evaluate_plan(s, init, kkt_power(slot_gains(s, init, mode), s.p_ave, s.p_peak), mode, scheme);
      r.outer_history = {r.avg_rate};
      return r;
    }
    case Scheme::FhfConstant: {
      PowerSchedule p{std::vector<double>(s.n_slots, s.p_ave)};
      PlanResult r = evaluate_plan(s, init, p, mode, scheme);
      r.outer_history = {r.avg_rate};
      return r;
    }
  }
  throw ValidationError("unknown scheme");
}

}  // namespace secuav
