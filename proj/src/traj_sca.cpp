#include "secuav/traj_sca.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>

#include "secuav/errors.hpp"

namespace secuav {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;
constexpr double kZetaInflate = 1.0 + 1e-6;
constexpr double kEtaDeflate = 1.0 - 1e-6;
constexpr double kEtaFloorShrink = 1.0 - 1e-3;
constexpr double kSlackMargin = 1e-2;

void resize(TermEval& out, std::size_t n, EvalNeeds needs) {
  if (needs != EvalNeeds::Value) out.grad.assign(n, 0.0);
  if (needs == EvalNeeds::Hessian) out.hess.assign(n * n, 0.0);
}

// Expansion data of one slot, in scaled proxy coordinates.
struct SlotModel {
  std::vector<double> e;  // γ0 p / ζ^m_k
  double a = 1.0;         // 1 + Σ e_k
  double log_a = 0.0;     // log2(a)
  std::vector<double> c;  // γ0 p / E^m_j

  double legit(std::span<const double> u) const {
    double corr = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) corr += e[k] * (u[k] - 1.0);
    return log_a - kInvLn2 * corr / a;
  }
};

// Where a waypoint's coordinates live: constants at fixed endpoints,
// variable indices otherwise.
struct WaypointRef {
  bool fixed = true;
  Vec2 q;
  double z = 0.0;
  std::size_t ix = 0;
  std::size_t iy = 0;
  std::size_t iz = 0;
  bool z_fixed = true;
};

std::string describe(const char* what, std::size_t n) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s (slot %zu)", what, n + 1);
  return buf;
}

}  // namespace

double distance_pow(Vec2 q, double z, Vec2 w, double alpha) {
  const double rho = squared_norm(q - w) + z * z;
  return alpha == 2.0 ? rho : std::pow(rho, 0.5 * alpha);
}

AffineBound eav_dist_lb(Vec2 q0, double z0, Vec2 w, double alpha) {
  if (!(z0 > 0.0)) throw ValidationError("expansion altitude must be positive");
  const Vec2 d = q0 - w;
  const double rho = squared_norm(d) + z0 * z0;
  const double slope = alpha * std::pow(rho, 0.5 * alpha - 1.0);
  return {q0, z0, distance_pow(q0, z0, w, alpha), slope * d, slope * z0};
}

double proxy_rate(double gain_ref, double p, std::span<const double> zeta, std::span<const double> eta,
                  std::optional<std::size_t> j) {
  if (p == 0.0) return 0.0;
  double legit = 0.0;
  for (double v : zeta) legit += 1.0 / v;
  double eav = 0.0;
  if (j) {
    eav = 1.0 / eta[*j];
  } else {
    for (double v : eta) eav += 1.0 / v;
  }
  return log2_1p(gain_ref * p * legit) - log2_1p(gain_ref * p * eav);
}

double rate_lb_value(double gain_ref, double p, std::span<const double> zeta, std::span<const double> zeta_exp,
                     std::span<const double> eta, std::optional<std::size_t> j) {
  if (p == 0.0) return 0.0;
  double sum = 0.0;
  for (double v : zeta_exp) sum += gain_ref * p / v;
  const double a = 1.0 + sum;
  double corr = 0.0;
  for (std::size_t k = 0; k < zeta.size(); ++k) {
    corr += gain_ref * p / (zeta_exp[k] * zeta_exp[k]) * (zeta[k] - zeta_exp[k]);
  }
  double eav = 0.0;
  if (j) {
    eav = 1.0 / eta[*j];
  } else {
    for (double v : eta) eav += 1.0 / v;
  }
  return log2_1p(sum) - kInvLn2 * corr / a - log2_1p(gain_ref * p * eav);
}

double fixed_power_objective(const Scenario& s, const Trajectory& traj, const PowerSchedule& p, ColludeMode mode) {
  const std::size_t n_slots = traj.num_slots();
  double total = 0.0;
  for (std::size_t n = 0; n < n_slots; ++n) {
    if (p.p[n] > 0.0) total += secrecy_rate(s, traj.q[n + 1], traj.z[n + 1], p.p[n], mode, Clamp::None);
  }
  return n_slots == 0 ? 0.0 : total / static_cast<double>(n_slots);
}

Trajectory Subproblem::extract(std::span<const double> x) const {
  Trajectory t = expansion;
  for (std::size_t n = 0; n < layout.n_slots; ++n) {
    t.q[n + 1] = {x[layout.x(n)], x[layout.y(n)]};
    if (layout.has_altitude) t.z[n + 1] = x[layout.z(n)];
  }
  return t;
}

double Subproblem::zeta(std::span<const double> x, std::size_t n, std::size_t k) const {
  return x[layout.zeta(n, k)] * zeta_scale[n * layout.num_grs + k];
}

double Subproblem::eta(std::span<const double> x, std::size_t n, std::size_t j) const {
  return x[layout.eta(n, j)] * eta_scale[n * layout.num_eavs + j];
}

Subproblem build_subproblem(const Scenario& s, const Trajectory& traj_m, const PowerSchedule& p, ColludeMode mode,
                            const SubproblemOptions& opts) {
  const std::size_t N = traj_m.num_slots();
  const std::size_t K = s.num_grs();
  const std::size_t J = s.num_eavs();
  if (N == 0 || traj_m.z.size() != traj_m.q.size()) throw ValidationError("expansion trajectory has no slots");
  if (p.p.size() != N) throw ValidationError("power schedule length does not match the trajectory");
  if (auto check = validate_trajectory(s, traj_m); !check) {
    throw ValidationError("infeasible expansion trajectory: " + check.violation);
  }

  Subproblem sub;
  sub.expansion = traj_m;
  auto& L = sub.layout;
  L.n_slots = N;
  L.num_grs = K;
  L.num_eavs = J;
  L.has_altitude = !opts.fixed_altitude;
  L.has_slack = mode == ColludeMode::NonColluding && J > 0;

  auto& prog = sub.program;
  prog.dim = L.dim();
  prog.lower.assign(prog.dim, -kUnbounded);
  prog.upper.assign(prog.dim, kUnbounded);
  prog.x0.assign(prog.dim, 0.0);

  const double alpha = s.alpha;
  const double gain_ref = s.gain_ref();
  const double delta = opts.relax;
  const double inv_n = 1.0 / static_cast<double>(N);
  const double step = s.max_step();

  sub.zeta_scale.resize(N * K);
  sub.eta_scale.resize(N * J);
  // Shared with the oracles, which outlive this function.
  auto models_ptr = std::make_shared<std::vector<SlotModel>>(N);
  auto& models = *models_ptr;

  for (std::size_t n = 0; n < N; ++n) {
    const Vec2 q = traj_m.q[n + 1];
    const double z = traj_m.z[n + 1];
    const double pn = p.p[n];
    if (!(pn >= 0.0)) throw ValidationError(describe("negative transmit power", n));
    auto& m = models[n];
    m.e.resize(K);
    m.c.resize(J);
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double zeta = distance_pow(q, z, s.gr_positions[k], alpha);
      sub.zeta_scale[n * K + k] = zeta;
      m.e[k] = gain_ref * pn / zeta;
      sum += m.e[k];
    }
    m.a = 1.0 + sum;
    m.log_a = log2_1p(sum);
    for (std::size_t j = 0; j < J; ++j) {
      const double eta = distance_pow(q, z, s.eav_positions[j], alpha);
      sub.eta_scale[n * J + j] = eta;
      m.c[j] = gain_ref * pn / eta;
    }

    prog.x0[L.x(n)] = q.x;
    prog.x0[L.y(n)] = q.y;
    if (L.has_altitude) {
      prog.x0[L.z(n)] = z;
      prog.lower[L.z(n)] = s.z_min - delta;
      prog.upper[L.z(n)] = s.z_max + delta;
    }

    // ζ is capped by twice the reachable distance so that slots with no
    // legitimate-rate term stay bounded.
    const double slot = static_cast<double>(n + 1);
    for (std::size_t k = 0; k < K; ++k) {
      const Vec2 w = s.gr_positions[k];
      const double reach = std::min(distance(s.q_start, w) + slot * step,
                                    distance(s.q_end, w) + (static_cast<double>(N + 1) - slot) * step) +
                           1.0;
      const double cap = std::pow(2.0, alpha) * distance_pow({reach, 0.0}, s.z_max + delta, {0.0, 0.0}, alpha);
      prog.x0[L.zeta(n, k)] = kZetaInflate;
      prog.upper[L.zeta(n, k)] = cap / sub.zeta_scale[n * K + k];
    }
    const double floor = kEtaFloorShrink * std::pow(s.z_min, alpha);
    for (std::size_t j = 0; j < J; ++j) {
      prog.x0[L.eta(n, j)] = kEtaDeflate;
      prog.lower[L.eta(n, j)] = floor / sub.eta_scale[n * J + j];
    }
  }

  // Objective.
  for (std::size_t n = 0; n < N; ++n) {
    if (L.has_slack) {
      prog.objective.push_back({{L.r(n)}, [inv_n](std::span<const double> v, EvalNeeds needs, TermEval& out) {
                                  resize(out, 1, needs);
                                  out.value = inv_n * v[0];
                                  if (needs != EvalNeeds::Value) out.grad[0] = inv_n;
                                }});
      continue;
    }
    Term t;
    for (std::size_t k = 0; k < K; ++k) t.support.push_back(L.zeta(n, k));
    for (std::size_t j = 0; j < J; ++j) t.support.push_back(L.eta(n, j));
    const SlotModel* m = &models[n];
    t.eval = [models_ptr, m, K, J, inv_n](std::span<const double> v, EvalNeeds needs, TermEval& out) {
      const std::size_t dim = K + J;
      resize(out, dim, needs);
      double sum = 0.0;
      for (std::size_t j = 0; j < J; ++j) sum += m->c[j] / v[K + j];
      out.value = inv_n * (m->legit(v.first(K)) - kInvLn2 * std::log1p(sum));
      if (needs == EvalNeeds::Value) return;
      const double onep = 1.0 + sum;
      for (std::size_t k = 0; k < K; ++k) out.grad[k] = -inv_n * kInvLn2 * m->e[k] / m->a;
      for (std::size_t j = 0; j < J; ++j) {
        const double vj = v[K + j];
        out.grad[K + j] = inv_n * kInvLn2 * m->c[j] / (vj * vj) / onep;
      }
      if (needs != EvalNeeds::Hessian) return;
      for (std::size_t i = 0; i < J; ++i) {
        const double vi = v[K + i];
        const double di = m->c[i] / (vi * vi);
        for (std::size_t j = 0; j < J; ++j) {
          const double vj = v[K + j];
          double h = -di * (m->c[j] / (vj * vj)) / (onep * onep);
          if (i == j) h += 2.0 * m->c[i] / (vi * vi * vi) / onep;
          out.hess[(K + i) * dim + K + j] = -inv_n * kInvLn2 * h;
        }
      }
    };
    prog.objective.push_back(std::move(t));
  }

  // Per-eavesdropper surrogate-rate constraints on the slack.
  if (L.has_slack) {
    for (std::size_t n = 0; n < N; ++n) {
      const SlotModel* m = &models[n];
      double r0 = kUnbounded;
      std::vector<double> u0(K, kZetaInflate);
      for (std::size_t j = 0; j < J; ++j) {
        r0 = std::min(r0, m->legit(u0) - kInvLn2 * std::log1p(m->c[j] / kEtaDeflate));
      }
      prog.x0[L.r(n)] = r0 - kSlackMargin;
      for (std::size_t j = 0; j < J; ++j) {
        Term t;
        t.support.push_back(L.r(n));
        for (std::size_t k = 0; k < K; ++k) t.support.push_back(L.zeta(n, k));
        t.support.push_back(L.eta(n, j));
        const double cj = m->c[j];
        t.eval = [models_ptr, m, K, cj](std::span<const double> v, EvalNeeds needs, TermEval& out) {
          const std::size_t dim = K + 2;
          resize(out, dim, needs);
          const double vj = v[K + 1];
          out.value = v[0] - m->legit(v.subspan(1, K)) + kInvLn2 * std::log1p(cj / vj);
          if (needs == EvalNeeds::Value) return;
          out.grad[0] = 1.0;
          for (std::size_t k = 0; k < K; ++k) out.grad[1 + k] = kInvLn2 * m->e[k] / m->a;
          out.grad[K + 1] = -kInvLn2 * cj / (vj * (vj + cj));
          if (needs != EvalNeeds::Hessian) return;
          out.hess[(K + 1) * dim + K + 1] = kInvLn2 * (1.0 / (vj * vj) - 1.0 / ((vj + cj) * (vj + cj)));
        };
        prog.constraints.push_back(std::move(t));
      }
    }
  }

  // Proxy constraints: (‖q−w‖² + z²)^(α/2) / ζ^m ≤ u and v ≤ E_lb / E^m.
  for (std::size_t n = 0; n < N; ++n) {
    const double z_const = traj_m.z[n + 1];
    std::vector<std::size_t> pos{L.x(n), L.y(n)};
    if (L.has_altitude) pos.push_back(L.z(n));
    const std::size_t np = pos.size();
    for (std::size_t k = 0; k < K; ++k) {
      Term t;
      t.support = pos;
      t.support.push_back(L.zeta(n, k));
      const Vec2 w = s.gr_positions[k];
      const double inv_s = 1.0 / sub.zeta_scale[n * K + k];
      const bool has_z = L.has_altitude;
      t.eval = [w, inv_s, alpha, np, has_z, z_const](std::span<const double> v, EvalNeeds needs, TermEval& out) {
        const std::size_t dim = np + 1;
        resize(out, dim, needs);
        const double d[3] = {v[0] - w.x, v[1] - w.y, has_z ? v[2] : z_const};
        const double rho = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        const double phi = alpha == 2.0 ? rho : std::pow(rho, 0.5 * alpha);
        out.value = phi * inv_s - v[np];
        if (needs == EvalNeeds::Value) return;
        const double g1 = alpha * phi / rho;
        for (std::size_t i = 0; i < np; ++i) out.grad[i] = inv_s * g1 * d[i];
        out.grad[np] = -1.0;
        if (needs != EvalNeeds::Hessian) return;
        const double g2 = alpha * (alpha - 2.0) * phi / (rho * rho);
        for (std::size_t a = 0; a < np; ++a) {
          for (std::size_t b = 0; b < np; ++b) {
            out.hess[a * dim + b] = inv_s * ((a == b ? g1 : 0.0) + g2 * d[a] * d[b]);
          }
        }
      };
      prog.constraints.push_back(std::move(t));
    }
    for (std::size_t j = 0; j < J; ++j) {
      Term t;
      t.support = pos;
      t.support.push_back(L.eta(n, j));
      const AffineBound lb = eav_dist_lb(traj_m.q[n + 1], traj_m.z[n + 1], s.eav_positions[j], alpha);
      const double inv_s = 1.0 / sub.eta_scale[n * J + j];
      const bool has_z = L.has_altitude;
      t.eval = [lb, inv_s, np, has_z, z_const](std::span<const double> v, EvalNeeds needs, TermEval& out) {
        resize(out, np + 1, needs);
        out.value = v[np] - lb({v[0], v[1]}, has_z ? v[2] : z_const) * inv_s;
        if (needs == EvalNeeds::Value) return;
        out.grad[0] = -lb.grad_q.x * inv_s;
        out.grad[1] = -lb.grad_q.y * inv_s;
        if (has_z) out.grad[2] = -lb.grad_z * inv_s;
        out.grad[np] = 1.0;
      };
      prog.constraints.push_back(std::move(t));
    }
  }

  // Mobility and vertical-speed limits between consecutive waypoints.
  auto waypoint = [&](std::size_t i) {
    WaypointRef w;
    w.q = traj_m.q[i];
    w.z = traj_m.z[i];
    if (i == 0 || i == N + 1) return w;
    w.fixed = false;
    w.ix = L.x(i - 1);
    w.iy = L.y(i - 1);
    w.z_fixed = !L.has_altitude;
    if (L.has_altitude) w.iz = L.z(i - 1);
    return w;
  };
  const double v_lim = step + delta;
  const double inv_v2 = 1.0 / (v_lim * v_lim);
  for (std::size_t i = 0; i <= N; ++i) {
    const WaypointRef a = waypoint(i);
    const WaypointRef b = waypoint(i + 1);
    Term t;
    if (!a.fixed) t.support = {a.ix, a.iy};
    if (!b.fixed) {
      t.support.push_back(b.ix);
      t.support.push_back(b.iy);
    }
    const bool a_var = !a.fixed;
    const bool b_var = !b.fixed;
    const Vec2 qa = a.q;
    const Vec2 qb = b.q;
    t.eval = [a_var, b_var, qa, qb, inv_v2](std::span<const double> v, EvalNeeds needs, TermEval& out) {
      const std::size_t dim = v.size();
      resize(out, dim, needs);
      const Vec2 pa = a_var ? Vec2{v[0], v[1]} : qa;
      const Vec2 pb = b_var ? (a_var ? Vec2{v[2], v[3]} : Vec2{v[0], v[1]}) : qb;
      const Vec2 d = pb - pa;
      out.value = squared_norm(d) * inv_v2 - 1.0;
      if (needs == EvalNeeds::Value) return;
      std::size_t off = 0;
      if (a_var) {
        out.grad[0] = -2.0 * d.x * inv_v2;
        out.grad[1] = -2.0 * d.y * inv_v2;
        off = 2;
      }
      if (b_var) {
        out.grad[off] = 2.0 * d.x * inv_v2;
        out.grad[off + 1] = 2.0 * d.y * inv_v2;
      }
      if (needs != EvalNeeds::Hessian) return;
      // ∇² of ‖pb − pa‖² is 2[I −I; −I I] on the variable blocks.
      const double h = 2.0 * inv_v2;
      for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
          if (r % 2 != c % 2) continue;
          const bool same_block = (r / 2) == (c / 2);
          out.hess[r * dim + c] = same_block ? h : -h;
        }
      }
    };
    prog.constraints.push_back(std::move(t));

    if (!L.has_altitude) continue;
    const double limits[2] = {s.max_climb() + delta, s.max_descent() + delta};
    for (int dir = 0; dir < 2; ++dir) {
      // dir 0: z_b − z_a ≤ climb; dir 1: z_a − z_b ≤ descent.
      const double sign = dir == 0 ? 1.0 : -1.0;
      const double lim = limits[dir];
      Term tz;
      if (!a.fixed) tz.support.push_back(a.iz);
      if (!b.fixed) tz.support.push_back(b.iz);
      const double za = a.z;
      const double zb = b.z;
      tz.eval = [a_var, b_var, za, zb, sign, lim](std::span<const double> v, EvalNeeds needs, TermEval& out) {
        resize(out, v.size(), needs);
        const double a_val = a_var ? v[0] : za;
        const double b_val = b_var ? v[a_var ? 1 : 0] : zb;
        out.value = sign * (b_val - a_val) - lim;
        if (needs == EvalNeeds::Value) return;
        if (a_var) out.grad[0] = -sign;
        if (b_var) out.grad[a_var ? 1 : 0] = sign;
      };
      prog.constraints.push_back(std::move(tz));
    }
  }

  if (!strictly_feasible(prog, prog.x0)) {
    throw ValidationError("infeasible expansion trajectory: start point is not strictly inside the subproblem");
  }
  return sub;
}

ScaResult sca_optimize_traj(const Scenario& s, const PowerSchedule& p, const Trajectory& traj_init, ColludeMode mode,
                            const ScaOptions& opts) {
  ScaResult res;
  res.trajectory = traj_init;
  res.objective = fixed_power_objective(s, traj_init, p, mode);
  res.history.push_back(res.objective);

  SubproblemOptions sub_opts;
  sub_opts.fixed_altitude = opts.fixed_altitude;
  Trajectory current = traj_init;
  double current_obj = res.objective;
  for (int m = 0; m < opts.max_iters; ++m) {
    const Subproblem sub = build_subproblem(s, current, p, mode, sub_opts);
    const SolverReport rep = solve(sub.program, opts.solver);
    if (rep.status == SolverStatus::NumericFailure) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "SCA iteration %d: ", m + 1);
      throw SolverError(buf + rep.message);
    }
    Trajectory next = sub.extract(rep.x_star);
    const double next_obj = fixed_power_objective(s, next, p, mode);
    res.history.push_back(next_obj);
    res.trace.push_back({m + 1, next_obj, rep.objective_value, rep.barrier_iterations});
    if (next_obj > res.objective) {
      res.objective = next_obj;
      res.trajectory = next;
    }
    const double gain = (next_obj - current_obj) / std::max(std::abs(current_obj), 1e-12);
    current = std::move(next);
    current_obj = next_obj;
    if (gain < opts.rel_tol) break;
  }
  return res;
}

}  // namespace secuav
