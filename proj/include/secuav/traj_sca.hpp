#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "secuav/channel.hpp"
#include "secuav/convex_core.hpp"
#include "secuav/power_alloc.hpp"
#include "secuav/scenario.hpp"

namespace secuav {

/// First-order expansion of (‖q−w‖² + z²)^(α/2) around (q0, z0):
/// value0 + grad_q·(q − q0) + grad_z·(z − z0).
struct AffineBound {
  Vec2 q0;
  double z0 = 0.0;
  double value0 = 0.0;
  Vec2 grad_q;
  double grad_z = 0.0;

  double operator()(Vec2 q, double z) const { return value0 + dot(grad_q, q - q0) + grad_z * (z - z0); }
};

/// Throws ValidationError when z0 ≤ 0.
AffineBound eav_dist_lb(Vec2 q0, double z0, Vec2 w, double alpha);

/// (‖q−w‖² + z²)^(α/2).
double distance_pow(Vec2 q, double z, Vec2 w, double alpha);

/// Per-slot rate in distance-proxy coordinates:
///   log2(1 + γ0 p Σ_k 1/ζ_k) − log2(1 + γ0 p E),
/// E = 1/η_j for a single eavesdropper j, or Σ_j 1/η_j when j is empty.
double proxy_rate(double gain_ref, double p, std::span<const double> zeta, std::span<const double> eta,
                  std::optional<std::size_t> j);

/// Concave lower bound of proxy_rate, tight at zeta == zeta_exp: the
/// legitimate term is linearized in ζ around zeta_exp.
double rate_lb_value(double gain_ref, double p, std::span<const double> zeta, std::span<const double> zeta_exp,
                     std::span<const double> eta, std::optional<std::size_t> j);

/// Variable indexing of one subproblem. Slots are 0-based (slot n+1).
/// Per slot: x, y, [z], [r], u_1..u_K, v_1..v_J, where u = ζ/ζ^m and
/// v = η/E^m are the distance proxies scaled by their expansion values.
struct SubproblemLayout {
  std::size_t n_slots = 0;
  std::size_t num_grs = 0;
  std::size_t num_eavs = 0;
  bool has_altitude = true;
  bool has_slack = true;

  std::size_t block() const { return 2 + (has_altitude ? 1 : 0) + (has_slack ? 1 : 0) + num_grs + num_eavs; }
  std::size_t dim() const { return n_slots * block(); }
  std::size_t x(std::size_t n) const { return n * block(); }
  std::size_t y(std::size_t n) const { return x(n) + 1; }
  std::size_t z(std::size_t n) const { return x(n) + 2; }
  std::size_t r(std::size_t n) const { return x(n) + (has_altitude ? 3 : 2); }
  std::size_t zeta(std::size_t n, std::size_t k) const {
    return x(n) + 2 + (has_altitude ? 1 : 0) + (has_slack ? 1 : 0) + k;
  }
  std::size_t eta(std::size_t n, std::size_t j) const { return zeta(n, 0) + num_grs + j; }
};

struct SubproblemOptions {
  bool fixed_altitude = false;  // altitudes taken from traj_m and held constant
  double relax = 1e-7;          // m; slack added to mobility, climb and altitude limits
};

struct Subproblem {
  ConcaveProgram program;
  SubproblemLayout layout;
  Trajectory expansion;
  std::vector<double> zeta_scale;  // ζ^m, indexed n·K + k
  std::vector<double> eta_scale;   // E^m, indexed n·J + j

  /// Trajectory encoded by a point of the program.
  Trajectory extract(std::span<const double> x) const;
  double zeta(std::span<const double> x, std::size_t n, std::size_t k) const;
  double eta(std::span<const double> x, std::size_t n, std::size_t j) const;
};

/// Throws ValidationError when traj_m violates its limits or the start point
/// is not strictly feasible.
Subproblem build_subproblem(const Scenario& s, const Trajectory& traj_m, const PowerSchedule& p, ColludeMode mode,
                            const SubproblemOptions& opts = {});

/// (1/N) Σ over slots with p[n] > 0 of the unclamped secrecy rate.
double fixed_power_objective(const Scenario& s, const Trajectory& traj, const PowerSchedule& p, ColludeMode mode);

struct ScaTraceRow {
  int iter = 0;
  double true_avg_rate = 0.0;
  double surrogate_value = 0.0;
  int solver_iters = 0;
};

struct ScaOptions {
  int max_iters = 50;
  double rel_tol = 1e-4;
  bool fixed_altitude = false;
  SolverOptions solver;
};

struct ScaResult {
  Trajectory trajectory;  // best iterate
  double objective = 0.0;  // fixed_power_objective of the best iterate
  std::vector<double> history;  // objective of traj_init and every iterate
  std::vector<ScaTraceRow> trace;
};

/// Throws SolverError naming the SCA iteration when the inner solve fails.
ScaResult sca_optimize_traj(const Scenario& s, const PowerSchedule& p, const Trajectory& traj_init, ColludeMode mode,
                            const ScaOptions& opts = {});

}  // namespace secuav
