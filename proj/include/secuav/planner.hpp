#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "secuav/channel.hpp"
#include "secuav/power_alloc.hpp"
#include "secuav/scenario.hpp"
#include "secuav/traj_sca.hpp"

namespace secuav {

enum class Scheme { Full3D, FixedAlt2D, FhfAdaptive, FhfConstant };

inline constexpr Scheme kAllSchemes[] = {Scheme::Full3D, Scheme::FixedAlt2D, Scheme::FhfAdaptive,
                                         Scheme::FhfConstant};

/// "full3d", "2d", "fhf-adaptive", "fhf-constant".
const char* to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

struct PlanResult {
  Trajectory trajectory;
  PowerSchedule power;
  std::vector<double> per_slot_rate;  // clamped secrecy rate of each slot
  double avg_rate = 0.0;
  ColludeMode mode = ColludeMode::NonColluding;
  Scheme scheme = Scheme::Full3D;
  int outer_iterations = 0;             // trajectory half-steps taken
  std::vector<double> outer_history;    // avg_rate after every power half-step
  std::vector<ScaTraceRow> trace;       // inner SCA iterations, concatenated
  std::vector<std::vector<double>> sca_histories;  // one per trajectory half-step
};

struct PlanOptions {
  int max_outer = 20;
  double outer_rel_tol = 1e-4;
  double fixed_altitude = 200.0;  // m, for Scheme::FixedAlt2D
  ScaOptions sca;
};

/// Index of the receiver minimizing the summed distance to all receivers;
/// the lowest index wins ties.
std::size_t medoid_gr(const Scenario& s);

/// Straight flight at full speed to the point above the medoid receiver,
/// hover, then straight flight at full speed to q_end. Altitude moves to
/// z_end at the maximum vertical rate and then holds.
Trajectory fly_hover_fly_init(const Scenario& s);

/// Evaluates a fixed trajectory and power schedule.
PlanResult evaluate_plan(const Scenario& s, const Trajectory& traj, const PowerSchedule& power, ColludeMode mode,
                         Scheme scheme);

/// Alternating power / trajectory optimization starting from traj_init;
/// returns the best iterate. Solver failures are rethrown with the outer
/// iteration prefixed.
PlanResult alternate(const Scenario& s, ColludeMode mode, const Trajectory& traj_init,
                     const PlanOptions& opts = {});

/// Any scheme, started from fly_hover_fly_init.
PlanResult plan(const Scenario& s, ColludeMode mode, Scheme scheme, const PlanOptions& opts = {});

}  // namespace secuav
