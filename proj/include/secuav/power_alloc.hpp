#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "secuav/channel.hpp"
#include "secuav/scenario.hpp"

namespace secuav {

/// Per-slot transmit powers p[1..N], mW (stored 0-based).
struct PowerSchedule {
  std::vector<double> p;

  double mean() const;
};

/// Effective per-mW gains of each slot: a = Σ_k g_bk, b = max_j g_ej or Σ_j g_ej.
struct SlotGains {
  std::vector<double> a;
  std::vector<double> b;
};

SlotGains slot_gains(const Scenario& s, const Trajectory& traj, ColludeMode mode);

/// Slots with a[n] > b[n] (0-based).
std::vector<std::size_t> active_slots(const SlotGains& g);

/// Unclamped optimum of log2(1+a·p) − log2(1+b·p) − ν·p over p ≥ 0:
/// the positive root of a/(1+ap) − b/(1+bp) = ν ln 2, or 0.
double stationary_power(double a, double b, double nu);

/// Optimal schedule for a fixed trajectory under the average/peak budget.
/// Throws ValidationError when p_ave > p_peak.
PowerSchedule kkt_power(const SlotGains& g, double p_ave, double p_peak);

struct KktDiagnostics {
  double nu = 0.0;        // optimal multiplier of the average-power constraint
  int bisection_steps = 0;
};

PowerSchedule kkt_power(const SlotGains& g, double p_ave, double p_peak, KktDiagnostics& diag);

/// Σ_n [log2(1+a·p) − log2(1+b·p)], unclamped.
double power_objective(const SlotGains& g, std::span<const double> p);

}  // namespace secuav
