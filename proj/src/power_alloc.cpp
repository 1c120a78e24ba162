#include "secuav/power_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "secuav/errors.hpp"

namespace secuav {

double PowerSchedule::mean() const {
  if (p.empty()) return 0.0;
  return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
}

SlotGains slot_gains(const Scenario& s, const Trajectory& traj, ColludeMode mode) {
  const std::size_t n = traj.num_slots();
  SlotGains g;
  g.a.resize(n);
  g.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 q = traj.q[i + 1];
    const double z = traj.z[i + 1];
    g.a[i] = legit_snr(s, q, z, 1.0);
    g.b[i] = eav_snr(s, q, z, 1.0, mode);
  }
  return g;
}

std::vector<std::size_t> active_slots(const SlotGains& g) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g.a.size(); ++i) {
    if (g.a[i] > g.b[i]) out.push_back(i);
  }
  return out;
}

double stationary_power(double a, double b, double nu) {
  // a·b·p² + (a+b)·p + c = 0 with c = 1 − (a−b)/(ν ln2). Written in the
  // cancellation-free form 2(−c)/(B + sqrt(B² − 4Ac)); b = 0 reduces to
  // 1/(ν ln2) − 1/a.
  const double slope = (a - b) / (nu * std::numbers::ln2);
  const double c = 1.0 - slope;
  if (!(c < 0.0)) return 0.0;
  const double B = a + b;
  const double disc = (a - b) * (a - b) + 4.0 * a * b * slope;
  return -2.0 * c / (B + std::sqrt(disc));
}

namespace {

double mean_power(const SlotGains& g, const std::vector<std::size_t>& active, double nu, double p_peak,
                  std::size_t n) {
  double total = 0.0;
  for (auto i : active) total += std::min(p_peak, stationary_power(g.a[i], g.b[i], nu));
  return total / static_cast<double>(n);
}

}  // namespace

PowerSchedule kkt_power(const SlotGains& g, double p_ave, double p_peak, KktDiagnostics& diag) {
  if (p_ave > p_peak) throw ValidationError("invalid power budget: p_ave > p_peak");
  if (g.a.size() != g.b.size()) throw ValidationError("slot gain vectors differ in length");
  const std::size_t n = g.a.size();
  PowerSchedule out{std::vector<double>(n, 0.0)};
  diag = {};
  const auto active = active_slots(g);
  if (active.empty() || n == 0) return out;

  if (static_cast<double>(active.size()) * p_peak <= static_cast<double>(n) * p_ave) {
    for (auto i : active) out.p[i] = p_peak;
    return out;
  }

  double lo = 1e-18;
  double hi = 1.0;
  while (mean_power(g, active, hi, p_peak, n) > p_ave) hi *= 2.0;
  // hi always keeps the budget; lo always exceeds it.
  for (int step = 0; step < 200; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++diag.bisection_steps;
    const double avg = mean_power(g, active, mid, p_peak, n);
    if (avg > p_ave) {
      lo = mid;
    } else {
      hi = mid;
      if (p_ave - avg <= 1e-8 * p_ave) break;
    }
  }
  diag.nu = hi;
  for (auto i : active) out.p[i] = std::min(p_peak, stationary_power(g.a[i], g.b[i], hi));
  return out;
}

PowerSchedule kkt_power(const SlotGains& g, double p_ave, double p_peak) {
  KktDiagnostics diag;
  return kkt_power(g, p_ave, p_peak, diag);
}

double power_objective(const SlotGains& g, std::span<const double> p) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += log2_1p(g.a[i] * p[i]) - log2_1p(g.b[i] * p[i]);
  return total;
}

}  // namespace secuav
