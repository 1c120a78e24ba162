#include "secuav/placement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "secuav/errors.hpp"

namespace secuav {

namespace {

// d/dz of the channel-power-to-noise ratio g = γ0 ρ^(−α/2), ρ = ‖q−w‖² + z².
double gain_dz(const Scenario& s, Vec2 q, double z, Vec2 w, double g) {
  const double rho = squared_norm(q - w) + z * z;
  return -s.alpha * z * g / rho;
}

double unclamped_rate(const Scenario& s, Vec2 q, double z, ColludeMode mode) {
  return secrecy_rate(s, q, z, s.p_static, mode, Clamp::None);
}

// Lexicographic order used by the grid search: higher rate first, then
// smaller x, then smaller y.
bool better(const FieldSample& a, const FieldSample& b) {
  if (a.rate != b.rate) return a.rate > b.rate;
  if (a.q.x != b.q.x) return a.q.x < b.q.x;
  return a.q.y < b.q.y;
}

}  // namespace

double rate_altitude_derivative(const Scenario& s, Vec2 q, double z, double p, ColludeMode mode) {
  double legit = 0.0;
  double legit_dz = 0.0;
  for (const auto& w : s.gr_positions) {
    const double g = link_gain(s, q, z, w);
    legit += g;
    legit_dz += gain_dz(s, q, z, w, g);
  }
  double eav = 0.0;
  double eav_dz = 0.0;
  for (const auto& w : s.eav_positions) {
    const double g = link_gain(s, q, z, w);
    if (mode == ColludeMode::Colluding) {
      eav += g;
      eav_dz += gain_dz(s, q, z, w, g);
    } else if (g > eav) {
      eav = g;
      eav_dz = gain_dz(s, q, z, w, g);
    }
  }
  return (p * legit_dz / (1.0 + p * legit) - p * eav_dz / (1.0 + p * eav)) / std::numbers::ln2;
}

namespace {

// Scans the derivative on kAltitudeScanPoints points, bisects every sign
// change and keeps the best of the stationary points and the interval ends.
// With several receivers the rate need not be unimodal in z, so a single
// bisection can settle on the lower of two peaks.
double scan_altitude(const Scenario& s, Vec2 q, ColludeMode mode) {
  const double p = s.p_static;
  if (s.z_max <= s.z_min) return s.z_min;

  const std::size_t m = kAltitudeScanPoints;
  const double h = (s.z_max - s.z_min) / static_cast<double>(m - 1);
  std::vector<double> candidates{s.z_min};
  double z_prev = s.z_min;
  double d_prev = rate_altitude_derivative(s, q, z_prev, p, mode);
  for (std::size_t i = 1; i < m; ++i) {
    const double z = i + 1 == m ? s.z_max : s.z_min + static_cast<double>(i) * h;
    const double d = rate_altitude_derivative(s, q, z, p, mode);
    if (d == 0.0) {
      candidates.push_back(z);
    } else if ((d_prev > 0.0 && d < 0.0) || (d_prev < 0.0 && d > 0.0)) {
      double lo = z_prev;
      double hi = z;
      const bool rising = d_prev > 0.0;
      while (hi - lo > kAltitudeBracket) {
        const double mid = 0.5 * (lo + hi);
        const double dm = rate_altitude_derivative(s, q, mid, p, mode);
        if ((dm > 0.0) == rising) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      candidates.push_back(0.5 * (lo + hi));
    }
    z_prev = z;
    d_prev = d;
  }
  candidates.push_back(s.z_max);

  double best_z = candidates.front();
  double best_rate = unclamped_rate(s, q, best_z, mode);
  for (double z : candidates) {
    const double r = unclamped_rate(s, q, z, mode);
    if (r > best_rate || (r == best_rate && z < best_z)) {
      best_rate = r;
      best_z = z;
    }
  }
  return best_z;
}

}  // namespace

double altitude_opt_noncolluding(const Scenario& s, Vec2 q) {
  return scan_altitude(s, q, ColludeMode::NonColluding);
}

double altitude_opt_colluding(const Scenario& s, Vec2 q) { return scan_altitude(s, q, ColludeMode::Colluding); }

double altitude_opt(const Scenario& s, Vec2 q, ColludeMode mode) {
  return mode == ColludeMode::NonColluding ? altitude_opt_noncolluding(s, q) : altitude_opt_colluding(s, q);
}

PowerDecision power_threshold(const Scenario& s, Vec2 q, double z_candidate, ColludeMode mode) {
  if (unclamped_rate(s, q, z_candidate, mode) > 0.0) return {s.p_static, z_candidate};
  return {0.0, s.z_min};
}

FieldSample evaluate_point(const Scenario& s, Vec2 q, ColludeMode mode) {
  const auto decision = power_threshold(s, q, altitude_opt(s, q, mode), mode);
  return {q, decision.z, decision.p, secrecy_rate(s, q, decision.z, decision.p, mode)};
}

Region default_region(const Scenario& s, double margin) {
  Region r{s.gr_positions.front().x, s.gr_positions.front().x, s.gr_positions.front().y,
           s.gr_positions.front().y};
  auto grow = [&r](Vec2 w) {
    r.x_min = std::min(r.x_min, w.x);
    r.x_max = std::max(r.x_max, w.x);
    r.y_min = std::min(r.y_min, w.y);
    r.y_max = std::max(r.y_max, w.y);
  };
  for (const auto& w : s.gr_positions) grow(w);
  for (const auto& w : s.eav_positions) grow(w);
  r.x_min -= margin;
  r.x_max += margin;
  r.y_min -= margin;
  r.y_max += margin;
  return r;
}

std::vector<double> grid_axis(double lo, double hi, double step) {
  if (!(step > 0.0)) throw ValidationError("grid step must be positive");
  if (!(hi >= lo)) throw ValidationError("empty search region");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i) axis[i] = lo + static_cast<double>(i) * step;
  return axis;
}

std::vector<FieldSample> field_map(const Scenario& s, ColludeMode mode, const Region& region, double step) {
  const auto xs = grid_axis(region.x_min, region.x_max, step);
  const auto ys = grid_axis(region.y_min, region.y_max, step);
  std::vector<FieldSample> out;
  out.reserve(xs.size() * ys.size());
  for (double x : xs) {
    for (double y : ys) out.push_back(evaluate_point(s, {x, y}, mode));
  }
  return out;
}

namespace {

struct SearchOutcome {
  FieldSample best;
  std::vector<double> level_best;
  std::vector<FieldSample> coarse;
};

SearchOutcome run_search(const Scenario& s, ColludeMode mode, const Region& region, double coarse_step,
                         const StaticSearchOptions& opts) {
  if (!(coarse_step > 0.0)) throw ValidationError("coarse_step must be positive");
  if (!(region.x_max >= region.x_min && region.y_max >= region.y_min)) {
    throw ValidationError("empty search region");
  }
  SearchOutcome out;
  auto coarse = field_map(s, mode, region, coarse_step);
  FieldSample best = coarse.front();
  for (const auto& c : coarse) {
    if (better(c, best)) best = c;
  }
  out.level_best.push_back(best.rate);
  if (opts.keep_profile) out.coarse = std::move(coarse);

  double step = coarse_step;
  while (step > opts.final_step * (1.0 + 1e-12)) {
    const double half_width = 1.5 * step;
    const Region sub{std::max(region.x_min, best.q.x - half_width), std::min(region.x_max, best.q.x + half_width),
                     std::max(region.y_min, best.q.y - half_width), std::min(region.y_max, best.q.y + half_width)};
    step /= 10.0;
    for (const auto& c : field_map(s, mode, sub, step)) {
      if (better(c, best)) best = c;
    }
    out.level_best.push_back(best.rate);
  }
  out.best = best;
  return out;
}

}  // namespace

StaticSolution solve_static(const Scenario& s, ColludeMode mode, const Region& region, double coarse_step,
                            const StaticSearchOptions& opts) {
  auto outcome = run_search(s, mode, region, coarse_step, opts);
  StaticSolution sol;
  sol.placement = {outcome.best.q, outcome.best.z_star, outcome.best.p_star};
  sol.rate = secrecy_rate(s, sol.placement, mode);
  sol.mode = mode;
  sol.altitude_profile = std::move(outcome.coarse);
  return sol;
}

std::vector<double> solve_static_levels(const Scenario& s, ColludeMode mode, const Region& region,
                                        double coarse_step, const StaticSearchOptions& opts) {
  return run_search(s, mode, region, coarse_step, opts).level_best;
}

}  // namespace secuav
