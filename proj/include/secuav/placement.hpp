#pragma once

#include <cstddef>
#include <vector>

#include "secuav/channel.hpp"
#include "secuav/scenario.hpp"

namespace secuav {

/// Axis-aligned horizontal search box, meters.
struct Region {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

/// One evaluated grid point of the quasi-stationary problem.
struct FieldSample {
  Vec2 q;
  double z_star = 0.0;
  double p_star = 0.0;
  double rate = 0.0;
};

struct StaticSolution {
  Placement placement;
  double rate = 0.0;
  ColludeMode mode = ColludeMode::NonColluding;
  std::vector<FieldSample> altitude_profile;  // coarse grid, when requested
};

/// ∂R̄/∂z at full power p, analytic. For the non-colluding model the
/// derivative follows the eavesdropper that is currently strongest.
double rate_altitude_derivative(const Scenario& s, Vec2 q, double z, double p, ColludeMode mode);

/// Maximizers of the rate over [z_min, z_max] for each eavesdropper model.
/// Both scan the derivative on kAltitudeScanPoints points, bisect every sign
/// change and compare all stationary points with the interval ends.
double altitude_opt_noncolluding(const Scenario& s, Vec2 q);
double altitude_opt_colluding(const Scenario& s, Vec2 q);

double altitude_opt(const Scenario& s, Vec2 q, ColludeMode mode);

inline constexpr std::size_t kAltitudeScanPoints = 512;
inline constexpr double kAltitudeBracket = 1e-3;  // m

struct PowerDecision {
  double p = 0.0;
  double z = 0.0;
};

/// Full power at the candidate altitude when R̄ > 0 there, otherwise silence
/// (altitude pinned to z_min).
PowerDecision power_threshold(const Scenario& s, Vec2 q, double z_candidate, ColludeMode mode);

/// Altitude, power and rate at one horizontal point.
FieldSample evaluate_point(const Scenario& s, Vec2 q, ColludeMode mode);

/// Bounding box of all ground nodes grown by `margin` meters.
Region default_region(const Scenario& s, double margin = 200.0);

/// Grid coordinates x_min + i·step, i = 0..floor((x_max − x_min)/step).
std::vector<double> grid_axis(double lo, double hi, double step);

/// Row-major (x outer, y inner) evaluation of every grid point.
std::vector<FieldSample> field_map(const Scenario& s, ColludeMode mode, const Region& region, double step);

struct StaticSearchOptions {
  double final_step = 0.5;       // stop once the grid step is at most this
  bool keep_profile = false;     // store the coarse grid in the solution
};

/// Multi-resolution 2D search. Each level re-grids the 3x3 coarse-cell
/// neighbourhood of the incumbent at a tenth of the step. Ties go to the
/// lexicographically smallest (x, y).
StaticSolution solve_static(const Scenario& s, ColludeMode mode, const Region& region, double coarse_step,
                            const StaticSearchOptions& opts = {});

/// Best rate at each refinement level, for diagnostics and tests.
std::vector<double> solve_static_levels(const Scenario& s, ColludeMode mode, const Region& region,
                                        double coarse_step, const StaticSearchOptions& opts = {});

}  // namespace secuav
