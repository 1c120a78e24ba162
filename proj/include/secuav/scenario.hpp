#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secuav/geometry.hpp"

namespace secuav {

/// Immutable problem instance. All quantities are linear: meters, seconds,
/// milliwatts, and dimensionless gains. Conversion from dB/dBm happens only
/// in the text loader.
struct Scenario {
  std::vector<Vec2> gr_positions;   // legitimate ground receivers
  std::vector<Vec2> eav_positions;  // eavesdroppers
  double alpha = 2.0;               // path-loss exponent
  double beta0 = 1e-3;              // channel power gain at 1 m
  double sigma2 = 1e-8;             // receiver noise power, mW
  double z_min = 150.0;
  double z_max = 250.0;
  double p_static = 1000.0;  // quasi-stationary maximum power, mW
  double p_ave = 1000.0;
  double p_peak = 4000.0;
  double v_h = 25.0;  // m/s
  double v_up = 4.0;
  double v_down = 6.0;
  double t_s = 0.5;  // slot duration, s
  std::size_t n_slots = 100;
  Vec2 q_start{-305.0, 800.0};
  Vec2 q_end{-80.0, -200.0};
  double z_start = 200.0;
  double z_end = 200.0;

  std::size_t num_grs() const { return gr_positions.size(); }
  std::size_t num_eavs() const { return eav_positions.size(); }

  /// beta0 / sigma2: channel-power-to-noise ratio at the reference distance.
  double gain_ref() const { return beta0 / sigma2; }

  // Per-slot displacement limits.
  double max_step() const { return v_h * t_s; }
  double max_climb() const { return v_up * t_s; }
  double max_descent() const { return v_down * t_s; }

  double duration() const { return static_cast<double>(n_slots) * t_s; }

  /// Copy with a different slot count; re-validates reachability.
  Scenario with_slots(std::size_t n) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// The settings used throughout the simulation section of the reference
/// design: three collinear receivers, two eavesdroppers, T = 50 s.
Scenario default_scenario();

/// Throws ValidationError naming the first violated invariant, or
/// InfeasibleError when the endpoints cannot be joined in n_slots + 1 moves.
void validate_scenario(const Scenario& s);

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Writes linear keys with round-trip precision.
std::string serialize_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// Waypoints 0..N+1; 0 and N+1 are the fixed endpoints.
struct Trajectory {
  std::vector<Vec2> q;
  std::vector<double> z;

  std::size_t num_slots() const { return q.size() < 2 ? 0 : q.size() - 2; }
};

struct TrajectoryCheck {
  bool ok = true;
  std::string violation;  // empty when ok

  explicit operator bool() const { return ok; }
};

/// Mobility, vertical-speed and altitude limits, checked to 1e-6 m, plus exact
/// endpoint equality.
TrajectoryCheck validate_trajectory(const Scenario& s, const Trajectory& traj);

inline constexpr double kTrajectoryTolerance = 1e-6;

}  // namespace secuav
