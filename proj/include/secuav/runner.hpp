#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "secuav/placement.hpp"
#include "secuav/planner.hpp"
#include "secuav/scenario.hpp"

namespace secuav {

struct RunManifest {
  std::filesystem::path out_dir;
  std::vector<ColludeMode> modes{ColludeMode::NonColluding, ColludeMode::Colluding};
  std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  std::vector<std::size_t> n_slots;  // empty: the scenario's own N
  bool field_map = false;
  bool trace = false;
  int jobs = 1;
  double coarse_step = 5.0;       // m, static grid search and field map
  std::optional<Region> region;   // default_region when empty
  PlanOptions plan;
};

struct SummaryRow {
  Scheme scheme = Scheme::Full3D;
  ColludeMode mode = ColludeMode::NonColluding;
  std::size_t n_slots = 0;
  double avg_rate = 0.0;
  int outer_iterations = 0;
  double wall_seconds = 0.0;
};

/// Writes static_solution.csv and, on request, field_<mode>.csv.
std::vector<StaticSolution> run_static(const Scenario& s, const RunManifest& m);

/// Plans every (mode, scheme, N) entry, writing
/// <out>/<mode>/traj_<scheme>_<N>.csv (and trace_<scheme>_<N>.csv) plus
/// <out>/summary.csv. Rows come back in mode, scheme, N order.
std::vector<SummaryRow> run_mobile(const Scenario& s, const RunManifest& m);

// CSV files. Numbers are written with 9 significant digits.
std::string format_number(double v);
void write_trajectory_csv(const std::filesystem::path& path, const PlanResult& r, double t_s);
void write_trace_csv(const std::filesystem::path& path, const std::vector<ScaTraceRow>& trace);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);
void write_static_csv(const std::filesystem::path& path, const std::vector<StaticSolution>& sols);
void write_field_csv(const std::filesystem::path& path, const std::vector<FieldSample>& field);

/// Contents of a trajectory CSV.
struct TrajectoryTable {
  Trajectory trajectory;
  std::vector<double> power;  // slots 1..N
  std::vector<double> rate;   // slots 1..N
};

/// Throws IoError when the file cannot be read and ParseError on bad content.
TrajectoryTable read_trajectory_csv(const std::filesystem::path& path);

}  // namespace secuav
