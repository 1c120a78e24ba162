// secuav: secure UAV placement and trajectory planning.
//
//   secuav plan static --scenario s.scn --mode both --out out/ [--field-map]
//   secuav plan mobile --scenario s.scn --scheme all --n-slots 84,100 --out out/ [--trace] [--jobs 4]
//   secuav check --scenario s.scn --traj out/colluding/traj_full3d_100.csv

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

#include "secuav/errors.hpp"
#include "secuav/runner.hpp"
#include "secuav/scenario.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

std::vector<secuav::ColludeMode> modes_from(const std::string& text) {
  if (text == "both") return {secuav::ColludeMode::NonColluding, secuav::ColludeMode::Colluding};
  return {secuav::parse_mode(text)};
}

std::vector<secuav::Scheme> schemes_from(const std::string& text) {
  if (text == "all") return {std::begin(secuav::kAllSchemes), std::end(secuav::kAllSchemes)};
  return {secuav::parse_scheme(text)};
}

secuav::Region region_from(const std::vector<double>& v) {
  if (v.size() != 4) throw secuav::ValidationError("--region takes x_min,x_max,y_min,y_max");
  return {v[0], v[1], v[2], v[3]};
}

int run_check(const std::string& scenario_path, const std::string& traj_path) {
  const auto s = secuav::load_scenario(scenario_path);
  const auto table = secuav::read_trajectory_csv(traj_path);
  const auto sn = s.with_slots(table.trajectory.num_slots());
  const auto check = secuav::validate_trajectory(sn, table.trajectory);
  if (!check) {
    std::fprintf(stderr, "secuav: %s\n", check.violation.c_str());
    return kExitValidation;
  }
  std::printf("ok: %zu slots\n", sn.n_slots);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secrecy-rate maximizing UAV placement and trajectory planning"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::string mode = "both";
  std::string scheme = "all";
  std::vector<std::size_t> n_slots;
  std::vector<double> region;
  secuav::RunManifest manifest;

  auto* plan = app.add_subcommand("plan", "Run a planning experiment");
  plan->require_subcommand(1);
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--mode", mode, "noncolluding, colluding or both")
        ->check(CLI::IsMember({"noncolluding", "colluding", "both"}));
    cmd->add_option("--out", out_dir, "Output directory");
  };
  auto* stat = plan->add_subcommand("static", "Quasi-stationary placement");
  add_common(stat);
  stat->add_flag("--field-map", manifest.field_map, "Write field_<mode>.csv over the search region");
  stat->add_option("--coarse-step", manifest.coarse_step, "Coarse grid step, m")->check(CLI::PositiveNumber);
  stat->add_option("--region", region, "x_min,x_max,y_min,y_max")->delimiter(',')->expected(4);

  auto* mob = plan->add_subcommand("mobile", "Trajectory and power planning");
  add_common(mob);
  mob->add_option("--scheme", scheme, "full3d, 2d, fhf-adaptive, fhf-constant or all")
      ->check(CLI::IsMember({"full3d", "2d", "fhf-adaptive", "fhf-constant", "all"}));
  mob->add_option("--n-slots", n_slots, "Comma-separated slot counts")->delimiter(',');
  mob->add_flag("--trace", manifest.trace, "Write per-iteration SCA traces");
  mob->add_option("--jobs", manifest.jobs, "Concurrent plans")->check(CLI::Range(1, 64));
  mob->add_option("--max-outer", manifest.plan.max_outer, "Outer alternation limit")->check(CLI::PositiveNumber);
  mob->add_option("--sca-iters", manifest.plan.sca.max_iters, "SCA iteration limit")->check(CLI::PositiveNumber);

  std::string traj_path;
  auto* check = app.add_subcommand("check", "Validate a trajectory CSV against a scenario");
  check->add_option("--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
  check->add_option("--traj", traj_path, "Trajectory CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return run_check(scenario_path, traj_path);

    const auto s = secuav::load_scenario(scenario_path);
    manifest.out_dir = out_dir;
    manifest.modes = modes_from(mode);
    if (*stat) {
      if (!region.empty()) manifest.region = region_from(region);
      for (const auto& sol : secuav::run_static(s, manifest)) {
        std::printf("%s: q=(%.3f, %.3f) z=%.3f p=%.1f rate=%.6f\n", secuav::to_string(sol.mode),
                    sol.placement.q.x, sol.placement.q.y, sol.placement.z, sol.placement.p, sol.rate);
      }
    } else {
      manifest.schemes = schemes_from(scheme);
      manifest.n_slots = n_slots;
      for (const auto& row : secuav::run_mobile(s, manifest)) {
        std::printf("%-12s %-12s N=%-4zu avg_rate=%.6f outer=%d %.2fs\n", secuav::to_string(row.scheme),
                    secuav::to_string(row.mode), row.n_slots, row.avg_rate, row.outer_iterations,
                    row.wall_seconds);
      }
    }
    return 0;
  } catch (const secuav::IoError& e) {
    std::fprintf(stderr, "secuav: %s\n", e.what());
    return kExitIo;
  } catch (const secuav::SolverError& e) {
    std::fprintf(stderr, "secuav: solver failure: %s\n", e.what());
    return kExitSolver;
  } catch (const secuav::Error& e) {
    std::fprintf(stderr, "secuav: %s\n", e.what());
    return kExitValidation;
  }
}
