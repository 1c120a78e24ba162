#include "secuav/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "secuav/errors.hpp"

namespace secuav {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void close_checked(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": bad number '" + text + "'");
  }
}

struct MobileEntry {
  ColludeMode mode;
  Scheme scheme;
  std::size_t n;
};

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_trajectory_csv(const fs::path& path, const PlanResult& r, double t_s) {
  auto out = open_out(path);
  out << "n,t_s_elapsed,x,y,z,p_mw,rate_bpshz\n";
  const std::size_t N = r.trajectory.num_slots();
  for (std::size_t i = 0; i < N + 2; ++i) {
    const bool slot = i >= 1 && i <= N;
    out << i << ',' << format_number(static_cast<double>(i) * t_s) << ',' << format_number(r.trajectory.q[i].x)
        << ',' << format_number(r.trajectory.q[i].y) << ',' << format_number(r.trajectory.z[i]) << ','
        << format_number(slot ? r.power.p[i - 1] : 0.0) << ','
        << format_number(slot ? r.per_slot_rate[i - 1] : 0.0) << '\n';
  }
  close_checked(out, path);
}

void write_trace_csv(const fs::path& path, const std::vector<ScaTraceRow>& trace) {
  auto out = open_out(path);
  out << "iter,true_avg_rate,surrogate_value,solver_iters\n";
  for (const auto& row : trace) {
    out << row.iter << ',' << format_number(row.true_avg_rate) << ',' << format_number(row.surrogate_value) << ','
        << row.solver_iters << '\n';
  }
  close_checked(out, path);
}

void write_summary_csv(const fs::path& path, const std::vector<SummaryRow>& rows) {
  auto out = open_out(path);
  out << "scheme,mode,n_slots,avg_rate_bpshz,outer_iters,wall_seconds\n";
  for (const auto& r : rows) {
    out << to_string(r.scheme) << ',' << to_string(r.mode) << ',' << r.n_slots << ',' << format_number(r.avg_rate)
        << ',' << r.outer_iterations << ',' << format_number(r.wall_seconds) << '\n';
  }
  close_checked(out, path);
}

void write_static_csv(const fs::path& path, const std::vector<StaticSolution>& sols) {
  auto out = open_out(path);
  out << "mode,x,y,z,p_mw,rate_bpshz\n";
  for (const auto& s : sols) {
    out << to_string(s.mode) << ',' << format_number(s.placement.q.x) << ',' << format_number(s.placement.q.y) << ','
        << format_number(s.placement.z) << ',' << format_number(s.placement.p) << ',' << format_number(s.rate)
        << '\n';
  }
  close_checked(out, path);
}

void write_field_csv(const fs::path& path, const std::vector<FieldSample>& field) {
  auto out = open_out(path);
  out << "x,y,z_star,p_star,rate\n";
  for (const auto& f : field) {
    out << format_number(f.q.x) << ',' << format_number(f.q.y) << ',' << format_number(f.z_star) << ','
        << format_number(f.p_star) << ',' << format_number(f.rate) << '\n';
  }
  close_checked(out, path);
}

TrajectoryTable read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trajectory file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "n,t_s_elapsed,x,y,z,p_mw,rate_bpshz") {
    throw ParseError("trajectory file '" + path.string() + "' has an unexpected header");
  }
  TrajectoryTable t;
  std::vector<double> p;
  std::vector<double> rate;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 7) throw ParseError("line " + std::to_string(line_no) + ": expected 7 columns");
    const double idx = parse_number(cells[0], line_no);
    if (idx != static_cast<double>(t.trajectory.q.size())) {
      throw ParseError("line " + std::to_string(line_no) + ": waypoint index out of sequence");
    }
    t.trajectory.q.push_back({parse_number(cells[2], line_no), parse_number(cells[3], line_no)});
    t.trajectory.z.push_back(parse_number(cells[4], line_no));
    p.push_back(parse_number(cells[5], line_no));
    rate.push_back(parse_number(cells[6], line_no));
  }
  if (t.trajectory.q.size() < 3) throw ParseError("trajectory file needs at least one slot");
  t.power.assign(p.begin() + 1, p.end() - 1);
  t.rate.assign(rate.begin() + 1, rate.end() - 1);
  return t;
}

std::vector<StaticSolution> run_static(const Scenario& s, const RunManifest& m) {
  validate_scenario(s);
  const Region region = m.region.value_or(default_region(s));
  std::vector<StaticSolution> sols;
  for (ColludeMode mode : m.modes) {
    sols.push_back(solve_static(s, mode, region, m.coarse_step));
    if (m.field_map) {
      write_field_csv(m.out_dir / ("field_" + std::string(to_string(mode)) + ".csv"),
                      field_map(s, mode, region, m.coarse_step));
    }
  }
  write_static_csv(m.out_dir / "static_solution.csv", sols);
  return sols;
}

std::vector<SummaryRow> run_mobile(const Scenario& s, const RunManifest& m) {
  std::vector<std::size_t> durations = m.n_slots;
  if (durations.empty()) durations.push_back(s.n_slots);
  // Fail before any work when a duration cannot reach q_end.
  for (std::size_t n : durations) (void)s.with_slots(n);

  std::vector<MobileEntry> entries;
  for (ColludeMode mode : m.modes) {
    for (Scheme scheme : m.schemes) {
      for (std::size_t n : durations) entries.push_back({mode, scheme, n});
    }
  }

  std::vector<SummaryRow> rows(entries.size());
  std::vector<std::exception_ptr> errors(entries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      try {
        const auto& e = entries[i];
        const Scenario sn = s.with_slots(e.n);
        const auto start = std::chrono::steady_clock::now();
        const PlanResult r = plan(sn, e.mode, e.scheme, m.plan);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const fs::path dir = m.out_dir / to_string(e.mode);
        const std::string tag = std::string(to_string(e.scheme)) + "_" + std::to_string(e.n);
        write_trajectory_csv(dir / ("traj_" + tag + ".csv"), r, sn.t_s);
        if (m.trace && !r.trace.empty()) write_trace_csv(dir / ("trace_" + tag + ".csv"), r.trace);
        rows[i] = {e.scheme, e.mode, e.n, r.avg_rate, r.outer_iterations, wall};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto jobs = static_cast<std::size_t>(std::clamp<int>(m.jobs, 1, 64));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < std::min(jobs, entries.size()); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  write_summary_csv(m.out_dir / "summary.csv", rows);
  return rows;
}

}  // namespace secuav
