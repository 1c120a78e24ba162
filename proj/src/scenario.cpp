#include "secuav/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "secuav/errors.hpp"

namespace secuav {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ParseError("scenario: key '" + std::string(key) + "' expects a number, got '" +
                     std::string(text) + "'");
  }
  return value;
}

Vec2 parse_point(std::string_view key, std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    throw ParseError("scenario: key '" + std::string(key) + "' expects 'x,y', got '" +
                     std::string(trim(text)) + "'");
  }
  return {parse_number(key, text.substr(0, comma)), parse_number(key, text.substr(comma + 1))};
}

std::vector<Vec2> parse_points(std::string_view key, std::string_view text) {
  std::vector<Vec2> out;
  while (true) {
    const auto semi = text.find(';');
    const auto item = trim(text.substr(0, semi));
    if (!item.empty()) out.push_back(parse_point(key, item));
    if (semi == std::string_view::npos) break;
    text.remove_prefix(semi + 1);
  }
  return out;
}

double from_db(double db) { return std::pow(10.0, db / 10.0); }

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_point(Vec2 p) { return fmt_double(p.x) + "," + fmt_double(p.y); }

void require(bool cond, const char* what) {
  if (!cond) throw ValidationError(std::string("scenario invariant violated: ") + what);
}

}  // namespace

Scenario default_scenario() {
  Scenario s;
  s.gr_positions = {{-100.0, 300.0}, {0.0, 300.0}, {100.0, 300.0}};
  s.eav_positions = {{-50.0, 180.0}, {0.0, 180.0}};
  return s;
}

void validate_scenario(const Scenario& s) {
  const double all[] = {s.alpha, s.beta0, s.sigma2,  s.z_min, s.z_max,  s.p_static,
                        s.p_ave, s.p_peak, s.v_h,    s.v_up,  s.v_down, s.t_s,
                        s.q_start.x, s.q_start.y, s.q_end.x, s.q_end.y, s.z_start, s.z_end};
  for (double v : all) require(std::isfinite(v), "all numeric fields finite");
  for (const auto& w : s.gr_positions) require(std::isfinite(w.x) && std::isfinite(w.y), "finite GR positions");
  for (const auto& w : s.eav_positions) require(std::isfinite(w.x) && std::isfinite(w.y), "finite eavesdropper positions");

  require(s.num_grs() >= 1, "K ≥ 1");
  require(s.num_eavs() >= 1, "J ≥ 1");
  require(s.alpha >= 2.0 && s.alpha <= 4.0, "2 ≤ alpha ≤ 4");
  require(s.z_min > 0.0, "0 < z_min");
  require(s.z_min <= s.z_max, "z_min ≤ z_max");
  require(s.z_min <= s.z_start && s.z_start <= s.z_max, "z_min ≤ z_start ≤ z_max");
  require(s.z_min <= s.z_end && s.z_end <= s.z_max, "z_min ≤ z_end ≤ z_max");
  require(s.p_ave > 0.0, "0 < p_ave");
  require(s.p_ave <= s.p_peak, "p_ave ≤ p_peak");
  require(s.p_static > 0.0, "p_static > 0");
  require(s.sigma2 > 0.0, "sigma2 > 0");
  require(s.beta0 > 0.0, "beta0 > 0");
  require(s.v_h > 0.0 && s.v_up > 0.0 && s.v_down > 0.0, "speeds > 0");
  require(s.t_s > 0.0, "t_s > 0");
  require(s.n_slots >= 1, "n_slots ≥ 1");

  const double moves = static_cast<double>(s.n_slots + 1);
  const double span = distance(s.q_end, s.q_start);
  if (span > moves * s.max_step()) {
    throw InfeasibleError("scenario infeasible: ‖q_end − q_start‖ = " + fmt_double(span) +
                          " m exceeds (N+1)·v_h·t_s = " + fmt_double(moves * s.max_step()) + " m");
  }
  const double dz = s.z_end - s.z_start;
  if (dz > moves * s.max_climb() || -dz > moves * s.max_descent()) {
    throw InfeasibleError("scenario infeasible: altitude change z_end − z_start = " + fmt_double(dz) +
                          " m not reachable in N+1 slots");
  }
}

Scenario Scenario::with_slots(std::size_t n) const {
  Scenario copy = *this;
  copy.n_slots = n;
  validate_scenario(copy);
  return copy;
}

Scenario parse_scenario(std::string_view text) {
  std::map<std::string, std::string, std::less<>> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("scenario line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError("scenario line " + std::to_string(line_no) + ": empty key");
    if (!entries.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      throw ParseError("scenario: duplicate key '" + key + "'");
    }
  }

  Scenario s = default_scenario();
  std::set<std::string, std::less<>> consumed;
  auto take = [&](std::string_view key) -> const std::string* {
    auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    consumed.insert(it->first);
    return &it->second;
  };
  auto number = [&](std::string_view key, double& out) {
    if (const auto* v = take(key)) out = parse_number(key, *v);
  };
  // Linear key or its logarithmic twin, never both.
  auto level = [&](std::string_view linear, std::string_view log_key, double& out) {
    const auto* lin = take(linear);
    const auto* lg = take(log_key);
    if (lin && lg) {
      throw ParseError("scenario: both '" + std::string(linear) + "' and '" + std::string(log_key) +
                       "' given");
    }
    if (lin) out = parse_number(linear, *lin);
    if (lg) out = from_db(parse_number(log_key, *lg));
  };
  auto point = [&](std::string_view key, Vec2& out) {
    if (const auto* v = take(key)) out = parse_point(key, *v);
  };

  if (const auto* v = take("gr_positions")) s.gr_positions = parse_points("gr_positions", *v);
  if (const auto* v = take("eav_positions")) s.eav_positions = parse_points("eav_positions", *v);
  number("alpha", s.alpha);
  level("beta0", "beta0_db", s.beta0);
  level("sigma2", "sigma2_dbm", s.sigma2);
  number("z_min", s.z_min);
  number("z_max", s.z_max);
  level("p_static", "p_static_dbm", s.p_static);
  level("p_ave", "p_ave_dbm", s.p_ave);
  level("p_peak", "p_peak_dbm", s.p_peak);
  number("v_h", s.v_h);
  number("v_up", s.v_up);
  number("v_down", s.v_down);
  number("t_s", s.t_s);
  if (const auto* v = take("n_slots")) {
    const double n = parse_number("n_slots", *v);
    if (n < 1 || n != std::floor(n) || n > 1e7) {
      throw ParseError("scenario: n_slots must be a positive integer, got '" + *v + "'");
    }
    s.n_slots = static_cast<std::size_t>(n);
  }
  point("q_start", s.q_start);
  point("q_end", s.q_end);
  number("z_start", s.z_start);
  number("z_end", s.z_end);

  for (const auto& [key, value] : entries) {
    if (!consumed.contains(key)) throw ParseError("scenario: unknown key '" + key + "'");
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  auto points = [](const std::vector<Vec2>& ps) {
    std::string out;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (i) out += ";";
      out += fmt_point(ps[i]);
    }
    return out;
  };
  std::ostringstream out;
  out << "gr_positions=" << points(s.gr_positions) << "\n"
      << "eav_positions=" << points(s.eav_positions) << "\n"
      << "alpha=" << fmt_double(s.alpha) << "\n"
      << "beta0=" << fmt_double(s.beta0) << "\n"
      << "sigma2=" << fmt_double(s.sigma2) << "\n"
      << "z_min=" << fmt_double(s.z_min) << "\n"
      << "z_max=" << fmt_double(s.z_max) << "\n"
      << "p_static=" << fmt_double(s.p_static) << "\n"
      << "p_ave=" << fmt_double(s.p_ave) << "\n"
      << "p_peak=" << fmt_double(s.p_peak) << "\n"
      << "v_h=" << fmt_double(s.v_h) << "\n"
      << "v_up=" << fmt_double(s.v_up) << "\n"
      << "v_down=" << fmt_double(s.v_down) << "\n"
      << "t_s=" << fmt_double(s.t_s) << "\n"
      << "n_slots=" << s.n_slots << "\n"
      << "q_start=" << fmt_point(s.q_start) << "\n"
      << "q_end=" << fmt_point(s.q_end) << "\n"
      << "z_start=" << fmt_double(s.z_start) << "\n"
      << "z_end=" << fmt_double(s.z_end) << "\n";
  return out.str();
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write scenario file '" + path.string() + "'");
  out << serialize_scenario(s);
}

TrajectoryCheck validate_trajectory(const Scenario& s, const Trajectory& traj) {
  const std::size_t n = s.n_slots;
  auto fail = [](std::string msg) { return TrajectoryCheck{false, std::move(msg)}; };
  if (traj.q.size() != n + 2 || traj.z.size() != n + 2) {
    return fail("expected " + std::to_string(n + 2) + " waypoints, got " + std::to_string(traj.q.size()));
  }
  if (!(traj.q.front() == s.q_start) || traj.z.front() != s.z_start) {
    return fail("waypoint 0 differs from the scenario start");
  }
  if (!(traj.q.back() == s.q_end) || traj.z.back() != s.z_end) {
    return fail("waypoint N+1 differs from the scenario end");
  }
  const double tol = kTrajectoryTolerance;
  for (std::size_t i = 0; i < n + 2; ++i) {
    if (!std::isfinite(traj.q[i].x) || !std::isfinite(traj.q[i].y) || !std::isfinite(traj.z[i])) {
      return fail("non-finite waypoint n=" + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i <= n; ++i) {
    const double step = distance(traj.q[i + 1], traj.q[i]);
    if (step > s.max_step() + tol) {
      return fail("horizontal step n=" + std::to_string(i) + " exceeds V (" + fmt_double(step) + " > " +
                  fmt_double(s.max_step()) + ")");
    }
    const double dz = traj.z[i + 1] - traj.z[i];
    if (dz > s.max_climb() + tol) {
      return fail("ascent at n=" + std::to_string(i) + " exceeds V_up (" + fmt_double(dz) + " > " +
                  fmt_double(s.max_climb()) + ")");
    }
    if (-dz > s.max_descent() + tol) {
      return fail("descent at n=" + std::to_string(i) + " exceeds V_down (" + fmt_double(-dz) + " > " +
                  fmt_double(s.max_descent()) + ")");
    }
  }
  for (std::size_t i = 1; i <= n; ++i) {
    if (traj.z[i] < s.z_min - tol || traj.z[i] > s.z_max + tol) {
      return fail("altitude at n=" + std::to_string(i) + " outside [z_min, z_max]");
    }
  }
  return {};
}

}  // namespace secuav
