#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "secuav/channel.hpp"
#include "secuav/errors.hpp"
#include "secuav/placement.hpp"
#include "secuav/planner.hpp"
#include "secuav/power_alloc.hpp"
#include "secuav/scenario.hpp"

namespace py = pybind11;
using namespace secuav;

namespace {

using Point = std::tuple<double, double>;

Vec2 vec(const Point& p) { return {std::get<0>(p), std::get<1>(p)}; }
Point point(Vec2 v) { return {v.x, v.y}; }

std::vector<Point> points(const std::vector<Vec2>& v) {
  std::vector<Point> out;
  for (const auto& p : v) out.push_back(point(p));
  return out;
}

std::vector<Vec2> vecs(const std::vector<Point>& v) {
  std::vector<Vec2> out;
  for (const auto& p : v) out.push_back(vec(p));
  return out;
}

ColludeMode mode_of(const std::string& s) { return parse_mode(s); }

py::dict plan_dict(const PlanResult& r) {
  py::dict d;
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& q : r.trajectory.q) {
    x.push_back(q.x);
    y.push_back(q.y);
  }
  d["x"] = x;
  d["y"] = y;
  d["z"] = r.trajectory.z;
  d["power"] = r.power.p;
  d["rate"] = r.per_slot_rate;
  d["avg_rate"] = r.avg_rate;
  d["mode"] = to_string(r.mode);
  d["scheme"] = to_string(r.scheme);
  d["outer_iterations"] = r.outer_iterations;
  d["outer_history"] = r.outer_history;
  return d;
}

}  // namespace

PYBIND11_MODULE(_secuav, m) {
  m.doc() = "Secrecy-rate maximizing UAV placement and trajectory planning";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", validation.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<Scenario>(m, "Scenario")
      .def(py::init(&default_scenario))
      .def_property(
          "gr_positions", [](const Scenario& s) { return points(s.gr_positions); },
          [](Scenario& s, const std::vector<Point>& v) { s.gr_positions = vecs(v); })
      .def_property(
          "eav_positions", [](const Scenario& s) { return points(s.eav_positions); },
          [](Scenario& s, const std::vector<Point>& v) { s.eav_positions = vecs(v); })
      .def_readwrite("alpha", &Scenario::alpha)
      .def_readwrite("beta0", &Scenario::beta0)
      .def_readwrite("sigma2", &Scenario::sigma2)
      .def_readwrite("z_min", &Scenario::z_min)
      .def_readwrite("z_max", &Scenario::z_max)
      .def_readwrite("p_static", &Scenario::p_static)
      .def_readwrite("p_ave", &Scenario::p_ave)
      .def_readwrite("p_peak", &Scenario::p_peak)
      .def_readwrite("v_h", &Scenario::v_h)
      .def_readwrite("v_up", &Scenario::v_up)
      .def_readwrite("v_down", &Scenario::v_down)
      .def_readwrite("t_s", &Scenario::t_s)
      .def_readwrite("n_slots", &Scenario::n_slots)
      .def_property(
          "q_start", [](const Scenario& s) { return point(s.q_start); },
          [](Scenario& s, const Point& p) { s.q_start = vec(p); })
      .def_property(
          "q_end", [](const Scenario& s) { return point(s.q_end); },
          [](Scenario& s, const Point& p) { s.q_end = vec(p); })
      .def_readwrite("z_start", &Scenario::z_start)
      .def_readwrite("z_end", &Scenario::z_end)
      .def("with_slots", &Scenario::with_slots, py::arg("n"))
      .def("validate", [](const Scenario& s) { validate_scenario(s); })
      .def("serialize", &serialize_scenario)
      .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

  m.def("default_scenario", &default_scenario);
  m.def("load_scenario", [](const std::filesystem::path& p) { return load_scenario(p); }, py::arg("path"));
  m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text); }, py::arg("text"));

  m.def(
      "secrecy_rate",
      [](const Scenario& s, const Point& q, double z, double p, const std::string& mode, bool clamp) {
        return secrecy_rate(s, vec(q), z, p, mode_of(mode), clamp ? Clamp::Positive : Clamp::None);
      },
      py::arg("scenario"), py::arg("q"), py::arg("z"), py::arg("p"), py::arg("mode"), py::arg("clamp") = true);

  m.def(
      "altitude_opt", [](const Scenario& s, const Point& q, const std::string& mode) {
        return altitude_opt(s, vec(q), mode_of(mode));
      },
      py::arg("scenario"), py::arg("q"), py::arg("mode"));

  m.def(
      "kkt_power",
      [](const std::vector<double>& a, const std::vector<double>& b, double p_ave, double p_peak) {
        return kkt_power(SlotGains{a, b}, p_ave, p_peak).p;
      },
      py::arg("a"), py::arg("b"), py::arg("p_ave"), py::arg("p_peak"));

  m.def(
      "solve_static",
      [](const Scenario& s, const std::string& mode, double coarse_step,
         std::optional<std::tuple<double, double, double, double>> region) {
        Region r = default_region(s);
        if (region) r = {std::get<0>(*region), std::get<1>(*region), std::get<2>(*region), std::get<3>(*region)};
        const auto sol = solve_static(s, mode_of(mode), r, coarse_step);
        py::dict d;
        d["q"] = point(sol.placement.q);
        d["z"] = sol.placement.z;
        d["p"] = sol.placement.p;
        d["rate"] = sol.rate;
        return d;
      },
      py::arg("scenario"), py::arg("mode"), py::arg("coarse_step") = 5.0, py::arg("region") = py::none());

  m.def(
      "plan",
      [](const Scenario& s, const std::string& mode, const std::string& scheme, int max_outer) {
        PlanOptions opts;
        opts.max_outer = max_outer;
        PlanResult r;
        {
          py::gil_scoped_release release;
          r = plan(s, mode_of(mode), parse_scheme(scheme), opts);
        }
        return plan_dict(r);
      },
      py::arg("scenario"), py::arg("mode"), py::arg("scheme") = "full3d", py::arg("max_outer") = 20);
}
