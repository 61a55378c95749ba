#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "uavsec/convex_backend.hpp"
#include "uavsec/geometry.hpp"
#include "uavsec/harness.hpp"
#include "uavsec/planner.hpp"
#include "uavsec/power_alloc.hpp"
#include "uavsec/robust_lmi.hpp"
#include "uavsec/scenario.hpp"
#include "uavsec/trajectory_sca.hpp"
#include "uavsec/verify.hpp"

namespace py = pybind11;
using namespace uavsec;

namespace {

Vec2 to_vec(const std::pair<double, double>& p) { return {p.first, p.second}; }
std::pair<double, double> from_vec(Vec2 v) { return {v.x, v.y}; }

Trajectory make_trajectory(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size()) throw py::value_error("xs and ys must have the same length");
  return {std::move(xs), std::move(ys)};
}

}  // namespace

PYBIND11_MODULE(_uavsec, m) {
  m.doc() = "Robust UAV trajectory and transmit power design";

  py::class_<EveRegion>(m, "EveRegion")
      .def(py::init<>())
      .def(py::init([](double x, double y, double r) { return EveRegion{x, y, r}; }),
           py::arg("center_x"), py::arg("center_y"), py::arg("radius"))
      .def_readwrite("center_x", &EveRegion::center_x)
      .def_readwrite("center_y", &EveRegion::center_y)
      .def_readwrite("radius", &EveRegion::radius)
      .def("__repr__", [](const EveRegion& e) {
        return "EveRegion(" + std::to_string(e.center_x) + ", " + std::to_string(e.center_y) +
               ", " + std::to_string(e.radius) + ")";
      });

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("altitude", &Scenario::altitude)
      .def_readwrite("flight_duration", &Scenario::flight_duration)
      .def_readwrite("slot_len", &Scenario::slot_len)
      .def_readwrite("n_slots", &Scenario::n_slots)
      .def_readwrite("v_max", &Scenario::v_max)
      .def_property(
          "start_xy", [](const Scenario& s) { return from_vec(s.start_xy); },
          [](Scenario& s, std::pair<double, double> p) { s.start_xy = to_vec(p); })
      .def_property(
          "end_xy", [](const Scenario& s) { return from_vec(s.end_xy); },
          [](Scenario& s, std::pair<double, double> p) { s.end_xy = to_vec(p); })
      .def_readwrite("avg_power", &Scenario::avg_power)
      .def_readwrite("peak_power", &Scenario::peak_power)
      .def_readwrite("gamma0", &Scenario::gamma0)
      .def_readwrite("eves", &Scenario::eves)
      .def_readwrite("epsilon", &Scenario::epsilon)
      .def_readwrite("max_iters", &Scenario::max_iters)
      .def("step_len", &Scenario::step_len)
      .def("to_json", [](const Scenario& s) { return harness::scenario_to_json(s); });

  py::class_<Trajectory>(m, "Trajectory")
      .def(py::init(&make_trajectory), py::arg("xs"), py::arg("ys"))
      .def_readwrite("xs", &Trajectory::xs)
      .def_readwrite("ys", &Trajectory::ys)
      .def("__len__", &Trajectory::size);

  py::class_<PowerSchedule>(m, "PowerSchedule")
      .def(py::init([](std::vector<double> p) { return PowerSchedule{std::move(p)}; }),
           py::arg("p"))
      .def_readwrite("p", &PowerSchedule::p)
      .def("__len__", [](const PowerSchedule& p) { return p.p.size(); });

  m.def(
      "validate",
      [](const Scenario& s) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& v : validate(s)) out.emplace_back(v.field, v.message);
        return out;
      },
      "List of (field, message) pairs; empty when the scenario is valid.");
  m.def("slot_count", &slot_count, py::arg("flight_duration"), py::arg("slot_len"));
  m.def("with_duration", &with_duration, py::arg("scenario"), py::arg("flight_duration"));
  m.def("reference_scenario", &reference_scenario, py::arg("flight_duration") = 160.0);
  m.def("dbm_to_watt", &dbm_to_watt);
  m.def("db_to_linear", &db_to_linear);

  m.def(
      "worst_case_dist_sq",
      [](std::pair<double, double> uav, const EveRegion& e, double h) {
        return worst_case_dist_sq(to_vec(uav), e, h);
      },
      py::arg("uav_xy"), py::arg("eve"), py::arg("altitude"));
  m.def(
      "worst_case_dist_sq_oracle",
      [](std::pair<double, double> uav, const EveRegion& e, double h, std::size_t n,
         std::uint64_t seed) { return worst_case_dist_sq_oracle(to_vec(uav), e, h, n, seed); },
      py::arg("uav_xy"), py::arg("eve"), py::arg("altitude"), py::arg("n_samples"),
      py::arg("seed") = 0);
  m.def(
      "rate_bob",
      [](std::pair<double, double> uav, double h, double g, double p) {
        return rate_bob(to_vec(uav), h, g, p);
      },
      py::arg("uav_xy"), py::arg("altitude"), py::arg("gamma0"), py::arg("power"));
  m.def(
      "worst_case_rate_eves",
      [](std::pair<double, double> uav, const std::vector<EveRegion>& eves, double h, double g,
         double p) { return worst_case_rate_eves(to_vec(uav), eves, h, g, p); },
      py::arg("uav_xy"), py::arg("eves"), py::arg("altitude"), py::arg("gamma0"),
      py::arg("power"));
  m.def("avg_worst_case_secrecy_rate", &avg_worst_case_secrecy_rate, py::arg("trajectory"),
        py::arg("power"), py::arg("scenario"));
  m.def("smoothed_objective", &smoothed_objective, py::arg("trajectory"), py::arg("power"),
        py::arg("scenario"));

  py::class_<PowerDual>(m, "PowerDual")
      .def_readonly("lam", &PowerDual::lambda)
      .def_readonly("schedule", &PowerDual::schedule)
      .def_readonly("avg_used", &PowerDual::avg_used)
      .def_readonly("iterations", &PowerDual::iterations);
  m.def("power_for_dual", &power_for_dual, py::arg("alpha"), py::arg("beta"), py::arg("lam"),
        py::arg("peak"));
  m.def(
      "optimize_power",
      [](const std::vector<double>& a, const std::vector<double>& b, double avg, double peak) {
        return optimize_power(a, b, avg, peak);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("avg_power"), py::arg("peak_power"));

  m.def("exact_c", &exact_c);
  m.def("linearized_c", &linearized_c);
  m.def("psd_check", &psd_check, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"));

  // Convex program, exposed read-only for inspection and cross-checking.
  py::class_<cvx::Affine>(m, "Affine")
      .def_property_readonly("terms",
                             [](const cvx::Affine& a) {
                               std::vector<std::pair<std::size_t, double>> out;
                               for (const auto& t : a.terms) out.emplace_back(t.var, t.coef);
                               return out;
                             })
      .def_readonly("constant", &cvx::Affine::constant)
      .def("eval", [](const cvx::Affine& a, const std::vector<double>& z) { return a.eval(z); });
  py::class_<cvx::NormBound>(m, "NormBound")
      .def_readonly("parts", &cvx::NormBound::parts)
      .def_readonly("rhs", &cvx::NormBound::rhs);
  py::class_<cvx::RotatedCone>(m, "RotatedCone")
      .def_readonly("a", &cvx::RotatedCone::a)
      .def_readonly("d", &cvx::RotatedCone::d)
      .def_readonly("parts", &cvx::RotatedCone::parts);
  py::class_<cvx::ConvexProgram>(m, "ConvexProgram")
      .def_readonly("num_vars", &cvx::ConvexProgram::num_vars)
      .def_readonly("linear", &cvx::ConvexProgram::linear)
      .def_readonly("constant", &cvx::ConvexProgram::constant)
      .def_property_readonly("log_terms",
                             [](const cvx::ConvexProgram& p) {
                               std::vector<std::pair<std::size_t, double>> out;
                               for (const auto& t : p.log_terms) out.emplace_back(t.var, t.kappa);
                               return out;
                             })
      .def_property_readonly("linear_cons",
                             [](const cvx::ConvexProgram& p) {
                               std::vector<cvx::Affine> out;
                               for (const auto& c : p.linear_cons) out.push_back(c.expr);
                               return out;
                             })
      .def_readonly("norm_cons", &cvx::ConvexProgram::norm_cons)
      .def_readonly("cones", &cvx::ConvexProgram::cones)
      .def_readonly("initial", &cvx::ConvexProgram::initial)
      .def("objective",
           [](const cvx::ConvexProgram& p, const std::vector<double>& z) { return p.objective(z); })
      .def("max_violation", [](const cvx::ConvexProgram& p, const std::vector<double>& z) {
        return p.max_violation(z);
      });
  py::class_<cvx::SolverResult>(m, "SolverResult")
      .def_readonly("z", &cvx::SolverResult::z)
      .def_readonly("objective", &cvx::SolverResult::objective)
      .def_property_readonly("status",
                             [](const cvx::SolverResult& r) { return cvx::to_string(r.status); })
      .def_readonly("primal_residual", &cvx::SolverResult::primal_residual)
      .def_readonly("stationarity", &cvx::SolverResult::stationarity)
      .def_readonly("gap", &cvx::SolverResult::gap);
  m.def(
      "assemble",
      [](const Trajectory& t, const PowerSchedule& p, const Scenario& s) {
        return assemble(t, initialize_slacks(t, s).u, p, s).program;
      },
      py::arg("trajectory"), py::arg("power"), py::arg("scenario"),
      "Convex trajectory step around `trajectory`, lengths divided by the altitude.");
  m.def(
      "solve_program", [](const cvx::ConvexProgram& p) { return cvx::solve(p); },
      py::arg("program"), py::call_guard<py::gil_scoped_release>());

  py::class_<SubproblemSolution>(m, "StepResult")
      .def_readonly("trajectory", &SubproblemSolution::trajectory)
      .def_readonly("surrogate_objective", &SubproblemSolution::surrogate_objective)
      .def_readonly("true_objective", &SubproblemSolution::true_objective)
      .def_readonly("expansion_objective", &SubproblemSolution::expansion_objective)
      .def_property_readonly("status",
                             [](const SubproblemSolution& r) { return to_string(r.status); });
  m.def(
      "solve_step",
      [](const Trajectory& t, const PowerSchedule& p, const Scenario& s) {
        return solve_step(t, p, s);
      },
      py::arg("trajectory"), py::arg("power"), py::arg("scenario"),
      py::call_guard<py::gil_scoped_release>());

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("iter", &IterationRecord::iter)
      .def_readonly("objective", &IterationRecord::objective)
      .def_property_readonly("status", [](const IterationRecord& r) { return to_string(r.status); });
  py::class_<PlanResult>(m, "PlanResult")
      .def_property_readonly("algorithm",
                             [](const PlanResult& r) { return to_string(r.algorithm); })
      .def_readonly("trajectory", &PlanResult::trajectory)
      .def_readonly("power", &PlanResult::power)
      .def_readonly("iterations", &PlanResult::iterations)
      .def_readonly("secrecy_rate", &PlanResult::secrecy_rate)
      .def_readonly("converged", &PlanResult::converged)
      .def_readonly("message", &PlanResult::message);

  m.def("best_effort_trajectory", &best_effort_trajectory, py::arg("scenario"));
  m.def("equal_power", &equal_power, py::arg("scenario"));
  m.def(
      "run",
      [](const Scenario& s, const std::string& algorithm, std::size_t max_iters) {
        PlanOptions o;
        o.max_iters = max_iters;
        return run_algorithm(parse_algorithm(algorithm), s, o);
      },
      py::arg("scenario"), py::arg("algorithm") = "robust", py::arg("max_iters") = 0,
      py::call_guard<py::gil_scoped_release>(),
      "Run 'robust', 'non-robust' or 'best-effort' on a scenario.");

  m.def(
      "load_scenario", [](const std::filesystem::path& p) { return harness::load_scenario(p); },
      py::arg("path"));
  m.def(
      "parse_scenario",
      [](const std::string& text) { return harness::parse_scenario(text).scenario; },
      py::arg("text"));
  m.def(
      "sweep",
      [](const Scenario& base, const std::string& param, std::vector<double> values,
         const std::vector<std::string>& algorithms, std::size_t threads) {
        harness::SweepSpec spec;
        spec.base = base;
        spec.param = harness::parse_sweep_param(param);
        spec.values = std::move(values);
        for (const auto& a : algorithms) spec.algorithms.push_back(parse_algorithm(a));
        std::vector<py::dict> out;
        std::vector<harness::SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = harness::sweep(spec, {}, threads);
        }
        for (const auto& r : rows) {
          py::dict d;
          d["param"] = harness::to_string(r.param);
          d["value"] = r.value;
          d["algorithm"] = to_string(r.algorithm);
          d["secrecy_rate"] = r.secrecy_rate;
          d["iters"] = r.iters;
          d["converged"] = r.converged;
          out.push_back(d);
        }
        return out;
      },
      py::arg("scenario"), py::arg("param"), py::arg("values"),
      py::arg("algorithms") = std::vector<std::string>{"robust", "non-robust", "best-effort"},
      py::arg("threads") = 0);

  m.def(
      "verify",
      [](const std::string& level, std::uint64_t seed) {
        if (level != "quick" && level != "full") throw py::value_error("level must be quick or full");
        std::vector<std::vector<verify::CheckResult>> holder(1);
        {
          py::gil_scoped_release release;
          holder[0] = verify::run_all(level == "full" ? verify::Level::full : verify::Level::quick,
                                      seed);
        }
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const auto& r : holder[0]) out.emplace_back(r.name, r.passed, r.detail);
        return out;
      },
      py::arg("level") = "quick", py::arg("seed") = 1);
}
