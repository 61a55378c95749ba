#include "uavsec/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "uavsec/geometry.hpp"
#include "uavsec/verify.hpp"

namespace uavsec::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kRequired = {"altitude",   "flight_duration", "slot_len",
                                            "v_max",      "start_xy",        "end_xy",
                                            "avg_power",  "peak_power",      "gamma0_db",
                                            "eves"};
const std::vector<std::string> kOptional = {"n_slots", "epsilon", "max_iters", "bob_xy"};

[[noreturn]] void field_error(const std::string& source, const std::string& field,
                              const std::string& what) {
  throw std::invalid_argument(source + ": field '" + field + "': " + what);
}

double get_number(const json& j, const std::string& source, const std::string& field) {
  if (!j.is_number()) field_error(source, field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) field_error(source, field, "expected a finite number");
  return v;
}

std::size_t get_count(const json& j, const std::string& source, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    field_error(source, field, "expected a non-negative integer");
  return j.get<std::size_t>();
}

Vec2 get_point(const json& j, const std::string& source, const std::string& field) {
  if (!j.is_array() || j.size() != 2) field_error(source, field, "expected [x, y]");
  return {get_number(j[0], source, field + "[0]"), get_number(j[1], source, field + "[1]")};
}

EveRegion get_eve(const json& j, const std::string& source, const std::string& field) {
  if (!j.is_object()) field_error(source, field, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "center_x" && key != "center_y" && key != "radius")
      field_error(source, field + "." + key, "unknown key");
  }
  EveRegion e;
  for (const char* key : {"center_x", "center_y", "radius"}) {
    if (!j.contains(key)) field_error(source, field + "." + key, "missing");
  }
  e.center_x = get_number(j["center_x"], source, field + ".center_x");
  e.center_y = get_number(j["center_y"], source, field + ".center_y");
  e.radius = get_number(j["radius"], source, field + ".radius");
  return e;
}

void write_atomically(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || used == 0 || !std::isfinite(v))
    throw std::invalid_argument("not a number: '" + text + "'");
  return v;
}

std::string error_json(const std::string& command, const std::string& message) {
  return json{{"error", message}, {"command", command}}.dump();
}

}  // namespace

ScenarioFile parse_scenario(std::string_view text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(source + ": " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument(source + ": expected a JSON object");

  for (const auto& [key, value] : j.items()) {
    if (std::find(kRequired.begin(), kRequired.end(), key) == kRequired.end() &&
        std::find(kOptional.begin(), kOptional.end(), key) == kOptional.end())
      field_error(source, key, "unknown key");
  }
  for (const auto& key : kRequired) {
    if (!j.contains(key)) field_error(source, key, "missing");
  }

  ScenarioFile out;
  Scenario& s = out.scenario;
  s.altitude = get_number(j["altitude"], source, "altitude");
  s.flight_duration = get_number(j["flight_duration"], source, "flight_duration");
  s.slot_len = get_number(j["slot_len"], source, "slot_len");
  s.v_max = get_number(j["v_max"], source, "v_max");
  s.start_xy = get_point(j["start_xy"], source, "start_xy");
  s.end_xy = get_point(j["end_xy"], source, "end_xy");
  s.avg_power = get_number(j["avg_power"], source, "avg_power");
  s.peak_power = get_number(j["peak_power"], source, "peak_power");
  s.gamma0 = db_to_linear(get_number(j["gamma0_db"], source, "gamma0_db"));

  const json& eves = j["eves"];
  if (!eves.is_array()) field_error(source, "eves", "expected an array");
  for (std::size_t k = 0; k < eves.size(); ++k)
    s.eves.push_back(get_eve(eves[k], source, "eves[" + std::to_string(k) + "]"));

  if (j.contains("epsilon")) s.epsilon = get_number(j["epsilon"], source, "epsilon");
  if (j.contains("max_iters")) s.max_iters = get_count(j["max_iters"], source, "max_iters");
  if (j.contains("n_slots")) {
    s.n_slots = get_count(j["n_slots"], source, "n_slots");
  } else {
    try {
      s.n_slots = slot_count(s.flight_duration, s.slot_len);
    } catch (const std::invalid_argument& e) {
      field_error(source, "flight_duration", e.what());
    }
  }

  if (j.contains("bob_xy")) {
    out.bob_xy = get_point(j["bob_xy"], source, "bob_xy");
    s.start_xy = {s.start_xy.x - out.bob_xy.x, s.start_xy.y - out.bob_xy.y};
    s.end_xy = {s.end_xy.x - out.bob_xy.x, s.end_xy.y - out.bob_xy.y};
    for (auto& e : s.eves) {
      e.center_x -= out.bob_xy.x;
      e.center_y -= out.bob_xy.y;
    }
  }

  try {
    require_valid(s);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(source + ": " + e.what());
  }
  return out;
}

ScenarioFile load_scenario_file(const fs::path& path) {
  return parse_scenario(read_file(path), path.string());
}

Scenario load_scenario(const fs::path& path) { return load_scenario_file(path).scenario; }

std::string scenario_to_json(const Scenario& s, Vec2 bob) {
  json eves = json::array();
  for (const auto& e : s.eves)
    eves.push_back({{"center_x", e.center_x + bob.x},
                    {"center_y", e.center_y + bob.y},
                    {"radius", e.radius}});
  json j = {{"altitude", s.altitude},
            {"flight_duration", s.flight_duration},
            {"slot_len", s.slot_len},
            {"n_slots", s.n_slots},
            {"v_max", s.v_max},
            {"start_xy", {s.start_xy.x + bob.x, s.start_xy.y + bob.y}},
            {"end_xy", {s.end_xy.x + bob.x, s.end_xy.y + bob.y}},
            {"avg_power", s.avg_power},
            {"peak_power", s.peak_power},
            {"gamma0_db", 10.0 * std::log10(s.gamma0)},
            {"eves", eves},
            {"epsilon", s.epsilon},
            {"max_iters", s.max_iters}};
  if (bob.x != 0.0 || bob.y != 0.0) j["bob_xy"] = {bob.x, bob.y};
  return j.dump(2);
}

const char* to_string(SweepParam param) {
  return param == SweepParam::flight_duration ? "T" : "avg-power-dbm";
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "T" || name == "flight_duration") return SweepParam::flight_duration;
  if (name == "avg-power-dbm" || name == "avg_power_dbm") return SweepParam::avg_power_dbm;
  throw std::invalid_argument("unknown sweep parameter '" + name + "' (expected T or avg-power-dbm)");
}

Scenario sweep_point(const SweepSpec& spec, double value) {
  if (spec.param == SweepParam::flight_duration) return with_duration(spec.base, value);
  Scenario s = spec.base;
  const double ratio = s.peak_power / s.avg_power;
  s.avg_power = dbm_to_watt(value);
  s.peak_power = ratio * s.avg_power;
  return s;
}

std::size_t default_threads() {
  if (const char* env = std::getenv("PLANNER_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRow> sweep(const SweepSpec& spec, const PlanOptions& options,
                            std::size_t threads) {
  if (spec.values.empty()) throw std::invalid_argument("sweep: no values given");
  if (spec.algorithms.empty()) throw std::invalid_argument("sweep: no algorithms given");

  std::vector<double> values = spec.values;
  std::sort(values.begin(), values.end());
  std::vector<Scenario> points;
  for (const double v : values) {
    Scenario s;
    try {
      s = sweep_point(spec, v);
      require_valid(s);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("sweep point " + std::string(to_string(spec.param)) + "=" +
                                  format_number(v) + ": " + e.what());
    }
    points.push_back(std::move(s));
  }

  const std::size_t n_alg = spec.algorithms.size();
  std::vector<SweepRow> rows(points.size() * n_alg);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        const std::size_t p = i / n_alg;
        const Algorithm alg = spec.algorithms[i % n_alg];
        const auto started = std::chrono::steady_clock::now();
        const PlanResult r = run_algorithm(alg, points[p], options);
        SweepRow& row = rows[i];
        row.param = spec.param;
        row.value = values[p];
        row.algorithm = alg;
        row.secrecy_rate = r.secrecy_rate;
        row.iters = r.iterations.empty() ? 0 : r.iterations.size() - 1;
        row.converged = r.converged;
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                started)
                          .count();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  if (threads == 0) threads = default_threads();
  threads = std::min(threads, rows.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);
  return buf;
}

void export_plan(const PlanResult& result, const Scenario& scenario, const fs::path& dir,
                 const ExportOptions& options) {
  fs::create_directories(dir);

  std::string traj = "slot,x_m,y_m\n";
  for (std::size_t i = 0; i < result.trajectory.size(); ++i) {
    traj += std::to_string(i) + ',' + format_number(result.trajectory.xs[i] + options.origin.x) +
            ',' + format_number(result.trajectory.ys[i] + options.origin.y) + '\n';
  }
  write_atomically(dir / "trajectory.csv", traj);

  std::string power = "slot,p_watt\n";
  for (std::size_t i = 0; i < result.power.p.size(); ++i)
    power += std::to_string(i + 1) + ',' + format_number(result.power.p[i]) + '\n';
  write_atomically(dir / "power.csv", power);

  std::string iters = "iter,objective,status,wall_ms\n";
  for (const auto& r : result.iterations) {
    iters += std::to_string(r.iter) + ',' + format_number(r.objective) + ',' + to_string(r.status) +
             ',' + (options.timing ? format_number(r.wall_ms) : std::string()) + '\n';
  }
  write_atomically(dir / "iterations.csv", iters);

  json summary = {
      {"algorithm", to_string(result.algorithm)},
      {"secrecy_rate_bps_hz", result.secrecy_rate},
      {"objective", smoothed_objective(result.trajectory, result.power, scenario)},
      {"converged", result.converged},
      {"iterations", result.iterations.empty() ? 0 : result.iterations.size() - 1},
      {"n_slots", scenario.n_slots},
      {"flight_duration", scenario.flight_duration},
      {"avg_power", scenario.avg_power},
      {"message", result.message}};
  if (options.timing) {
    double total = 0.0;
    for (const auto& r : result.iterations) total += r.wall_ms;
    summary["wall_ms"] = total;
  }
  write_atomically(dir / "summary.json", summary.dump(2) + "\n");
}

void export_sweep(const std::vector<SweepRow>& rows, const fs::path& dir,
                  const ExportOptions& options) {
  fs::create_directories(dir);
  std::string out = "param,value,algorithm,secrecy_rate_bps_hz,iters,wall_ms\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.param)) + ',' + format_number(r.value) + ',' +
           to_string(r.algorithm) + ',' + format_number(r.secrecy_rate) + ',' +
           std::to_string(r.iters) + ',' + (options.timing ? format_number(r.wall_ms) : "") + '\n';
  }
  write_atomically(dir / "sweep.csv", out);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust UAV trajectory and power planner"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::string algorithm_name = "robust";
  std::size_t max_iters = 0;
  bool timing = false;

  auto* opt_cmd = app.add_subcommand("optimize", "Plan one trajectory and power schedule");
  opt_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  opt_cmd->add_option("--algorithm", algorithm_name, "robust, non-robust or best-effort");
  opt_cmd->add_option("--out", out_dir, "Output directory")->required();
  opt_cmd->add_option("--max-iters", max_iters, "Override the scenario's max_iters");
  opt_cmd->add_flag("--timing", timing, "Record wall times in the output");

  std::string param_name;
  std::string values_text;
  std::string algorithms_text = "robust,non-robust,best-effort";
  std::size_t threads = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep flight duration or average power");
  sweep_cmd->add_option("--scenario", scenario_path, "Base scenario JSON file")->required();
  sweep_cmd->add_option("--param", param_name, "T or avg-power-dbm")->required();
  sweep_cmd->add_option("--values", values_text, "Comma separated values")->required();
  sweep_cmd->add_option("--algorithms", algorithms_text, "Comma separated algorithms");
  sweep_cmd->add_option("--out", out_dir, "Output directory")->required();
  sweep_cmd->add_option("--threads", threads, "Worker threads (default PLANNER_THREADS or cores)");
  sweep_cmd->add_option("--max-iters", max_iters, "Override the scenario's max_iters");
  sweep_cmd->add_flag("--timing", timing, "Record wall times in the output");

  std::string level = "quick";
  std::uint64_t seed = 1;
  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle checks");
  verify_cmd->add_option("--level", level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));
  verify_cmd->add_option("--seed", seed, "Seed for the sampling oracles");

  std::string command = argc > 1 ? argv[1] : "";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << error_json(command, e.what()) << '\n';
    return 2;
  }

  try {
    PlanOptions options;
    options.max_iters = max_iters;
    ExportOptions export_options;
    export_options.timing = timing;

    if (*opt_cmd) {
      const ScenarioFile file = load_scenario_file(scenario_path);
      export_options.origin = file.bob_xy;
      const PlanResult result = run_algorithm(parse_algorithm(algorithm_name), file.scenario, options);
      export_plan(result, file.scenario, out_dir, export_options);
      out << to_string(result.algorithm) << ": secrecy rate " << format_number(result.secrecy_rate)
          << " bps/Hz, " << (result.iterations.empty() ? 0 : result.iterations.size() - 1)
          << " iterations" << (result.converged ? "" : " (not converged)") << '\n';
      return 0;
    }

    if (*sweep_cmd) {
      SweepSpec spec;
      spec.base = load_scenario(scenario_path);
      spec.param = parse_sweep_param(param_name);
      for (const auto& v : split_list(values_text)) spec.values.push_back(parse_double(v));
      for (const auto& a : split_list(algorithms_text)) spec.algorithms.push_back(parse_algorithm(a));
      const auto rows = sweep(spec, options, threads);
      export_sweep(rows, out_dir, export_options);
      for (const auto& r : rows) {
        out << to_string(r.param) << '=' << format_number(r.value) << ' ' << to_string(r.algorithm)
            << ": " << format_number(r.secrecy_rate) << '\n';
      }
      return 0;
    }

    const auto results =
        verify::run_all(level == "full" ? verify::Level::full : verify::Level::quick, seed);
    bool ok = true;
    for (const auto& r : results) {
      out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
      ok = ok && r.passed;
    }
    if (!ok) {
      err << error_json(command, "oracle checks failed") << '\n';
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    err << error_json(command, e.what()) << '\n';
    return 1;
  }
}

}  // namespace uavsec::harness
