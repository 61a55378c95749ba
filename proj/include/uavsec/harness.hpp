#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "uavsec/planner.hpp"
#include "uavsec/scenario.hpp"

namespace uavsec::harness {

/// A scenario as read from disk. Coordinates inside `scenario` are relative
/// to the receiver; `bob_xy` is the receiver position in the file's frame
/// (zero unless the file sets "bob_xy").
struct ScenarioFile {
  Scenario scenario;
  Vec2 bob_xy;
};

/// Parses a scenario document. Keys are the Scenario field names, with
/// "gamma0_db" in place of gamma0 and points written as [x, y]. n_slots,
/// epsilon, max_iters and bob_xy are optional. Throws std::invalid_argument
/// naming the offending field, or carrying the validation messages.
ScenarioFile parse_scenario(std::string_view text, const std::string& source = "<string>");
ScenarioFile load_scenario_file(const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

/// Inverse of parse_scenario (gamma0 written back in dB).
std::string scenario_to_json(const Scenario& scenario, Vec2 bob_xy = {});

enum class SweepParam { flight_duration, avg_power_dbm };

/// "T" or "avg-power-dbm".
const char* to_string(SweepParam param);
SweepParam parse_sweep_param(const std::string& name);

struct SweepSpec {
  Scenario base;
  SweepParam param = SweepParam::flight_duration;
  std::vector<double> values;
  std::vector<Algorithm> algorithms;
  /// Only used by sampling oracles; the planners are deterministic.
  std::uint64_t seed = 0;
};

/// The scenario of one sweep point. Power sweeps keep the base scenario's
/// peak-to-average ratio.
Scenario sweep_point(const SweepSpec& spec, double value);

struct SweepRow {
  SweepParam param = SweepParam::flight_duration;
  double value = 0.0;
  Algorithm algorithm = Algorithm::robust;
  double secrecy_rate = 0.0;
  std::size_t iters = 0;
  double wall_ms = 0.0;
  bool converged = false;
};

/// PLANNER_THREADS if set to a positive integer, else the core count.
std::size_t default_threads();

/// Runs every (value, algorithm) pair, in parallel over `threads` workers
/// (0 means default_threads()). Rows come back sorted by value, then by
/// the order of spec.algorithms. Throws on an empty sweep or an invalid
/// sweep point before any work starts.
std::vector<SweepRow> sweep(const SweepSpec& spec, const PlanOptions& options = {},
                            std::size_t threads = 0);

/// Shortest "%.12g" rendering used in every CSV file.
std::string format_number(double value);

struct ExportOptions {
  /// Write measured wall times; otherwise the wall_ms columns are left
  /// empty so repeated runs produce identical bytes.
  bool timing = false;
  /// Added to every exported position.
  Vec2 origin;
};

/// Writes trajectory.csv, power.csv, iterations.csv and summary.json.
void export_plan(const PlanResult& result, const Scenario& scenario,
                 const std::filesystem::path& dir, const ExportOptions& options = {});

/// Writes sweep.csv.
void export_sweep(const std::vector<SweepRow>& rows, const std::filesystem::path& dir,
                  const ExportOptions& options = {});

/// Command line entry point: optimize, sweep and verify subcommands.
/// Errors are written to `err` as a one-line JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uavsec::harness
