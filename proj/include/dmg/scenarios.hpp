#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmg/del.hpp"

namespace dmg {

/// Malformed configuration. line is 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line, std::string field)
      : std::runtime_error(what), line(line), field(std::move(field)) {}
  int line;
  std::string field;
};

/// Solver error at a given step of a scenario run; kind names the underlying error type.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(int step, std::string kind, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + kind + ": " + what),
        step(step), kind(std::move(kind)) {}
  int step;
  std::string kind;
};

/// Scenario configuration (INI sections [scenario], [lagrangian], [initial], [tolerances],
/// [check]). entries holds the canonical "section.key" -> value text, which is what gets
/// embedded into trajectory files.
struct ScenarioConfig {
  std::string scenario = "sl2c";  ///< sl2c | trivial_groupoid | custom
  std::string groupoid;           ///< custom only
  std::string lagrangian;
  std::map<std::string, std::vector<double>> params;
  std::map<std::string, std::vector<double>> initial;
  int steps = 10;
  std::uint64_t seed = 1;
  std::string out;
  std::string report;
  double newton_tol = 1e-10;
  double oracle_tol = 1e-6;
  double formula_tol = 1e-7;
  double phi_tol = 1e-6;
  int samples = 1000;
  double axiom_tol = 1e-9;

  std::map<std::string, std::string> entries;

  void validate() const;
  /// Sets a "section.key" entry and the typed field behind it.
  void set(const std::string& key, const std::string& value, int line = 0);
  std::string to_ini() const;
};

ScenarioConfig parse_config(std::istream& in);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Trajectory file contents: embedded config plus a numeric table with named columns.
struct TrajectoryTable {
  std::map<std::string, std::string> config;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;
  std::vector<double> get(const std::string& name) const;
};

/// CSV with '#' metadata lines; reals written with 17 significant digits.
void write_table(std::ostream& out, const TrajectoryTable& t);
TrajectoryTable read_table(std::istream& in);

struct RunReport {
  std::string scenario;
  std::vector<double> residual_norms;  ///< primary trajectory, one per junction
  double residual_max = 0.0;
  double oracle_max = 0.0;
  double momentum_defect = -1.0;       ///< negative when not applicable
  std::map<std::string, double> diagnostics;
  std::vector<std::pair<std::string, bool>> verdicts;
  double wall_seconds = 0.0;
  bool pass = true;

  std::string summary() const;
  std::string to_json() const;
};

struct ScenarioResult {
  TrajectoryTable table;
  RunReport report;
};

/// Matched DEL on (M x G) |x| (M x M) and direct DEL on M x G x M, cross-checked through Phi.
ScenarioResult run_trivial_groupoid(const ScenarioConfig& cfg);
/// Matched group DEL on SU(2) x K, with the closed-form residual checked at every step.
ScenarioResult run_sl2c(const ScenarioConfig& cfg);
/// Single descriptor with a chart Lagrangian.
ScenarioResult run_custom(const ScenarioConfig& cfg);
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Rebuilds every derived column from the coordinates stored in t and reports the
/// largest difference against the stored values, together with a fresh report.
struct Recheck {
  TrajectoryTable recomputed;
  RunReport report;
  double max_difference = 0.0;
};
Recheck recheck_table(const TrajectoryTable& t);

/// Explicit R^3 form of the SU(2) x K residual at junction (x_k, x_{k+1}), x = (quaternion | a b c).
Vec sl2c_closed_residual(const DiscreteLagrangian& L, const Vec& xk, const Vec& xk1);
/// The trivial-groupoid residual written with d_1..d_4 derivatives in (m, theta; p, n) coordinates.
Vec trivial_derived_residual(const DiscreteLagrangian& L, const Vec& xk, const Vec& xk1);

struct SuiteResult {
  std::string name;
  AxiomReport report;
};
std::vector<SuiteResult> run_axiom_suites(const ScenarioConfig& cfg);

}  // namespace dmg
