// dmg: run discrete Euler-Lagrange scenarios and verify their outputs.
//
//   dmg run <config> [--seed N] [--steps N] [--out FILE] [--tol X] [--json FILE]
//   dmg check axioms <config> [--seed N] [--samples N] [--tol X]
//   dmg check residual <trajectory> [--tol X]
//   dmg export <trajectory> [--format json|csv] [--out FILE]
//   dmg export --template sl2c|trivial_groupoid|custom
//
// Exit status: 0 pass, 1 verification failure, 2 usage or configuration error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dmg/errors.hpp"
#include "dmg/scenarios.hpp"

using namespace dmg;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Options {
  std::string config;
  std::string positional;
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  std::optional<int> samples;
  std::optional<double> tol;
  std::string out;
  std::string json;
  std::string format = "json";
  std::string templ;
};

std::string template_for(const std::string& id) {
  if (id == "sl2c")
    return "[scenario]\nid = sl2c\nsteps = 10\nseed = 1\nout = sl2c.csv\n\n"
           "[lagrangian]\nname = sl2c_quadratic\nwa = 1.0 1.5 2.0\nwb = 1.0 1.0 1.0\nkappa = 0.2\n\n"
           "[initial]\n; omit a or b to draw them from the seed\na = 0.2 -0.1 0.3\nb = 0.1 0.2 0.05\n\n"
           "[tolerances]\nnewton = 1e-10\noracle = 1e-6\nformula = 1e-7\n";
  if (id == "trivial_groupoid")
    return "[scenario]\nid = trivial_groupoid\nsteps = 10\nseed = 1\nout = trivial.csv\n\n"
           "[lagrangian]\nname = trivial_quadratic\nw = 1\nkappa = -0.2\n\n"
           "[initial]\nm = 1 0\ntheta = 0.3\nn = 1.2 0.4\n\n"
           "[tolerances]\nnewton = 1e-10\noracle = 1e-6\nformula = 1e-7\nphi = 1e-6\n";
  if (id == "custom")
    return "[scenario]\nid = custom\ngroupoid = so3\nsteps = 20\nseed = 1\n\n"
           "[lagrangian]\nname = moser_veselov\nj = 1 2 3.5\n";
  throw ConfigError("unknown template '" + id + "'", 0, "template");
}

ScenarioConfig load(const Options& o) {
  const std::string path = o.config.empty() ? o.positional : o.config;
  if (path.empty()) throw ConfigError("a configuration file is required", 0, "config");
  ScenarioConfig c = load_config(path);
  if (o.seed) c.set("scenario.seed", std::to_string(*o.seed));
  if (o.steps) c.set("scenario.steps", std::to_string(*o.steps));
  if (o.samples) c.set("check.samples", std::to_string(*o.samples));
  if (!o.out.empty()) c.out = o.out;
  if (!o.json.empty()) c.report = o.json;
  c.validate();
  return c;
}

std::string real(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

TrajectoryTable read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open trajectory file '" + path + "'", 0, "trajectory");
  return read_table(f);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'", 0, "out");
  f << text;
}

int cmd_run(const Options& o) {
  ScenarioConfig c = load(o);
  if (o.tol) c.set("tolerances.newton", real(*o.tol));
  const auto r = run_scenario(c);
  std::ostringstream table;
  write_table(table, r.table);
  if (c.out.empty()) {
    std::cout << table.str();
  } else {
    write_text(c.out, table.str());
    std::cout << "wrote " << c.out << "\n";
  }
  if (!c.report.empty()) write_text(c.report, r.report.to_json() + "\n");
  std::cerr << r.report.summary() << "wall-clock " << r.report.wall_seconds << " s\n";
  return r.report.pass ? kPass : kFail;
}

int cmd_check_axioms(const Options& o) {
  ScenarioConfig c = load(o);
  if (o.tol) c.set("check.tol", real(*o.tol));
  bool ok = true;
  for (const auto& s : run_axiom_suites(c)) {
    std::cout << (s.report.pass ? "[pass] " : "[FAIL] ") << s.name << "\n" << s.report.summary() << "\n";
    ok = ok && s.report.pass;
  }
  return ok ? kPass : kFail;
}

int cmd_check_residual(const Options& o) {
  if (o.positional.empty()) throw ConfigError("a trajectory file is required", 0, "trajectory");
  TrajectoryTable t = read_file(o.positional);
  if (o.tol) t.config["tolerances.newton"] = real(*o.tol);
  const auto re = recheck_table(t);
  const bool same = re.max_difference <= 1e-12;
  std::cout << re.report.summary();
  std::cout << "  [" << (same ? "pass" : "FAIL") << "] recorded values reproduced (max difference "
            << re.max_difference << ")\n";
  return same && re.report.pass ? kPass : kFail;
}

int cmd_export(const Options& o) {
  std::string text;
  if (!o.templ.empty()) {
    text = template_for(o.templ);
  } else {
    if (o.positional.empty()) throw ConfigError("a trajectory file or --template is required", 0, "trajectory");
    const TrajectoryTable t = read_file(o.positional);
    if (o.format == "csv") {
      std::ostringstream os;
      write_table(os, t);
      text = os.str();
    } else {
      const auto re = recheck_table(t);
      nlohmann::json j;
      j["config"] = t.config;
      j["columns"] = t.columns;
      j["rows"] = t.rows;
      j["report"] = nlohmann::json::parse(re.report.to_json());
      text = j.dump(2) + "\n";
    }
  }
  if (o.out.empty())
    std::cout << text;
  else
    write_text(o.out, text);
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Euler-Lagrange dynamics on Lie groups, groupoids and their matched pairs"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* s) {
    s->add_option("--seed", o.seed, "Seed for random initial data and sampled suites");
    s->add_option("--tol", o.tol, "Tolerance override");
  };

  auto* run = app.add_subcommand("run", "Solve a scenario and write its trajectory");
  run->add_option("file", o.positional, "Configuration file");
  run->add_option("--config", o.config, "Configuration file");
  run->add_option("--steps", o.steps, "Number of arrows");
  run->add_option("--out", o.out, "Trajectory output (CSV)");
  run->add_option("--json", o.json, "Report output (JSON)");
  common(run);

  auto* check = app.add_subcommand("check", "Verification suites");
  check->require_subcommand(1);
  auto* axioms = check->add_subcommand("axioms", "Group, groupoid and matched-pair law suites");
  axioms->add_option("file", o.positional, "Configuration file");
  axioms->add_option("--config", o.config, "Configuration file");
  axioms->add_option("--samples", o.samples, "Samples per suite");
  common(axioms);
  auto* residual = check->add_subcommand("residual", "Recompute residuals and oracle from a trajectory file");
  residual->add_option("trajectory", o.positional, "Trajectory file")->required();
  residual->add_option("--tol", o.tol, "Residual bound override");

  auto* exp = app.add_subcommand("export", "Convert a trajectory file or print a configuration template");
  exp->add_option("trajectory", o.positional, "Trajectory file");
  exp->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  exp->add_option("--out", o.out, "Output file");
  exp->add_option("--template", o.templ, "Scenario id for a configuration template");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (axioms->parsed()) return cmd_check_axioms(o);
    if (residual->parsed()) return cmd_check_residual(o);
    if (exp->parsed()) return cmd_export(o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
