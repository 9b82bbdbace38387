#include "dmg/scenarios.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dmg/errors.hpp"

namespace dmg {

namespace {

// ---- config schema ----

enum class Kind { Text, Int, Real, Reals };

std::optional<Kind> kind_of(const std::string& section, const std::string& key) {
  static const std::map<std::string, Kind> fixed{
      {"scenario.id", Kind::Text},         {"scenario.groupoid", Kind::Text},
      {"scenario.steps", Kind::Int},       {"scenario.seed", Kind::Int},
      {"scenario.out", Kind::Text},        {"scenario.report", Kind::Text},
      {"lagrangian.name", Kind::Text},     {"tolerances.newton", Kind::Real},
      {"tolerances.oracle", Kind::Real},   {"tolerances.formula", Kind::Real},
      {"tolerances.phi", Kind::Real},      {"check.samples", Kind::Int},
      {"check.tol", Kind::Real}};
  const auto it = fixed.find(section + "." + key);
  if (it != fixed.end()) return it->second;
  if (section == "lagrangian" || section == "initial") return Kind::Reals;
  return std::nullopt;
}

[[noreturn]] void fail(int line, const std::string& field, const std::string& msg) {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  os << "field '" << field << "': " << msg;
  throw ConfigError(os.str(), line, field);
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(cur), cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_real(const std::string& s, int line, const std::string& field) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(line, field, "expected a real number, got '" + s + "'");
  }
  if (used != s.size()) fail(line, field, "expected a real number, got '" + s + "'");
  return v;
}

long long to_int(const std::string& s, int line, const std::string& field) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    fail(line, field, "expected an integer, got '" + s + "'");
  }
  if (used != s.size()) fail(line, field, "expected an integer, got '" + s + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"'");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"'");
  return s.substr(b, e - b + 1);
}

/// Line of `key` inside `[section]`, or 0.
int find_line(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line, current;
  for (int n = 1; std::getline(in, line); ++n) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[') {
      current = trim(t.substr(1, t.find(']') - 1));
      continue;
    }
    const auto eq = t.find('=');
    if (eq != std::string::npos && current == section && trim(t.substr(0, eq)) == key) return n;
  }
  return 0;
}

/// Lines that are neither blank, comments, section headers, nor key = value.
void check_syntax(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.find(']') == std::string::npos) fail(n, t, "unterminated section header");
      continue;
    }
    if (t.find('=') == std::string::npos) fail(n, t, "expected 'key = value'");
  }
}

const std::set<std::string> kScenarios{"sl2c", "trivial_groupoid", "custom"};
const std::set<std::string> kCustomGroupoids{"su2", "so3", "so2", "k", "pair", "action", "trivial"};

std::string default_lagrangian(const std::string& scenario) {
  if (scenario == "sl2c") return "sl2c_quadratic";
  if (scenario == "trivial_groupoid") return "trivial_quadratic";
  return "kinetic";
}

std::set<std::string> lagrangians_for(const std::string& scenario) {
  if (scenario == "sl2c") return {"sl2c_quadratic", "constant"};
  if (scenario == "trivial_groupoid") return {"trivial_quadratic", "constant"};
  return {"kinetic", "coupled", "potential", "moser_veselov", "constant"};
}

}  // namespace

void ScenarioConfig::set(const std::string& key, const std::string& value, int line) {
  const auto dot = key.find('.');
  if (dot == std::string::npos) fail(line, key, "key must be inside a section");
  const std::string section = key.substr(0, dot), name = key.substr(dot + 1);
  const auto kind = kind_of(section, name);
  if (!kind) fail(line, key, "unknown key");
  const std::string v = trim(value);
  if (v.empty()) fail(line, key, "empty value");

  if (*kind == Kind::Reals) {
    std::vector<double> xs;
    for (const auto& t : tokens(v)) xs.push_back(to_real(t, line, key));
    (section == "lagrangian" ? params : initial)[name] = xs;
  } else if (key == "scenario.id") {
    if (!kScenarios.count(v)) fail(line, key, "unknown scenario '" + v + "'");
    scenario = v;
  } else if (key == "scenario.groupoid") {
    if (!kCustomGroupoids.count(v)) fail(line, key, "unknown groupoid '" + v + "'");
    groupoid = v;
  } else if (key == "scenario.steps") {
    steps = static_cast<int>(to_int(v, line, key));
  } else if (key == "scenario.seed") {
    const long long s = to_int(v, line, key);
    if (s < 0) fail(line, key, "seed must be non-negative");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "scenario.out") {
    out = v;
  } else if (key == "scenario.report") {
    report = v;
  } else if (key == "lagrangian.name") {
    lagrangian = v;
  } else if (key == "check.samples") {
    samples = static_cast<int>(to_int(v, line, key));
  } else {
    const double x = to_real(v, line, key);
    if (!(x > 0)) fail(line, key, "tolerance must be positive");
    if (key == "tolerances.newton") newton_tol = x;
    if (key == "tolerances.oracle") oracle_tol = x;
    if (key == "tolerances.formula") formula_tol = x;
    if (key == "tolerances.phi") phi_tol = x;
    if (key == "check.tol") axiom_tol = x;
  }
  entries[key] = v;
}

void ScenarioConfig::validate() const {
  if (steps < 2) throw ConfigError("field 'scenario.steps': need at least 2 steps", 0, "scenario.steps");
  if (samples < 1) throw ConfigError("field 'check.samples': need at least 1 sample", 0, "check.samples");
  if (scenario == "custom" && groupoid.empty())
    throw ConfigError("field 'scenario.groupoid': required for the custom scenario", 0, "scenario.groupoid");
  const std::string name = lagrangian.empty() ? default_lagrangian(scenario) : lagrangian;
  if (!lagrangians_for(scenario).count(name))
    throw ConfigError("field 'lagrangian.name': '" + name + "' is not available for " + scenario, 0,
                      "lagrangian.name");
}

std::string ScenarioConfig::to_ini() const {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> by_section;
  for (const auto& [k, v] : entries) {
    const auto dot = k.find('.');
    by_section[k.substr(0, dot)].emplace_back(k.substr(dot + 1), v);
  }
  std::ostringstream os;
  for (const auto& [s, kv] : by_section) {
    os << "[" << s << "]\n";
    for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
  }
  return os.str();
}

ScenarioConfig parse_config_text(const std::string& text) {
  check_syntax(text);
  std::istringstream in(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what(), 0, "");
  }
  ScenarioConfig cfg;
  // Scenario first, so that validation of dependent keys sees it.
  std::stable_sort(items.begin(), items.end(), [](const CLI::ConfigItem& a, const CLI::ConfigItem& b) {
    return (a.fullname() == "scenario.id") > (b.fullname() == "scenario.id");
  });
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const std::string section = item.parents.empty() ? "" : item.parents.front();
    const int line = find_line(text, section, item.name);
    if (item.parents.size() != 1) fail(line, item.fullname(), "key must be inside a single section");
    std::string value;
    for (const auto& s : item.inputs) value += (value.empty() ? "" : " ") + s;
    cfg.set(item.fullname(), value, line);
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config(std::istream& in) {
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open configuration file '" + path + "'", 0, "");
  return parse_config(f);
}

// ---- trajectory tables ----

int TrajectoryTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> TrajectoryTable::get(const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw DomainError("trajectory file has no column '" + name + "'");
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r[c]);
  return v;
}

void write_table(std::ostream& out, const TrajectoryTable& t) {
  out << "# dmg trajectory\n";
  for (const auto& [k, v] : t.config) out << "# config " << k << " = " << v << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  char buf[32];
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", r[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
}

TrajectoryTable read_table(std::istream& in) {
  TrajectoryTable t;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string tag = "# config ";
      if (line.rfind(tag, 0) == 0) {
        const std::string kv = line.substr(tag.size());
        const auto eq = kv.find(" = ");
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(n) + ": bad config line", n, kv);
        t.config[kv.substr(0, eq)] = kv.substr(eq + 3);
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (t.columns.empty()) {
      t.columns = cells;
      continue;
    }
    if (cells.size() != t.columns.size())
      throw ConfigError("line " + std::to_string(n) + ": expected " + std::to_string(t.columns.size()) +
                            " values",
                        n, "");
    std::vector<double> r;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0')
        throw ConfigError("line " + std::to_string(n) + ": not a number '" + c + "'", n, c);
      r.push_back(v);
    }
    t.rows.push_back(std::move(r));
  }
  if (t.columns.empty()) throw ConfigError("trajectory file has no header", 0, "");
  return t;
}

// ---- reports ----

std::string RunReport::summary() const {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific;
  os << scenario << ": " << residual_norms.size() << " junctions, max residual " << residual_max
     << ", max oracle " << oracle_max;
  if (momentum_defect >= 0) os << ", momentum defect " << momentum_defect;
  os << "\n";
  for (const auto& [k, v] : diagnostics) os << "  " << k << " = " << v << "\n";
  for (const auto& [k, ok] : verdicts) os << "  [" << (ok ? "pass" : "FAIL") << "] " << k << "\n";
  return os.str();
}

std::string RunReport::to_json() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["residual_norms"] = residual_norms;
  j["residual_max"] = residual_max;
  j["oracle_max"] = oracle_max;
  if (momentum_defect >= 0) j["momentum_defect"] = momentum_defect;
  j["diagnostics"] = diagnostics;
  nlohmann::json v = nlohmann::json::object();
  for (const auto& [k, ok] : verdicts) v[k] = ok;
  j["verdicts"] = v;
  j["wall_seconds"] = wall_seconds;
  j["pass"] = pass;
  return j.dump(2);
}

// ---- closed forms ----

namespace {

const GroupAction& rotation() {
  static const GroupAction a = rotation_action();
  return a;
}

Vec cat(std::initializer_list<Vec> parts) {
  int n = 0;
  for (const auto& p : parts) n += static_cast<int>(p.size());
  Vec r(n);
  int i = 0;
  for (const auto& p : parts) r.segment(i, p.size()) = p, i += static_cast<int>(p.size());
  return r;
}

/// Columns xi -> (0, xi/2) q, the right translation of su(2) to T_q SU(2).
Eigen::Matrix<double, 4, 3> su2_right_translation(const Vec& q) {
  const double w = q[0];
  const Vec3 u = q.tail(3);
  Eigen::Matrix<double, 4, 3> J;
  for (int i = 0; i < 3; ++i) {
    const Vec3 e = Vec3::Unit(i);
    J(0, i) = -0.5 * u[i];
    J.block<3, 1>(1, i) = 0.5 * (w * e + e.cross(u));
  }
  return J;
}

Vec sl2c_gradient(const DiscreteLagrangian& L, const Vec& x) {
  if (L.gradient) return L.gradient(x);
  Vec g(7);
  auto f = [&](const Vec& y) { return L.value(cat({y.head(4) / y.head(4).norm(), y.tail(3)})); };
  for (int i = 0; i < 7; ++i) g[i] = fd_directional_fine(f, x, Vec::Unit(7, i));
  return g;
}

}  // namespace

Vec sl2c_closed_residual(const DiscreteLagrangian& L, const Vec& xk, const Vec& xk1) {
  if (xk.size() != 7 || xk1.size() != 7) throw TagError("SU(2) x K residual: expected 7 coordinates");
  const Vec Ak = xk.head(4), Ak1 = xk1.head(4);
  const Vec3 Bk = xk.tail(3), Bk1 = xk1.tail(3);
  const Vec gk = sl2c_gradient(L, xk), gk1 = sl2c_gradient(L, xk1);
  // Right-translated differentials; T r_B Y = (1 + c) Y on K.
  const Vec3 Phi_k = su2_right_translation(Ak).transpose() * gk.head(4);
  const Vec3 Phi_k1 = su2_right_translation(Ak1).transpose() * gk1.head(4);
  const Vec3 Psi_k = (1.0 + Bk[2]) * gk.tail(3);
  const Vec3 Psi_k1 = (1.0 + Bk1[2]) * gk1.tail(3);
  const Vec3 e3 = Vec3::UnitZ();

  const double s = Bk.squaredNorm() / (2.0 * (1.0 + Bk[2]));
  const Vec3 p = Bk / (1.0 + Bk[2]) + s * e3;
  const Vec3 mu = k_to_real3(Bk).transpose() * (rot_of(Ak).transpose() * Phi_k) +
                  (Psi_k + Bk.dot(Psi_k) * e3).cross(p) - Phi_k1;

  const Vec3 w = rot_of(Ak1) * e3 - e3;
  const Vec3 nu = (Psi_k + Bk.dot(Psi_k) * e3) / (1.0 + Bk[2]) - w.cross(Phi_k1) - rot_of(Ak1) * Psi_k1;
  return cat({mu, nu});
}

Vec trivial_derived_residual(const DiscreteLagrangian& L, const Vec& xk, const Vec& xk1) {
  if (xk.size() != 7 || xk1.size() != 7) throw TagError("trivial groupoid residual: expected 7 coordinates");
  auto grad = [&](const Vec& x) {
    if (L.gradient) return Vec(L.gradient(x));
    Vec g(7);
    for (int i = 0; i < 7; ++i) g[i] = fd_directional_fine(L.value, x, Vec::Unit(7, i));
    return g;
  };
  const Vec gk = grad(xk), gk1 = grad(xk1);
  const Vec d1_k1 = gk1.head(2), d4_k = gk.tail(2);
  const Vec d3_k = gk.segment(3, 2), d3_k1 = gk1.segment(3, 2);
  const double d2_k = gk[2], d2_k1 = gk1[2];
  auto dagger = [](const Vec& m) { return Eigen::Vector2d(m[1], -m[0]); };
  const Vec pk = xk.segment(3, 2), nk = xk.tail(2);
  const double th = xk1[2];
  Eigen::Matrix2d R;
  R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  Vec r(3);
  r[0] = d2_k - d2_k1 + dagger(pk).dot(d3_k) + dagger(nk).dot(d1_k1 + d4_k);
  r.tail(2) = d1_k1 + d4_k + R * d3_k1;
  return r;
}

// ---- scenario problems ----

namespace {

struct Track {
  std::string prefix;
  GroupoidPtr G;
  DiscreteLagrangian L;
  JunctionResidual R;
  std::vector<std::string> names;
};

struct Problem {
  std::string scenario;
  std::vector<Track> tracks;
  MatchedPairGroup sl2c;  // sl2c only
};

Vec param(const ScenarioConfig& c, const std::string& k, Vec fallback) {
  const auto it = c.params.find(k);
  if (it == c.params.end()) return fallback;
  Vec v(static_cast<int>(it->second.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = it->second[i];
  if (fallback.size() > 0 && v.size() != fallback.size())
    throw ConfigError("field 'lagrangian." + k + "': expected " + std::to_string(fallback.size()) + " values",
                      0, "lagrangian." + k);
  return v;
}

double scalar(const ScenarioConfig& c, const std::string& k, double fallback) {
  return param(c, k, Vec::Constant(1, fallback))[0];
}

std::optional<Vec> initial(const ScenarioConfig& c, const std::string& k, int n) {
  const auto it = c.initial.find(k);
  if (it == c.initial.end()) return std::nullopt;
  if (static_cast<int>(it->second.size()) != n)
    throw ConfigError("field 'initial." + k + "': expected " + std::to_string(n) + " values", 0, "initial." + k);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = it->second[i];
  return v;
}

std::string lagrangian_name(const ScenarioConfig& c) {
  return c.lagrangian.empty() ? default_lagrangian(c.scenario) : c.lagrangian;
}

GroupoidPtr custom_groupoid(const std::string& name) {
  if (name == "su2") return std::make_shared<GroupAsGroupoid>(make_su2());
  if (name == "so3") return std::make_shared<GroupAsGroupoid>(make_so3());
  if (name == "so2") return std::make_shared<GroupAsGroupoid>(make_so2());
  if (name == "k") return std::make_shared<GroupAsGroupoid>(make_k());
  if (name == "pair") return std::make_shared<PairGroupoid>(2);
  if (name == "action") return std::make_shared<ActionGroupoid>(rotation());
  return std::make_shared<TrivialGroupoid>(2, make_so2());
}

std::vector<std::string> numbered(const std::string& stem, int n) {
  std::vector<std::string> v;
  for (int i = 0; i < n; ++i) v.push_back(stem + std::to_string(i));
  return v;
}

Problem make_problem(const ScenarioConfig& c) {
  Problem p;
  p.scenario = c.scenario;
  const std::string lname = lagrangian_name(c);
  const double constant = scalar(c, "value", 0.0);
  if (c.scenario == "sl2c") {
    p.sl2c = make_sl2c();
    auto d = p.sl2c;
    auto M = matched_group_as_groupoid(d);
    DiscreteLagrangian L = lname == "constant"
                               ? constant_lagrangian(constant)
                               : sl2c_lagrangian(param(c, "wa", Vec3(1.0, 1.5, 2.0)),
                                                 param(c, "wb", Vec3(1.0, 1.0, 1.0)), scalar(c, "kappa", 0.2));
    auto R = [d, L](const Vec& a, const Vec& b) { return del_residual_matched_group(d, L, a, b); };
    p.tracks.push_back({"", M, L, R, {"qw", "qx", "qy", "qz", "a", "b", "c"}});
  } else if (c.scenario == "trivial_groupoid") {
    auto T = std::make_shared<TrivialGroupoid>(2, make_so2());
    auto M = make_trivial_decomposition(rotation());
    const double w = scalar(c, "w", 1.0), kappa = scalar(c, "kappa", -0.2);
    const DiscreteLagrangian Ld = lname == "constant" ? constant_lagrangian(constant) : trivial_lagrangian(w, kappa);
    const DiscreteLagrangian Lm =
        lname == "constant" ? constant_lagrangian(constant) : trivial_matched_lagrangian(w, kappa);
    auto Rd = [T, Ld](const Vec& a, const Vec& b) { return del_residual(*T, Ld, a, b); };
    auto Rm = [M, Lm](const Vec& a, const Vec& b) { return del_residual_matched(*M, Lm, a, b); };
    p.tracks.push_back({"d_", T, Ld, Rd, {"m1", "m2", "theta", "n1", "n2"}});
    p.tracks.push_back({"m_", M, Lm, Rm, {"m1", "m2", "theta", "p1", "p2", "n1", "n2"}});
  } else {
    auto G = custom_groupoid(c.groupoid);
    const int nc = G->base_dim() + G->fiber_dim();
    DiscreteLagrangian L;
    if (lname == "constant") {
      L = constant_lagrangian(constant);
    } else if (lname == "kinetic") {
      L = kinetic_lagrangian(G, param(c, "w", Vec::Ones(G->fiber_dim())));
    } else if (lname == "potential") {
      L = potential_lagrangian(G, scalar(c, "eps", 0.3));
    } else if (lname == "moser_veselov") {
      if (c.groupoid != "so3")
        throw ConfigError("field 'lagrangian.name': moser_veselov needs groupoid so3", 0, "lagrangian.name");
      L = moser_veselov_lagrangian(param(c, "j", Vec3(1.0, 2.0, 3.5)).asDiagonal());
    } else {
      Vec q = param(c, "q", Vec());
      if (q.size() == 0) q = Vec::Ones(nc);
      Mat Q;
      if (q.size() == nc) {
        Q = q.asDiagonal();
      } else if (q.size() == nc * nc) {
        Q = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(q.data(), nc, nc);
      } else {
        throw ConfigError("field 'lagrangian.q': expected " + std::to_string(nc) + " or " +
                              std::to_string(nc * nc) + " values",
                          0, "lagrangian.q");
      }
      L = coupled_lagrangian(G, Q);
    }
    auto R = [G, L](const Vec& a, const Vec& b) { return del_residual(*G, L, a, b); };
    p.tracks.push_back({"", G, L, R, numbered("x", G->arrow_dim())});
  }
  return p;
}

Vec initial_arrow(const ScenarioConfig& c, const Problem& p) {
  Rng rng(c.seed);
  if (c.scenario == "sl2c") {
    const auto& d = p.sl2c;
    auto a = initial(c, "a", 3);
    auto b = initial(c, "b", 3);
    const auto r = mp_random(d, rng, 0.5);
    const Vec A = a ? d.G->exp(*a) : r.g;
    const Vec B = b ? *b : r.h;
    if (!(B[2] > -1.0)) throw ConfigError("field 'initial.b': c must exceed -1", 0, "initial.b");
    return cat({A, B});
  }
  if (c.scenario == "trivial_groupoid") {
    std::normal_distribution<double> n(0.0, 0.5);
    auto m = initial(c, "m", 2);
    auto th = initial(c, "theta", 1);
    auto e = initial(c, "n", 2);
    Vec rm(2), rt(1), rn(2);
    rm << n(rng), n(rng);
    rt << n(rng);
    rn << n(rng), n(rng);
    return cat({m ? *m : rm, th ? *th : rt, e ? *e : rn});
  }
  const auto& G = *p.tracks[0].G;
  if (auto x = initial(c, "arrow", G.arrow_dim())) return G.retract(*x);
  return G.random_arrow(rng, 0.5);
}

std::vector<Vec> solve_track(const Track& t, const Vec& x1, const ScenarioConfig& c) {
  Tolerances tol;
  tol.newton_tol = c.newton_tol;
  std::vector<Vec> arrows{t.G->retract(x1)};
  for (int k = 1; k < c.steps; ++k) {
    try {
      arrows.push_back(solve_junction(*t.G, t.R, arrows.back(), std::nullopt, tol).arrow);
    } catch (const SingularJacobian& e) {
      throw SolverFailure(k, "SingularJacobian", e.what());
    } catch (const NoConvergence& e) {
      throw SolverFailure(k, "NoConvergence", e.what());
    } catch (const EvaluationError& e) {
      throw SolverFailure(k, "EvaluationError", e.what());
    }
  }
  const auto o = variational_oracle(*t.G, t.L, make_trajectory(*t.G, arrows));
  for (std::size_t k = 0; k < o.per_junction.size(); ++k)
    if (!(inf_norm(o.per_junction[k]) <= c.oracle_tol))
      throw SolverFailure(static_cast<int>(k) + 1, "EvaluationError", "variational check failed");
  return arrows;
}

/// Arrow x_{k+1} moved off the solution, used to compare residual formulas away from zero.
Vec off_solution(const Groupoid& G, const Vec& x) {
  return G.retract(G.fiber_point(x, Vec::Constant(G.fiber_dim(), 0.1)));
}

TrajectoryTable tabulate(const ScenarioConfig& c, const Problem& p, const std::vector<std::vector<Vec>>& arrows) {
  TrajectoryTable t;
  t.config = c.entries;
  // Output locations do not affect the trajectory; keeping them out makes files comparable.
  t.config.erase("scenario.out");
  t.config.erase("scenario.report");
  const std::size_t n = arrows[0].size();
  t.columns.push_back("step");
  for (const auto& tr : p.tracks) {
    for (const auto& s : tr.names) t.columns.push_back(tr.prefix + s);
    t.columns.push_back(tr.prefix + "residual");
    t.columns.push_back(tr.prefix + "oracle");
  }
  if (p.scenario == "sl2c")
    for (const char* s : {"Phi1", "Phi2", "Phi3", "Psi1", "Psi2", "Psi3", "closed_dev"}) t.columns.push_back(s);
  if (p.scenario == "trivial_groupoid")
    for (const char* s : {"phi_dev", "residual_gap", "derived_dev"}) t.columns.push_back(s);

  std::vector<OracleReport> oracles;
  for (std::size_t i = 0; i < p.tracks.size(); ++i)
    oracles.push_back(variational_oracle(*p.tracks[i].G, p.tracks[i].L, make_trajectory(*p.tracks[i].G, arrows[i])));

  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> row{static_cast<double>(k)};
    std::vector<double> res(p.tracks.size(), 0.0);
    for (std::size_t i = 0; i < p.tracks.size(); ++i) {
      const Vec& x = arrows[i][k];
      row.insert(row.end(), x.data(), x.data() + x.size());
      if (k > 0) res[i] = inf_norm(p.tracks[i].R(arrows[i][k - 1], x));
      row.push_back(res[i]);
      row.push_back(k > 0 ? inf_norm(oracles[i].per_junction[k - 1]) : 0.0);
    }
    if (p.scenario == "sl2c") {
      const auto& tr = p.tracks[0];
      const Vec& x = arrows[0][k];
      const auto m = mp_momenta(p.sl2c, tr.L, x);
      row.insert(row.end(), m.mu.data(), m.mu.data() + 3);
      row.insert(row.end(), m.nu.data(), m.nu.data() + 3);
      double dev = 0.0;
      if (k > 0) {
        const auto generic = p.sl2c.generic();
        const Vec& xp = arrows[0][k - 1];
        const Vec off = off_solution(*tr.G, x);
        dev = std::max(inf_norm(sl2c_closed_residual(tr.L, xp, x) - del_residual_matched_group(generic, tr.L, xp, x)),
                       inf_norm(sl2c_closed_residual(tr.L, xp, off) -
                                del_residual_matched_group(generic, tr.L, xp, off)));
      }
      row.push_back(dev);
    }
    if (p.scenario == "trivial_groupoid") {
      const auto& M = static_cast<const MatchedPairGroupoid&>(*p.tracks[1].G);
      const auto& Lm = p.tracks[1].L;
      row.push_back(inf_norm(phi_trivial(rotation(), arrows[0][k]) - arrows[1][k]));
      double gap = 0.0, dev = 0.0;
      if (k > 0) {
        const Vec a = phi_trivial(rotation(), arrows[0][k - 1]), b = phi_trivial(rotation(), arrows[0][k]);
        gap = std::abs(res[0] - inf_norm(p.tracks[1].R(a, b)));
        const Vec& xp = arrows[1][k - 1];
        const Vec& x = arrows[1][k];
        const Vec off = off_solution(M, x);
        dev = std::max(inf_norm(trivial_derived_residual(Lm, xp, x) - del_residual_matched(M, Lm, xp, x)),
                       inf_norm(trivial_derived_residual(Lm, xp, off) - del_residual_matched(M, Lm, xp, off)));
      }
      row.push_back(gap);
      row.push_back(dev);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

double column_max(const TrajectoryTable& t, const std::string& name) {
  double m = 0.0;
  for (double v : t.get(name)) m = std::max(m, v);
  return m;
}

RunReport make_report(const ScenarioConfig& c, const Problem& p, const TrajectoryTable& t,
                      const std::vector<std::vector<Vec>>& arrows) {
  RunReport r;
  r.scenario = c.scenario;
  const std::string primary = p.tracks.back().prefix;
  const auto res = t.get(primary + "residual");
  r.residual_norms.assign(res.begin() + 1, res.end());
  for (const auto& tr : p.tracks) {
    r.residual_max = std::max(r.residual_max, column_max(t, tr.prefix + "residual"));
    r.oracle_max = std::max(r.oracle_max, column_max(t, tr.prefix + "oracle"));
  }
  r.verdicts.emplace_back("residuals within Newton tolerance", r.residual_max <= c.newton_tol);
  r.verdicts.emplace_back("variational oracle within tolerance", r.oracle_max <= c.oracle_tol);
  if (c.scenario == "sl2c") {
    const auto m = momentum_evolution(p.sl2c, p.tracks[0].L, make_trajectory(*p.tracks[0].G, arrows[0]));
    r.momentum_defect = m.max_defect;
    r.diagnostics["closed_vs_generic_max"] = column_max(t, "closed_dev");
    r.verdicts.emplace_back("closed-form residual matches generic assembly",
                            r.diagnostics["closed_vs_generic_max"] <= c.formula_tol);
  } else if (c.scenario == "trivial_groupoid") {
    r.diagnostics["phi_deviation_max"] = column_max(t, "phi_dev");
    r.diagnostics["residual_norm_gap_max"] = column_max(t, "residual_gap");
    r.diagnostics["derived_vs_generic_max"] = column_max(t, "derived_dev");
    r.verdicts.emplace_back("Phi maps the direct trajectory onto the matched one",
                            r.diagnostics["phi_deviation_max"] <= c.phi_tol);
    r.verdicts.emplace_back("direct and matched residual norms agree",
                            r.diagnostics["residual_norm_gap_max"] <= c.phi_tol);
    r.verdicts.emplace_back("derived d1..d4 residual matches generic assembly",
                            r.diagnostics["derived_vs_generic_max"] <= c.formula_tol);
  } else {
    const auto& tr = p.tracks[0];
    const auto traj = make_trajectory(*tr.G, arrows[0]);
    if (auto g = std::dynamic_pointer_cast<const GroupAsGroupoid>(tr.G))
      r.momentum_defect = momentum_evolution(*g, tr.L, traj).max_defect;
    else if (auto a = std::dynamic_pointer_cast<const ActionGroupoid>(tr.G))
      r.momentum_defect = momentum_evolution(*a, tr.L, traj).max_defect;
  }
  for (const auto& [k, ok] : r.verdicts) r.pass = r.pass && ok;
  return r;
}

std::vector<std::vector<Vec>> arrows_of(const Problem& p, const TrajectoryTable& t) {
  std::vector<std::vector<Vec>> out;
  for (const auto& tr : p.tracks) {
    std::vector<int> cols;
    for (const auto& s : tr.names) {
      const int c = t.column(tr.prefix + s);
      if (c < 0) throw ConfigError("trajectory file has no column '" + tr.prefix + s + "'", 0, tr.prefix + s);
      cols.push_back(c);
    }
    std::vector<Vec> arrows;
    for (const auto& row : t.rows) {
      Vec x(static_cast<int>(cols.size()));
      for (std::size_t i = 0; i < cols.size(); ++i) x[static_cast<int>(i)] = row[cols[i]];
      arrows.push_back(x);
    }
    out.push_back(arrows);
  }
  if (out[0].size() < 2) throw ConfigError("trajectory file needs at least two rows", 0, "");
  return out;
}

ScenarioResult finish(const ScenarioConfig& c, const Problem& p, const std::vector<std::vector<Vec>>& arrows,
                      std::chrono::steady_clock::time_point start) {
  ScenarioResult out;
  out.table = tabulate(c, p, arrows);
  // The report is computed from the serialized trajectory, so it can be reproduced from the file.
  std::stringstream ss;
  write_table(ss, out.table);
  const TrajectoryTable back = read_table(ss);
  out.report = make_report(c, p, back, arrows_of(p, back));
  out.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

ScenarioResult run_trivial_groupoid(const ScenarioConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  c.validate();
  const Problem p = make_problem(c);
  const Vec x1 = initial_arrow(c, p);
  std::vector<std::vector<Vec>> arrows{solve_track(p.tracks[0], x1, c),
                                       solve_track(p.tracks[1], phi_trivial(rotation(), x1), c)};
  auto out = finish(c, p, arrows, start);
  const auto dev = out.table.get("derived_dev");
  for (std::size_t k = 1; k < dev.size(); ++k)
    if (!(dev[k] <= c.formula_tol)) throw FormulaMismatch(static_cast<int>(k), dev[k]);
  return out;
}

ScenarioResult run_sl2c(const ScenarioConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  c.validate();
  const Problem p = make_problem(c);
  const Vec x1 = initial_arrow(c, p);
  auto out = finish(c, p, {solve_track(p.tracks[0], x1, c)}, start);
  const auto dev = out.table.get("closed_dev");
  for (std::size_t k = 1; k < dev.size(); ++k)
    if (!(dev[k] <= c.formula_tol)) throw FormulaMismatch(static_cast<int>(k), dev[k]);
  return out;
}

ScenarioResult run_custom(const ScenarioConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  c.validate();
  const Problem p = make_problem(c);
  return finish(c, p, {solve_track(p.tracks[0], initial_arrow(c, p), c)}, start);
}

ScenarioResult run_scenario(const ScenarioConfig& c) {
  if (c.scenario == "sl2c") return run_sl2c(c);
  if (c.scenario == "trivial_groupoid") return run_trivial_groupoid(c);
  return run_custom(c);
}

Recheck recheck_table(const TrajectoryTable& t) {
  ScenarioConfig c;
  for (const auto& [k, v] : t.config) c.set(k, v);
  c.validate();
  const Problem p = make_problem(c);
  const auto arrows = arrows_of(p, t);
  Recheck r;
  r.recomputed = tabulate(c, p, arrows);
  r.report = make_report(c, p, r.recomputed, arrows);
  if (r.recomputed.columns != t.columns || r.recomputed.rows.size() != t.rows.size()) {
    r.max_difference = std::numeric_limits<double>::infinity();
    return r;
  }
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < t.columns.size(); ++j)
      r.max_difference = std::max(r.max_difference, std::abs(t.rows[i][j] - r.recomputed.rows[i][j]));
  return r;
}

std::vector<SuiteResult> run_axiom_suites(const ScenarioConfig& c) {
  c.validate();
  std::vector<SuiteResult> out;
  auto groupoid_suite = [&](const std::string& name, const Groupoid& G) {
    Rng rng(c.seed);
    out.push_back({name + " groupoid laws", axiom_check_groupoid(G, c.samples, rng, c.axiom_tol)});
  };
  if (c.scenario == "sl2c") {
    const auto d = make_sl2c();
    groupoid_suite("SU(2)", GroupAsGroupoid(d.G));
    groupoid_suite("K", GroupAsGroupoid(d.H));
    Rng rng(c.seed);
    out.push_back({"SU(2) x K matched pair", axiom_check_group(d, c.samples, rng, c.axiom_tol)});
    const auto M = matched_group_as_groupoid(d);
    groupoid_suite("SU(2) x K", *M);
    Rng rng2(c.seed);
    out.push_back({"SU(2) x K matched conditions", axiom_check_matched(*M, c.samples, rng2, c.axiom_tol)});
  } else if (c.scenario == "trivial_groupoid") {
    groupoid_suite("action R^2 x SO(2)", ActionGroupoid(rotation()));
    groupoid_suite("pair R^2 x R^2", PairGroupoid(2));
    groupoid_suite("trivial R^2 x SO(2) x R^2", TrivialGroupoid(2, make_so2()));
    const auto M = make_trivial_decomposition(rotation());
    groupoid_suite("matched decomposition", *M);
    Rng rng(c.seed);
    out.push_back({"matched decomposition conditions", axiom_check_matched(*M, c.samples, rng, c.axiom_tol)});
  } else {
    groupoid_suite(c.groupoid, *custom_groupoid(c.groupoid));
  }
  return out;
}

}  // namespace dmg
