#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "posmom/errors.hpp"

namespace posmom::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigurationError(key + ": expected a number, got '" + value + "'");
  }
  return out;
}

long to_long(const std::string& key, const std::string& value) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigurationError(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "solver",          "case",           "solver.M",          "solver.N",         "solver.dt",
      "solver.cfl_mode", "solver.cfl_safety", "solver.allow_unsafe_dt", "solver.ghosts", "solver.method",
      "solver.eq_tol",   "solver.entropy_tol", "solver.collision", "solver.max_steps", "study.M_min",
      "study.M_max",     "refine.enabled", "refine.tolerance",  "refine.c",         "refine.n_start",
      "refine.n_step",   "refine.n_max",   "refine.widen",      "refine.max_half_width", "refine.nx",
      "seed",            "samples",        "output.dir",        "output.times",     "reference",
      "sweep.M",         "sweep.nx",       "sweep.kn",
  };
  return keys;
}

}  // namespace

std::string Config::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? to_double(key, values_.at(key)) : fallback;
}

long Config::get_long(const std::string& key, long fallback) const {
  return has(key) ? to_long(key, values_.at(key)) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = values_.at(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigurationError(key + ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> Config::get_list(const std::string& key) const {
  std::vector<std::string> out;
  if (!has(key)) return out;
  std::stringstream ss(values_.at(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Config parse_config(const std::string& text, const std::string& origin) {
  Config config;
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError(origin + ":" + std::to_string(number) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigurationError(origin + ":" + std::to_string(number) + ": empty key");
    config.set(key, trim(line.substr(eq + 1)));
  }
  return config;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

void apply_assignment(Config& config, const std::string& assignment) {
  std::string a = assignment;
  if (a.rfind("--", 0) == 0) a.erase(0, 2);
  const auto eq = a.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigurationError("expected --key=value, got '" + assignment + "'");
  config.set(trim(a.substr(0, eq)), trim(a.substr(eq + 1)));
}

const char* to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kMoments:
      return "moments";
    case SolverKind::kDvm:
      return "dvm";
    case SolverKind::kClosureStudy:
      return "closure-study";
    case SolverKind::kFeasibility:
      return "feasibility";
  }
  return "unknown";
}

RunConfig resolve(const Config& config) {
  std::map<std::string, std::string> case_overrides;
  for (const auto& [key, value] : config.values()) {
    if (key.rfind("case.", 0) == 0) {
      case_overrides[key.substr(5)] = value;
    } else if (!known_keys().count(key)) {
      throw ConfigurationError("unknown configuration key '" + key + "'");
    }
  }
  // solver.N is the node count of whichever solver runs: N_ref for the DVM.
  const bool dvm = config.get("solver", "moments") == "dvm";
  if (config.has("solver.M")) case_overrides["M"] = config.get("solver.M", "");
  if (config.has("solver.N")) case_overrides[dvm ? "N_ref" : "N"] = config.get("solver.N", "");

  RunConfig rc;
  rc.source = config;
  const std::string solver = config.get("solver", "moments");
  if (solver == "moments") rc.solver = SolverKind::kMoments;
  else if (solver == "dvm") rc.solver = SolverKind::kDvm;
  else if (solver == "closure-study") rc.solver = SolverKind::kClosureStudy;
  else if (solver == "feasibility") rc.solver = SolverKind::kFeasibility;
  else throw ConfigurationError("solver: expected moments, dvm, closure-study or feasibility, got '" + solver + "'");

  const bool static_problem = rc.solver == SolverKind::kClosureStudy || rc.solver == SolverKind::kFeasibility;
  rc.case_name = config.get("case", static_problem ? "bimodal" : "sod");
  rc.spec = make_case(rc.case_name, case_overrides);
  if (static_problem && rc.spec.id != CaseId::kBimodal) {
    throw ConfigurationError(std::string(to_string(rc.solver)) + " runs on the bimodal case only");
  }
  if (!static_problem && rc.spec.id == CaseId::kBimodal) {
    throw ConfigurationError("the bimodal case has no time evolution; use solver=closure-study");
  }

  rc.dt = config.get_double("solver.dt", 0.0);
  if (rc.dt < 0.0) throw ConfigurationError("solver.dt must be non-negative");
  const std::string mode = config.get("solver.cfl_mode", "stability");
  if (mode == "stability") rc.cfl_mode = CflMode::kStability;
  else if (mode == "feasibility") rc.cfl_mode = CflMode::kFeasibility;
  else throw ConfigurationError("solver.cfl_mode: expected stability or feasibility");
  rc.cfl_safety = config.get_double("solver.cfl_safety", 1.0);
  if (!(rc.cfl_safety > 0.0)) throw ConfigurationError("solver.cfl_safety must be positive");
  rc.allow_unsafe_dt = config.get_bool("solver.allow_unsafe_dt", false);
  const std::string ghosts = config.get("solver.ghosts", "sampled");
  if (ghosts == "sampled") rc.ghosts = GhostMode::kSampled;
  else if (ghosts == "closure") rc.ghosts = GhostMode::kClosure;
  else throw ConfigurationError("solver.ghosts: expected sampled or closure");
  const std::string method = config.get("solver.method", rc.solver == SolverKind::kClosureStudy ? "interior-point" : "auto");
  if (method == "auto") rc.closure.method = ClosureMethod::kAuto;
  else if (method == "interior-point") rc.closure.method = ClosureMethod::kInteriorPoint;
  else throw ConfigurationError("solver.method: expected auto or interior-point");
  rc.closure.eq_tol = config.get_double("solver.eq_tol", rc.closure.eq_tol);
  rc.entropy.tol = config.get_double("solver.entropy_tol", rc.entropy.tol);
  if (!(rc.closure.eq_tol > 0.0) || !(rc.entropy.tol > 0.0)) throw ConfigurationError("tolerances must be positive");
  const std::string collision = config.get("solver.collision", "explicit");
  if (collision == "explicit") rc.collision = DvmCollision::kExplicit;
  else if (collision == "implicit-split") rc.collision = DvmCollision::kImplicitSplit;
  else throw ConfigurationError("solver.collision: expected explicit or implicit-split");
  rc.max_steps = config.get_long("solver.max_steps", -1);

  rc.study_m_min = static_cast<int>(config.get_long("study.M_min", 3));
  rc.study_m_max = static_cast<int>(config.get_long("study.M_max", rc.spec.moments));
  if (rc.study_m_min < 3 || rc.study_m_max < rc.study_m_min) {
    throw ConfigurationError("study.M_min must be >= 3 and <= study.M_max");
  }

  // Moment-count feasibility against the velocity grid.
  const long nodes = rc.spec.dim == 1 ? rc.spec.nodes : static_cast<long>(rc.spec.nodes) * rc.spec.nodes;
  const int top_m = rc.solver == SolverKind::kClosureStudy ? rc.study_m_max : rc.spec.moments;
  const long m_count = rc.spec.dim == 1 ? top_m : moment_count_2d(top_m);
  if (rc.solver != SolverKind::kDvm) {
    if (top_m < 3) throw ConfigurationError("M must be at least 3");
    if (nodes <= m_count) throw ConfigurationError("need more velocity nodes than moments (N_count > M_count)");
  }

  rc.refine = config.get_bool("refine.enabled", false);
  if (rc.refine && rc.solver != SolverKind::kDvm) throw ConfigurationError("refine.enabled requires solver=dvm");
  RefinementOptions& r = rc.refinement;
  r.tolerance = config.get_double("refine.tolerance", r.tolerance);
  r.c = config.get_double("refine.c", r.c);
  r.n_start = static_cast<int>(config.get_long("refine.n_start", r.n_start));
  r.n_step = static_cast<int>(config.get_long("refine.n_step", r.n_step));
  r.n_max = static_cast<int>(config.get_long("refine.n_max", r.n_max));
  r.widen = config.get_double("refine.widen", r.widen);
  r.max_half_width = config.get_double("refine.max_half_width", r.max_half_width);
  r.nx = static_cast<int>(config.get_long("refine.nx", 0));
  if (!(r.tolerance > 0.0) || !(r.c > 0.0) || r.n_start < 1 || r.n_step < 1 || r.n_max < r.n_start || r.widen < 0.0) {
    throw ConfigurationError("invalid refine.* settings");
  }

  rc.seed = static_cast<std::uint64_t>(config.get_long("seed", 1));
  rc.samples = static_cast<int>(config.get_long("samples", 1000));
  if (rc.samples < 1) throw ConfigurationError("samples must be positive");

  rc.output_dir = config.get("output.dir", "posmom-out");
  for (const std::string& t : config.get_list("output.times")) {
    const double v = to_double("output.times", t);
    if (v < 0.0 || v > rc.spec.t_end) throw ConfigurationError("output.times must lie in [0, t_end]");
    rc.output_times.push_back(v);
  }
  std::sort(rc.output_times.begin(), rc.output_times.end());
  rc.reference_dir = config.get("reference", "");
  return rc;
}

}  // namespace posmom::cli
