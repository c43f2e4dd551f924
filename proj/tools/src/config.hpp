#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "posmom/cases.hpp"
#include "posmom/closure_l2.hpp"
#include "posmom/dvm.hpp"
#include "posmom/kinetic.hpp"

namespace posmom::cli {

/// Flat key=value settings with dotted keys. Later sources win.
class Config {
 public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;
};

/// One `key=value` per line; `#` starts a comment; blank lines ignored.
/// `origin` names the source in error messages.
Config parse_config(const std::string& text, const std::string& origin = "<config>");
Config load_config(const std::filesystem::path& path);

/// Applies `key=value` (a leading `--` is stripped).
void apply_assignment(Config& config, const std::string& assignment);

/// Environment variable that overrides output.dir.
inline constexpr const char* kOutputDirVariable = "POSMOM_OUTPUT_DIR";

enum class SolverKind { kMoments, kDvm, kClosureStudy, kFeasibility };

const char* to_string(SolverKind kind);

/// Fully resolved and validated run settings.
struct RunConfig {
  SolverKind solver = SolverKind::kMoments;
  std::string case_name = "sod";
  CaseSpec spec;

  // Time stepping and solver controls.
  double dt = 0.0;
  CflMode cfl_mode = CflMode::kStability;
  double cfl_safety = 1.0;
  bool allow_unsafe_dt = false;
  GhostMode ghosts = GhostMode::kSampled;
  ClosureOptions closure{.method = ClosureMethod::kAuto};
  EntropyOptions entropy;
  DvmCollision collision = DvmCollision::kExplicit;
  long max_steps = -1;

  // Closure study.
  int study_m_min = 3;
  int study_m_max = 22;

  // Reference refinement (DVM only).
  bool refine = false;
  RefinementOptions refinement;

  // Random property runs.
  std::uint64_t seed = 1;
  int samples = 1000;

  std::filesystem::path output_dir = "posmom-out";
  std::vector<double> output_times;
  std::filesystem::path reference_dir;  ///< empty: no errors.csv

  Config source;  ///< the settings this was resolved from
};

/// Validates every key and value; throws ConfigurationError on the first
/// problem. Keys:
///   solver, case, case.<override> (see apply_overrides), solver.M, solver.N,
///   solver.dt, solver.cfl_mode, solver.cfl_safety, solver.allow_unsafe_dt,
///   solver.ghosts, solver.method, solver.eq_tol, solver.entropy_tol,
///   solver.collision, solver.max_steps, study.M_min, study.M_max,
///   refine.enabled, refine.{tolerance,c,n_start,n_step,n_max,widen,
///   max_half_width,nx}, seed, samples, output.dir, output.times, reference.
RunConfig resolve(const Config& config);

}  // namespace posmom::cli
