#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>

#include "output.hpp"
#include "posmom/errors.hpp"

namespace posmom::cli {

namespace {

namespace fs = std::filesystem;
using Eigen::MatrixXd;
using Clock = std::chrono::steady_clock;
using Manifest = std::vector<std::pair<std::string, std::string>>;

const std::vector<std::string> kUnits{"units: nondimensional; lengths in l, velocities in sqrt(theta_0), "
                                      "densities in rho_0, time in l / sqrt(theta_0)"};

std::vector<std::string> comments(const std::string& title, const std::string& columns) {
  std::vector<std::string> out{title};
  out.insert(out.end(), kUnits.begin(), kUnits.end());
  out.push_back("columns: " + columns);
  return out;
}

std::vector<std::string> field_columns(int dim) {
  if (dim == 1) return {"t", "x", "rho", "v", "theta", "mass", "momentum", "energy"};
  return {"t", "x", "y", "rho", "v1", "v2", "theta", "mass", "momentum1", "momentum2", "energy"};
}

CsvWriter open_fields(const fs::path& dir, int dim) {
  const std::string cols = dim == 1 ? "t time, x position, rho density, v velocity, theta temperature, "
                                      "mass/momentum/energy raw conserved moments per cell"
                                    : "t time, x y position, rho density, v1 v2 velocity, theta temperature, "
                                      "mass/momentum1/momentum2/energy raw conserved moments per cell";
  return CsvWriter(dir / "fields.csv", comments("posmom fields: cell-averaged state per output time", cols),
                   field_columns(dim));
}

void write_fields(CsvWriter& out, const Mesh& mesh, double t, const MatrixXd& conserved) {
  const int dim = mesh.dim;
  for (int i = 0; i < mesh.nx; ++i) {
    for (int j = 0; j < mesh.ny; ++j) {
      const auto c = conserved.col(mesh.index(i, j));
      std::vector<double> row{t, mesh.center(0, i)};
      if (dim == 2) row.push_back(mesh.center(1, j));
      const double rho = c[0];
      row.push_back(rho);
      double v2 = 0.0;
      for (int d = 0; d < dim; ++d) {
        row.push_back(c[1 + d] / rho);
        v2 += (c[1 + d] / rho) * (c[1 + d] / rho);
      }
      row.push_back((c[dim + 1] / rho - v2) / (dim == 1 ? 1.0 : 3.0));
      for (int k = 0; k < dim + 2; ++k) row.push_back(c[k]);
      out.row(row);
    }
  }
}

struct Snapshot {
  Mesh mesh;
  double t = 0.0;
  MatrixXd conserved;  // (dim + 2) x cells
};

Snapshot final_snapshot(const fs::path& dir) {
  const CsvTable table = read_csv(dir / "fields.csv");
  const int ti = table.column("t");
  const int xi = table.column("x");
  const int yi = table.column("y");
  if (ti < 0 || xi < 0 || table.rows.empty()) throw ConfigurationError((dir / "fields.csv").string() + ": no field rows");
  const int dim = yi >= 0 ? 2 : 1;
  const std::vector<std::string> names = field_columns(dim);
  std::vector<int> cons;
  for (std::size_t k = names.size() - (dim + 2); k < names.size(); ++k) {
    cons.push_back(table.column(names[k]));
    if (cons.back() < 0) throw ConfigurationError((dir / "fields.csv").string() + ": missing column " + names[k]);
  }
  double t_last = -1.0;
  for (const auto& r : table.rows) t_last = std::max(t_last, r[ti]);
  std::vector<const std::vector<double>*> rows;
  std::set<double> xs;
  std::set<double> ys;
  for (const auto& r : table.rows) {
    if (r[ti] != t_last) continue;
    rows.push_back(&r);
    xs.insert(r[xi]);
    if (dim == 2) ys.insert(r[yi]);
  }
  Snapshot s;
  s.t = t_last;
  const int nx = static_cast<int>(xs.size());
  const double hx = nx > 1 ? (*xs.rbegin() - *xs.begin()) / (nx - 1) : 1.0;
  if (dim == 1) {
    s.mesh = make_mesh_1d(nx, *xs.begin() - 0.5 * hx, *xs.rbegin() + 0.5 * hx);
  } else {
    const int ny = static_cast<int>(ys.size());
    const double hy = ny > 1 ? (*ys.rbegin() - *ys.begin()) / (ny - 1) : 1.0;
    s.mesh = make_mesh_2d(nx, ny, {*xs.begin() - 0.5 * hx, *ys.begin() - 0.5 * hy},
                          {*xs.rbegin() + 0.5 * hx, *ys.rbegin() + 0.5 * hy});
  }
  if (static_cast<Eigen::Index>(rows.size()) != s.mesh.cells()) {
    throw ConfigurationError((dir / "fields.csv").string() + ": final snapshot is not a full tensor mesh");
  }
  s.conserved.resize(dim + 2, s.mesh.cells());
  for (std::size_t c = 0; c < rows.size(); ++c) {
    for (int k = 0; k < dim + 2; ++k) s.conserved(k, static_cast<Eigen::Index>(c)) = (*rows[c])[cons[k]];
  }
  return s;
}

bool same_extent(const Mesh& a, const Mesh& b) {
  auto close = [](double u, double v) { return std::abs(u - v) <= 1e-9 * std::max({1.0, std::abs(u), std::abs(v)}); };
  bool ok = a.dim == b.dim && close(a.lo[0], b.lo[0]) && close(a.hi[0], b.hi[0]);
  if (a.dim == 2) ok = ok && close(a.lo[1], b.lo[1]) && close(a.hi[1], b.hi[1]);
  return ok;
}

std::vector<ErrorReport> errors_against(const Snapshot& approx, const Snapshot& reference) {
  if (!same_extent(approx.mesh, reference.mesh)) throw ConfigurationError("compare: meshes cover different domains");
  MatrixXd ref = reference.conserved;
  if (reference.mesh.nx != approx.mesh.nx || reference.mesh.ny != approx.mesh.ny) {
    if (reference.mesh.nx % approx.mesh.nx != 0 || reference.mesh.ny % approx.mesh.ny != 0) {
      throw ConfigurationError("compare: mesh mismatch (reference cells are not a multiple of the run's cells)");
    }
    ref = restrict_field(reference.mesh, reference.conserved, approx.mesh);
  }
  return error_macro(approx.mesh, approx.conserved, ref);
}

void write_errors(const fs::path& dir, const std::vector<ErrorReport>& reports, const std::vector<std::string>& config) {
  CsvWriter out(dir / "errors.csv",
                comments("posmom errors: relative spatial L2 errors against a reference run",
                         "metric name, value dimensionless, M moments, N nodes per axis, nx cells, kn Knudsen number"),
                {"metric", "value", "M", "N", "nx", "kn"});
  for (const ErrorReport& r : reports) {
    std::vector<std::string> row{r.metric, format_number(r.value)};
    row.insert(row.end(), config.begin(), config.end());
    out.row(row);
  }
}

void add_config(Manifest& m, const RunConfig& rc) {
  m.emplace_back("solver", to_string(rc.solver));
  m.emplace_back("case", rc.case_name);
  for (const auto& [k, v] : to_config(rc.spec)) m.emplace_back("case." + k, v);
  for (const auto& [k, v] : rc.source.values()) {
    if (k != "solver" && k != "case" && k.rfind("case.", 0) != 0) m.emplace_back("config." + k, v);
  }
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int finish(const RunConfig& rc, Manifest m, int code, const std::string& error, double seconds, std::ostream& log) {
  Manifest out{{"status", code == kExitOk ? "ok" : "failed"}, {"exit_code", std::to_string(code)}};
  if (!error.empty()) out.emplace_back("error", error);
  add_config(out, rc);
  out.insert(out.end(), m.begin(), m.end());
  out.emplace_back("time.total", format_number(seconds));
  write_manifest(rc.output_dir / "manifest.txt", out);
  log << (code == kExitOk ? "done" : "failed") << ": " << rc.output_dir.string() << '\n';
  return code;
}

std::string describe_failure(const std::exception& e) {
  std::string msg = e.what();
  if (const auto* f = dynamic_cast<const SolverFailure*>(&e)) {
    msg += " (step " + std::to_string(f->step()) + ", cell " + std::to_string(f->cell()) + ", pdf " +
           std::to_string(f->pdf()) + ", moments";
    for (double v : f->moments()) msg += " " + format_number(v);
    msg += ")";
  }
  return msg;
}

std::vector<std::string> point_columns(const RunConfig& rc, int nodes) {
  return {std::to_string(rc.spec.moments), std::to_string(nodes), std::to_string(rc.spec.nx), format_number(rc.spec.kn)};
}

void maybe_errors(const RunConfig& rc, const Snapshot& own, int nodes, std::ostream& log) {
  if (rc.reference_dir.empty()) return;
  const auto reports = errors_against(own, final_snapshot(rc.reference_dir));
  write_errors(rc.output_dir, reports, point_columns(rc, nodes));
  for (const auto& r : reports) log << "  " << r.metric << " = " << format_number(r.value) << '\n';
}

int run_moments(const RunConfig& rc, std::ostream& log) {
  const auto start = Clock::now();
  const CaseSpec& spec = rc.spec;
  const auto grid = make_grid(spec, spec.nodes, spec.box);
  const auto basis = build_basis(grid, spec.moments);
  KineticConfig kc;
  kc.kn = spec.kn;
  kc.t_end = spec.t_end;
  kc.dt = rc.dt > 0.0 ? rc.dt : case_time_step(spec, *grid);
  kc.cfl_mode = rc.cfl_mode;
  kc.cfl_safety = rc.cfl_safety;
  kc.allow_unsafe_dt = rc.allow_unsafe_dt;
  kc.ghosts = rc.ghosts;
  kc.closure = rc.closure;
  kc.entropy = rc.entropy;
  kc.output_times = rc.output_times;
  kc.max_steps = rc.max_steps;

  const Mesh mesh = spec.mesh();
  CsvWriter fields = open_fields(rc.output_dir, spec.dim);
  CsvWriter diag(rc.output_dir / "diagnostics.csv",
                 comments("posmom diagnostics: one row per time step",
                          "step index, t time after the step, dt time step, E energy sum_i ||lambda_i||^2 after the "
                          "step, B_k B_M B_in bound terms, bound_held 1 if E <= B_k + B_M + B_in, min_weight "
                          "smallest closure weight, qp_iters_mean, qp_fallbacks, entropy_iters_mean"),
                 {"step", "t", "dt", "E", "B_k", "B_M", "B_in", "bound_held", "min_weight", "qp_iters_mean",
                  "qp_fallbacks", "entropy_iters_mean"});
  Manifest m;
  try {
    KineticSolver solver(basis, make_boundary(spec, *grid), kc);
    FieldState state = solver.initialize(mesh, spec.initial_data());
    if (!rc.output_times.empty() && rc.output_times.front() == 0.0) {
      write_fields(fields, mesh, 0.0, conserved_field(*basis, state));
    }
    long fallbacks = 0;
    const auto observer = [&](const FieldState&, const StepDiagnostics& d) {
      diag.row(std::vector<double>{static_cast<double>(d.step), d.t, d.dt, d.energy.E, d.energy.B_k, d.energy.B_M,
                                   d.energy.B_in, d.energy_bound_held ? 1.0 : 0.0, d.min_weight,
                                   d.qp_iterations_mean, static_cast<double>(d.qp_fallbacks),
                                   d.entropy_iterations_mean});
      fallbacks += d.qp_fallbacks;
    };
    const double dt = solver.time_step(mesh);
    log << "moments: case " << rc.case_name << ", M " << spec.moments << ", N " << spec.nodes << ", nx " << spec.nx
        << ", dt " << format_number(dt) << '\n';
    const EvolveResult result = solver.evolve(std::move(state), observer);
    for (const FieldState& s : result.snapshots) write_fields(fields, mesh, s.time, conserved_field(*basis, s));
    if (result.snapshots.empty()) {
      write_fields(fields, mesh, result.final_state.time, conserved_field(*basis, result.final_state));
    }
    fields.flush();
    diag.flush();
    m.emplace_back("steps", std::to_string(result.trace.size()));
    m.emplace_back("dt", format_number(solver.time_step(mesh)));
    m.emplace_back("qp_fallbacks", std::to_string(fallbacks));
    m.emplace_back("energy_bound_held", result.energy_bound_held ? "true" : "false");
    m.emplace_back("sigma_min", format_number(result.constants.sigma_min));
    m.emplace_back("sigma_max", format_number(result.constants.sigma_max));
    m.emplace_back("kappa", format_number(result.constants.kappa));
    m.emplace_back("time.entropy", format_number(result.timings.entropy));
    m.emplace_back("time.collision", format_number(result.timings.collision));
    m.emplace_back("time.closure", format_number(result.timings.closure));
    m.emplace_back("time.transport", format_number(result.timings.transport));
    maybe_errors(rc, Snapshot{mesh, result.final_state.time, conserved_field(*basis, result.final_state)}, spec.nodes,
                 log);
  } catch (const std::exception& e) {
    const std::string msg = describe_failure(e);
    fields.failure(msg);
    diag.failure(msg);
    log << "error: " << msg << '\n';
    return finish(rc, m, kExitSolverFailure, msg, seconds_since(start), log);
  }
  return finish(rc, m, kExitOk, "", seconds_since(start), log);
}

int run_dvm(const RunConfig& rc, std::ostream& log) {
  const auto start = Clock::now();
  const CaseSpec& spec = rc.spec;
  CsvWriter fields = open_fields(rc.output_dir, spec.dim);
  Manifest m;
  try {
    if (rc.refine) {
      CsvWriter refine(rc.output_dir / "refinement.csv",
                       comments("posmom refinement log: one row per reference run",
                                "cycle index, box_lo box_hi velocity box, N nodes per axis, delta max relative change "
                                "of the conserved totals against the previous N (nan for the first N of a box)"),
                       {"cycle", "box_lo", "box_hi", "N", "delta"});
      int cycle = 0;
      const auto observer = [&](const RefinementCycle& c) {
        refine.row(std::vector<double>{static_cast<double>(cycle++), c.box.lo, c.box.hi, static_cast<double>(c.nodes),
                                       c.delta});
        refine.flush();
        log << "refine: box [" << format_number(c.box.lo) << ", " << format_number(c.box.hi) << "], N " << c.nodes
            << ", delta " << format_number(c.delta) << '\n';
      };
      const RefinementOutcome outcome = refine_reference(spec, rc.refinement, observer);
      const auto grid = make_grid(spec, outcome.nodes, outcome.box);
      write_fields(fields, outcome.solution.mesh, outcome.solution.time, conserved_field(*grid, outcome.solution));
      m.emplace_back("refine.converged", outcome.converged ? "true" : "false");
      m.emplace_back("refine.box_lo", format_number(outcome.box.lo));
      m.emplace_back("refine.box_hi", format_number(outcome.box.hi));
      m.emplace_back("refine.N", std::to_string(outcome.nodes));
      if (!outcome.converged) log << "refinement did not converge within the caps; increase nx\n";
      return finish(rc, m, kExitOk, "", seconds_since(start), log);
    }

    const auto grid = make_grid(spec, spec.reference_nodes, spec.box);
    DvmConfig dc;
    dc.kn = spec.kn;
    dc.t_end = spec.t_end;
    dc.dt = rc.dt > 0.0 ? rc.dt : case_time_step(spec, *grid);
    dc.cfl_mode = rc.cfl_mode;
    dc.cfl_safety = rc.cfl_safety;
    dc.allow_unsafe_dt = rc.allow_unsafe_dt;
    dc.collision = rc.collision;
    dc.entropy = rc.entropy;
    dc.output_times = rc.output_times;
    dc.max_steps = rc.max_steps;
    const Mesh mesh = spec.mesh();
    CsvWriter diag(rc.output_dir / "diagnostics.csv",
                   comments("posmom dvm diagnostics: one row per time step",
                            "step index, t time after the step, dt time step, min_weight smallest node value, "
                            "entropy_iters_mean"),
                   {"step", "t", "dt", "min_weight", "entropy_iters_mean"});
    const DvmSolver solver(grid, make_boundary(spec, *grid), dc);
    const double dt = solver.time_step(mesh);
    log << "dvm: case " << rc.case_name << ", N " << spec.reference_nodes << ", nx " << spec.nx << ", dt "
        << format_number(dt) << '\n';
    DvmState state = dvm_initialize(*grid, mesh, spec.initial_data());
    if (!rc.output_times.empty() && rc.output_times.front() == 0.0) {
      write_fields(fields, mesh, 0.0, conserved_field(*grid, state));
    }
    const auto observer = [&](const DvmState&, const DvmStepDiagnostics& d) {
      diag.row(std::vector<double>{static_cast<double>(d.step), d.t, d.dt, d.min_weight, d.entropy_iterations_mean});
    };
    DvmResult result;
    try {
      result = solver.evolve(std::move(state), observer);
    } catch (...) {
      diag.failure("run stopped, see manifest");
      throw;
    }
    for (const DvmState& s : result.snapshots) write_fields(fields, mesh, s.time, conserved_field(*grid, s));
    if (result.snapshots.empty()) {
      write_fields(fields, mesh, result.final_state.time, conserved_field(*grid, result.final_state));
    }
    m.emplace_back("steps", std::to_string(result.trace.size()));
    m.emplace_back("dt", format_number(solver.time_step(mesh)));
    maybe_errors(rc, Snapshot{mesh, result.final_state.time, conserved_field(*grid, result.final_state)},
                 spec.reference_nodes, log);
  } catch (const std::exception& e) {
    const std::string msg = describe_failure(e);
    fields.failure(msg);
    log << "error: " << msg << '\n';
    return finish(rc, m, kExitSolverFailure, msg, seconds_since(start), log);
  }
  return finish(rc, m, kExitOk, "", seconds_since(start), log);
}

int run_closure_study(const RunConfig& rc, std::ostream& log) {
  const auto start = Clock::now();
  const CaseSpec& spec = rc.spec;
  const auto grid = make_grid(spec, spec.nodes, spec.box);
  Eigen::VectorXd f(grid->size());
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = spec.bimodal(grid->component(0)[i]);
  CsvWriter out(rc.output_dir / "closure_study.csv",
                comments("posmom closure study: bimodal pdf reconstructed from its first M moments",
                         "M moments, E_M relative error of the M-th moment (constrained), E_M_dg (unconstrained), "
                         "l2_error l2_error_dg quadrature-weighted relative L2 node errors, min_weight min_weight_dg "
                         "smallest node values, solved 1 if the QP converged, qp_iterations"),
                {"M", "E_M", "E_M_dg", "l2_error", "l2_error_dg", "min_weight", "min_weight_dg", "solved",
                 "qp_iterations"});
  int code = kExitOk;
  std::string error;
  for (int order = rc.study_m_min; order <= rc.study_m_max; ++order) {
    const auto basis = build_basis(grid, order);
    const PositiveL2Closure closure(basis, rc.closure);
    const MomentVector lambda = moments(*basis, f);
    const ClosureSolution sol = closure.solve(lambda);
    const WeightVector dg = closure.solve_dg(lambda);
    const bool solved = sol.status == ClosureStatus::kSolved;
    out.row(std::vector<double>{static_cast<double>(order), error_highest_moment(*basis, f, sol.W),
                                error_highest_moment(*basis, f, dg), relative_l2_node_error(*grid, f, sol.W),
                                relative_l2_node_error(*grid, f, dg), sol.W.minCoeff(), dg.minCoeff(),
                                solved ? 1.0 : 0.0, static_cast<double>(sol.iterations)});
    if (!solved) {
      code = kExitSolverFailure;
      error = "closure " + std::string(to_string(sol.status)) + " at M = " + std::to_string(order);
    }
  }
  log << "closure study: M " << rc.study_m_min << ".." << rc.study_m_max << '\n';
  return finish(rc, {}, code, error, seconds_since(start), log);
}

int run_feasibility(const RunConfig& rc, std::ostream& log) {
  const auto start = Clock::now();
  const CaseSpec& spec = rc.spec;
  const auto grid = make_grid(spec, spec.nodes, spec.box);
  const auto basis = build_basis(grid, spec.moments);
  const PositiveL2Closure closure(basis, rc.closure);
  std::mt19937_64 rng(rc.seed);
  std::uniform_real_distribution<double> dist(1e-3, 1.0);
  CsvWriter out(rc.output_dir / "feasibility.csv",
                comments("posmom feasibility: closures of moments of random positive node vectors",
                         "sample index, solved 1 if the QP converged, relative_residual ||ALW - lambda|| / ||lambda||, "
                         "min_weight"),
                {"sample", "solved", "relative_residual", "min_weight"});
  int failures = 0;
  for (int s = 0; s < rc.samples; ++s) {
    Eigen::VectorXd z(grid->size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = dist(rng);
    const ClosureSolution sol = closure.solve(moments(*basis, z));
    const bool solved = sol.status == ClosureStatus::kSolved;
    failures += solved ? 0 : 1;
    out.row(std::vector<double>{static_cast<double>(s), solved ? 1.0 : 0.0, sol.relative_residual, sol.min_weight});
  }
  log << "feasibility: " << rc.samples - failures << "/" << rc.samples << " solved\n";
  Manifest m{{"failures", std::to_string(failures)}};
  return finish(rc, m, failures == 0 ? kExitOk : kExitSolverFailure,
                failures == 0 ? "" : std::to_string(failures) + " closures failed", seconds_since(start), log);
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
  fs::create_directories(config.output_dir);
  switch (config.solver) {
    case SolverKind::kMoments:
      return run_moments(config, log);
    case SolverKind::kDvm:
      return run_dvm(config, log);
    case SolverKind::kClosureStudy:
      return run_closure_study(config, log);
    case SolverKind::kFeasibility:
      return run_feasibility(config, log);
  }
  return kExitUsage;
}

int compare(const fs::path& run_a, const fs::path& run_b, const fs::path& output_dir, std::ostream& log) {
  const Snapshot a = final_snapshot(run_a);
  const Snapshot b = final_snapshot(run_b);
  if (std::abs(a.t - b.t) > 1e-12 * std::max(1.0, std::abs(b.t))) {
    throw ConfigurationError("compare: final times differ (" + format_number(a.t) + " vs " + format_number(b.t) + ")");
  }
  const auto reports = errors_against(a, b);
  std::vector<std::string> point{"nan", "nan", std::to_string(a.mesh.nx), "nan"};
  if (fs::exists(run_a / "manifest.txt")) {
    const auto manifest = read_manifest(run_a / "manifest.txt");
    auto pick = [&](const std::string& key, std::string& slot) {
      const auto it = manifest.find(key);
      if (it != manifest.end()) slot = it->second;
    };
    pick("case.M", point[0]);
    pick(manifest.count("solver") && manifest.at("solver") == "dvm" ? "case.N_ref" : "case.N", point[1]);
    pick("case.kn", point[3]);
  }
  fs::create_directories(output_dir);
  write_errors(output_dir, reports, point);
  for (const auto& r : reports) log << r.metric << " = " << format_number(r.value) << '\n';
  return kExitOk;
}

int sweep(const Config& base, std::ostream& log) {
  auto values = [&](const std::string& sweep_key, const std::string& case_key, const std::string& fallback) {
    std::vector<std::string> v = base.get_list(sweep_key);
    if (v.empty()) v.push_back(base.get("case." + case_key, fallback));
    return v;
  };
  // Resolve once to validate the base and pick up the case defaults.
  Config stripped;
  for (const auto& [k, v] : base.values()) {
    if (k.rfind("sweep.", 0) != 0) stripped.set(k, v);
  }
  const RunConfig defaults = resolve(stripped);
  const auto ms = values("sweep.M", "M", std::to_string(defaults.spec.moments));
  const auto nxs = values("sweep.nx", "nx", std::to_string(defaults.spec.nx));
  const auto kns = values("sweep.kn", "kn", format_number(defaults.spec.kn));

  fs::create_directories(defaults.output_dir);
  CsvWriter summary(defaults.output_dir / "sweep.csv",
                    comments("posmom sweep summary: one row per point",
                             "M moments, nx cells, kn Knudsen number, exit_code of the run, E_cons relative error "
                             "against the reference (nan without one)"),
                    {"M", "nx", "kn", "exit_code", "E_cons"});
  int worst = kExitOk;
  for (const auto& mv : ms) {
    for (const auto& nxv : nxs) {
      for (const auto& knv : kns) {
        Config point = stripped;
        point.set("solver.M", mv);
        point.set("case.nx", nxv);
        point.set("case.kn", knv);
        point.set("output.dir", (defaults.output_dir / ("M" + mv + "_nx" + nxv + "_kn" + knv)).string());
        const RunConfig rc = resolve(point);
        const int code = run(rc, log);
        worst = std::max(worst, code);
        double e_cons = std::nan("");
        if (code == kExitOk && fs::exists(rc.output_dir / "errors.csv")) {
          std::ifstream in(rc.output_dir / "errors.csv");
          std::string line;
          while (std::getline(in, line)) {
            if (line.rfind("E_cons,", 0) == 0) e_cons = std::stod(line.substr(7, line.find(',', 7) - 7));
          }
        }
        summary.row(std::vector<std::string>{mv, nxv, knv, std::to_string(code), format_number(e_cons)});
        summary.flush();
      }
    }
  }
  return worst;
}

}  // namespace posmom::cli
