#include "posmom/dvm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "posmom/errors.hpp"

namespace posmom {

namespace {

using Eigen::ArrayXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double smallest_spacing(const Mesh& mesh) { return mesh.dim == 1 ? mesh.dx() : std::min(mesh.dx(), mesh.dy()); }

VectorXd cell_conserved(const VelocityGrid& grid, const VectorXd& h1, const VectorXd* h2) {
  const int dim = grid.dim();
  const VectorXd& l = grid.weights();
  VectorXd c(dim + 2);
  const VectorXd lh = l.cwiseProduct(h1);
  c[0] = lh.sum();
  ArrayXd r2 = ArrayXd::Zero(h1.size());
  for (int d = 0; d < dim; ++d) {
    c[1 + d] = grid.component(d).dot(lh);
    r2 += grid.component(d).array().square();
  }
  c[dim + 1] = (r2 * lh.array()).sum();
  if (h2 != nullptr) c[dim + 1] += l.dot(*h2);
  return c;
}

MacroState macro_from_conserved(const VectorXd& c, int dim) {
  MacroState m;
  m.rho = c[0];
  if (!(m.rho > 0.0)) throw NonPhysicalState("dvm: non-positive density");
  double v2 = 0.0;
  for (int d = 0; d < dim; ++d) {
    m.v[d] = c[1 + d] / c[0];
    v2 += m.v[d] * m.v[d];
  }
  m.theta = (c[dim + 1] / c[0] - v2) / (dim == 1 ? 1.0 : 3.0);
  if (!(m.theta > 0.0)) throw NonPhysicalState("dvm: non-positive temperature");
  return m;
}

std::vector<double> to_vector(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

DvmState dvm_initialize(const VelocityGrid& grid, const Mesh& mesh, const InitialData& initial, int points) {
  DvmState s;
  s.mesh = mesh;
  if (grid.dim() == 1) {
    s.h1 = cell_average_weights(grid, mesh, initial, MaxwellianVariant::kFull, points);
  } else {
    s.h1 = cell_average_weights(grid, mesh, initial, MaxwellianVariant::kH1, points);
    s.h2 = cell_average_weights(grid, mesh, initial, MaxwellianVariant::kH2, points);
  }
  return s;
}

DvmSolver::DvmSolver(std::shared_ptr<const VelocityGrid> grid, BoundaryData boundary, DvmConfig config)
    : grid_(std::move(grid)), boundary_(std::move(boundary)), config_(std::move(config)) {
  if (!grid_) throw InvalidArgument("DvmSolver: null grid");
  if (!(config_.kn > 0.0)) throw ConfigurationError("DvmSolver: Kn must be positive");
  for (int s = 0; s < 2 * grid_->dim(); ++s) {
    if (boundary_.h1[s].size() != grid_->size() || (grid_->dim() == 2 && boundary_.h2[s].size() != grid_->size())) {
      throw ConfigurationError("DvmSolver: boundary ghost weights do not match the velocity grid");
    }
  }
}

double DvmSolver::time_step(const Mesh& mesh) const {
  const double h = smallest_spacing(mesh);
  const double dt = config_.dt > 0.0 ? config_.dt : cfl_dt(h, *grid_, config_.cfl_mode, config_.cfl_safety);
  const double limit = cfl_dt(h, *grid_, CflMode::kFeasibility);
  if (dt > limit * (1.0 + 1e-12) && !config_.allow_unsafe_dt) {
    throw CflViolation("time step " + std::to_string(dt) + " exceeds the feasibility limit " + std::to_string(limit));
  }
  return dt;
}

DvmStepDiagnostics DvmSolver::step(DvmState& state, double dt, long step_index) const {
  const VelocityGrid& grid = *grid_;
  const Mesh& mesh = state.mesh;
  const Eigen::Index cells = mesh.cells();
  const bool two_d = grid.dim() == 2;
  const int pdfs = two_d ? 2 : 1;
  if (mesh.dim != grid.dim() || state.h1.rows() != grid.size() || state.h1.cols() != cells ||
      (two_d && (state.h2.rows() != grid.size() || state.h2.cols() != cells))) {
    throw InvalidArgument("dvm_step: state does not match mesh and grid");
  }
  DvmStepDiagnostics diag;
  diag.step = step_index;
  diag.dt = dt;

  // Relaxation targets.
  std::array<MatrixXd, 2> target;
  for (int p = 0; p < pdfs; ++p) target[p].resize(grid.size(), cells);
  VectorXd rate(cells);
  long entropy_iterations = 0;
  for (Eigen::Index c = 0; c < cells; ++c) {
    const VectorXd h1 = state.h1.col(c);
    const VectorXd h2 = two_d ? VectorXd(state.h2.col(c)) : VectorXd();
    try {
      const VectorXd conserved = cell_conserved(grid, h1, two_d ? &h2 : nullptr);
      const MacroState macro = macro_from_conserved(conserved, grid.dim());
      const EntropySolution e = discrete_maxwellian(grid, conserved, config_.entropy);
      entropy_iterations += e.iterations;
      target[0].col(c) = e.W;
      if (two_d) target[1].col(c) = e.W2;
      rate[c] = dt * collision_frequency(macro, config_.kn, config_.c_coll, config_.omega);
    } catch (const std::exception& ex) {
      throw SolverFailure(std::string("dvm entropy step: ") + ex.what(), step_index, c, 0, to_vector(h1));
    }
  }
  diag.entropy_iterations_mean = static_cast<double>(entropy_iterations) / cells;

  diag.boundary_inflow = MatrixXd::Zero(grid.size(), pdfs);
  diag.min_weight = std::numeric_limits<double>::infinity();
  for (int p = 0; p < pdfs; ++p) {
    MatrixXd& w = p == 0 ? state.h1 : state.h2;
    const auto& ghosts = p == 0 ? boundary_.h1 : boundary_.h2;
    const ArrayXd r = rate.array();
    MatrixXd next;
    MatrixXd transported;
    if (config_.collision == DvmCollision::kImplicitSplit) {
      transported = (w + target[p] * r.matrix().asDiagonal()) * (1.0 / (1.0 + r)).matrix().asDiagonal();
      next = transported;
    } else {
      transported = w;
      next = w + (target[p] - w) * r.matrix().asDiagonal();
    }
    for (int axis = 0; axis < mesh.dim; ++axis) {
      const VectorXd& xi = grid.component(axis);
      const VectorXd xp = xi.cwiseMax(0.0);
      const VectorXd xm = xi.cwiseMin(0.0);
      const double ratio = dt / (axis == 0 ? mesh.dx() : mesh.dy());
      const VectorXd ghost_lo = xp.cwiseProduct(ghosts[2 * axis]);
      const VectorXd ghost_hi = xm.cwiseProduct(ghosts[2 * axis + 1]);
      const int n = axis == 0 ? mesh.nx : mesh.ny;
      const int lines = axis == 0 ? mesh.ny : mesh.nx;
      VectorXd f(grid.size());
      for (int line = 0; line < lines; ++line) {
        auto cell = [&](int i) { return axis == 0 ? mesh.index(i, line) : mesh.index(line, i); };
        for (int face = 0; face <= n; ++face) {
          if (face < n) f = xm.cwiseProduct(transported.col(cell(face)));
          else f = ghost_hi;
          if (face > 0) f += xp.cwiseProduct(transported.col(cell(face - 1)));
          else f += ghost_lo;
          f *= ratio;
          if (face > 0) next.col(cell(face - 1)) -= f;
          if (face < n) next.col(cell(face)) += f;
          if (face == 0) diag.boundary_inflow.col(p) += f;
          if (face == n) diag.boundary_inflow.col(p) -= f;
        }
      }
    }
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    const double min_w = next.minCoeff(&row, &col);
    diag.min_weight = std::min(diag.min_weight, min_w);
    if (min_w < 0.0) {
      throw CflViolation("dvm step " + std::to_string(step_index) + ": negative weight " + std::to_string(min_w) +
                         " at cell " + std::to_string(col) + ", node " + std::to_string(row) + " (dt " +
                         std::to_string(dt) + ")");
    }
    w = std::move(next);
  }
  state.time += dt;
  diag.t = state.time;
  return diag;
}

DvmResult DvmSolver::evolve(DvmState initial, const DvmObserver& observer) const {
  const double dt = time_step(initial.mesh);
  std::vector<double> targets;
  for (double t : config_.output_times) {
    if (t > initial.time && t < config_.t_end) targets.push_back(t);
  }
  std::sort(targets.begin(), targets.end());
  targets.push_back(config_.t_end);

  DvmResult result;
  DvmState state = std::move(initial);
  long k = 0;
  for (double target : targets) {
    if (!(target > state.time)) continue;
    const long steps = std::max(1L, static_cast<long>(std::ceil((target - state.time) / dt - 1e-9)));
    const double start_time = state.time;
    for (long s = 0; s < steps; ++s) {
      const double h = s + 1 < steps ? dt : target - state.time;
      DvmStepDiagnostics diag = step(state, h, k);
      state.time = s + 1 == steps ? target : start_time + (s + 1) * dt;
      diag.t = state.time;
      if (observer) observer(state, diag);
      result.trace.push_back(std::move(diag));
      ++k;
      if (config_.max_steps > 0 && k >= config_.max_steps) {
        result.final_state = std::move(state);
        return result;
      }
    }
    result.snapshots.push_back(state);
  }
  result.final_state = std::move(state);
  return result;
}

DvmStepDiagnostics dvm_step(DvmState& state, std::shared_ptr<const VelocityGrid> grid, const BoundaryData& boundary,
                            double dt, const DvmConfig& config) {
  return DvmSolver(std::move(grid), boundary, config).step(state, dt);
}

Eigen::MatrixXd conserved_field(const VelocityGrid& grid, const DvmState& state) {
  const Eigen::Index cells = state.mesh.cells();
  MatrixXd out(grid.dim() + 2, cells);
  for (Eigen::Index c = 0; c < cells; ++c) {
    const VectorXd h1 = state.h1.col(c);
    if (grid.dim() == 1) {
      out.col(c) = cell_conserved(grid, h1, nullptr);
    } else {
      const VectorXd h2 = state.h2.col(c);
      out.col(c) = cell_conserved(grid, h1, &h2);
    }
  }
  return out;
}

RefinementOutcome refine_reference(const CaseSpec& case_spec, const RefinementOptions& options,
                                   const RefinementObserver& observer) {
  if (case_spec.id == CaseId::kBimodal) throw ConfigurationError("refine_reference: bimodal case has no evolution");
  if (options.n_start < 1 || options.n_step < 1 || options.n_max < options.n_start) {
    throw ConfigurationError("refine_reference: invalid node schedule");
  }
  CaseSpec spec = case_spec;
  if (options.nx > 0) {
    spec.nx = options.nx;
    if (spec.dim == 2) spec.ny = options.nx;
  }
  const Mesh mesh = spec.mesh();
  const double cell_volume = spec.dim == 1 ? mesh.dx() : mesh.dx() * mesh.dy();

  const auto cutoff = velocity_cutoff(spec, options.c);
  VelocityBox box = cutoff[0];
  if (spec.dim == 2) box = {std::min(cutoff[0].lo, cutoff[1].lo), std::max(cutoff[0].hi, cutoff[1].hi)};

  RefinementOutcome outcome;
  for (;;) {
    Eigen::VectorXd previous;
    for (int n = options.n_start; n <= options.n_max; n += options.n_step) {
      const auto grid = make_grid(spec, n, box);
      DvmConfig config;
      config.kn = spec.kn;
      config.t_end = spec.t_end;
      if (options.dt_factor > 0.0) config.dt = options.dt_factor * smallest_spacing(mesh) / box.max_speed();
      const DvmSolver solver(grid, make_boundary(spec, *grid), config);
      DvmResult run = solver.evolve(dvm_initialize(*grid, mesh, spec.initial_data()));

      const MatrixXd conserved = conserved_field(*grid, run.final_state);
      Eigen::VectorXd norms(conserved.rows());
      for (Eigen::Index q = 0; q < conserved.rows(); ++q) norms[q] = std::sqrt(cell_volume * conserved.row(q).squaredNorm());

      RefinementCycle cycle;
      cycle.box = box;
      cycle.nodes = n;
      cycle.delta = std::numeric_limits<double>::quiet_NaN();
      if (previous.size() == norms.size()) {
        cycle.delta = 0.0;
        for (Eigen::Index q = 0; q < norms.size(); ++q) {
          // Zero totals (momentum of a symmetric state) fall back to absolute change.
          const double scale = previous[q] > 0.0 ? previous[q] : 1.0;
          cycle.delta = std::max(cycle.delta, std::abs(norms[q] - previous[q]) / scale);
        }
      }
      outcome.cycles.push_back(cycle);
      if (observer) observer(cycle);
      outcome.box = box;
      outcome.nodes = n;
      outcome.solution = std::move(run.final_state);
      if (cycle.delta < options.tolerance) {
        outcome.converged = true;
        return outcome;
      }
      previous = norms;
    }
    if (box.half_width() + options.widen > options.max_half_width + 1e-12) return outcome;
    box.lo -= options.widen;
    box.hi += options.widen;
  }
}

}  // namespace posmom
