#include "posmom/kinetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "posmom/errors.hpp"

namespace posmom {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> to_vector(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double smallest_spacing(const Mesh& mesh) { return mesh.dim == 1 ? mesh.dx() : std::min(mesh.dx(), mesh.dy()); }

}  // namespace

Mesh make_mesh_1d(int nx, double lo, double hi) {
  if (nx < 1 || !(lo < hi)) throw InvalidArgument("make_mesh_1d: need nx >= 1 and lo < hi");
  Mesh m;
  m.dim = 1;
  m.nx = nx;
  m.ny = 1;
  m.lo = {lo, 0.0};
  m.hi = {hi, 1.0};
  return m;
}

Mesh make_mesh_2d(int nx, int ny, std::array<double, 2> lo, std::array<double, 2> hi) {
  if (nx < 1 || ny < 1 || !(lo[0] < hi[0]) || !(lo[1] < hi[1])) {
    throw InvalidArgument("make_mesh_2d: need positive cell counts and non-empty extents");
  }
  Mesh m;
  m.dim = 2;
  m.nx = nx;
  m.ny = ny;
  m.lo = lo;
  m.hi = hi;
  return m;
}

BoundaryData make_boundary(const VelocityGrid& grid, const std::array<MacroState, 4>& inflow) {
  BoundaryData b;
  b.inflow = inflow;
  const int sides = 2 * grid.dim();
  for (int s = 0; s < sides; ++s) {
    if (grid.dim() == 1) {
      b.h1[s] = maxwellian_values(grid, inflow[s], MaxwellianVariant::kFull);
    } else {
      b.h1[s] = maxwellian_values(grid, inflow[s], MaxwellianVariant::kH1);
      b.h2[s] = maxwellian_values(grid, inflow[s], MaxwellianVariant::kH2);
    }
  }
  return b;
}

double collision_frequency(const MacroState& macro, double kn, double c, double omega) {
  if (!(kn > 0.0)) throw InvalidArgument("collision_frequency: Kn must be positive");
  if (!(macro.rho > 0.0) || !(macro.theta > 0.0)) throw NonPhysicalState("collision_frequency: invalid macro state");
  return c * macro.rho * std::pow(macro.theta, 1.0 - omega) / kn;
}

MomentVector collision_step(const MomentVector& lambda, const MomentVector& lambda_m, double dt, double tau) {
  if (lambda.size() != lambda_m.size()) throw InvalidArgument("collision_step: length mismatch");
  if (!(dt > 0.0) || !(tau > 0.0)) throw InvalidArgument("collision_step: dt and tau must be positive");
  const double r = dt / tau;
  return (lambda + r * lambda_m) / (1.0 + r);
}

double cfl_dt(double dx, const VelocityGrid& grid, CflMode mode, double safety) {
  if (!(dx > 0.0) || !(safety > 0.0)) throw InvalidArgument("cfl_dt: dx and safety must be positive");
  double speed = 0.0;
  for (int d = 0; d < grid.dim(); ++d) speed = std::max(speed, grid.box(d).max_speed());
  double factor = grid.dim() == 1 ? 1.0 : 0.5;
  if (mode == CflMode::kStability) factor *= 0.5;
  return safety * factor * dx / speed;
}

FluxOperator::FluxOperator(const MomentBasis& basis, int axis) {
  if (axis < 0 || axis >= basis.dim()) throw InvalidArgument("FluxOperator: axis out of range");
  const VectorXd& xi = basis.Xi(axis);
  minus_ = 0.5 * basis.AL() * (xi - xi.cwiseAbs()).asDiagonal();
  plus_ = 0.5 * basis.AL() * (xi + xi.cwiseAbs()).asDiagonal();
}

MomentVector FluxOperator::operator()(const WeightVector& w1, const WeightVector& w2) const {
  if (w1.size() != minus_.cols() || w2.size() != plus_.cols()) throw InvalidArgument("kinetic_flux: wrong length");
  return minus_ * w1 + plus_ * w2;
}

MomentVector kinetic_flux(const MomentBasis& basis, const WeightVector& w1, const WeightVector& w2, int axis) {
  return FluxOperator(basis, axis)(w1, w2);
}

Eigen::MatrixXd cell_average_weights(const VelocityGrid& grid, const Mesh& mesh, const InitialData& initial,
                                     MaxwellianVariant variant, int points) {
  if (mesh.dim != grid.dim()) throw InvalidArgument("cell_average_weights: mesh and grid dimensions differ");
  const QuadratureRule1D unit = gauss_legendre(points, -0.5, 0.5);
  const int py = mesh.dim == 1 ? 1 : points;
  MatrixXd out(grid.size(), mesh.cells());
  std::vector<MacroState> samples;
  std::vector<double> weights;
  for (int i = 0; i < mesh.nx; ++i) {
    for (int j = 0; j < mesh.ny; ++j) {
      samples.clear();
      weights.clear();
      for (int p = 0; p < points; ++p) {
        const double x = mesh.center(0, i) + unit.nodes[p] * mesh.dx();
        for (int q = 0; q < py; ++q) {
          const double y = mesh.dim == 1 ? 0.0 : mesh.center(1, j) + unit.nodes[q] * mesh.dy();
          samples.push_back(initial(x, y));
          weights.push_back(unit.weights[p] * (mesh.dim == 1 ? 1.0 : unit.weights[q]));
        }
      }
      // The sampled pdf is linear in rho: when v and theta are uniform over
      // the cell one evaluation suffices.
      const MacroState& first = samples.front();
      const bool uniform = std::all_of(samples.begin(), samples.end(), [&](const MacroState& m) {
        return m.v == first.v && m.theta == first.theta;
      });
      auto col = out.col(mesh.index(i, j));
      if (uniform) {
        double rho = 0.0;
        for (std::size_t k = 0; k < samples.size(); ++k) rho += weights[k] * samples[k].rho;
        MacroState avg = first;
        avg.rho = rho;
        col = maxwellian_values(grid, avg, variant);
      } else {
        col.setZero();
        for (std::size_t k = 0; k < samples.size(); ++k) col += weights[k] * maxwellian_values(grid, samples[k], variant);
      }
    }
  }
  return out;
}

FieldState initialize(const MomentBasis& basis, const Mesh& mesh, const InitialData& initial, int points) {
  FieldState s;
  s.mesh = mesh;
  const VelocityGrid& grid = basis.grid();
  if (grid.dim() == 1) {
    s.h1 = basis.AL() * cell_average_weights(grid, mesh, initial, MaxwellianVariant::kFull, points);
  } else {
    s.h1 = basis.AL() * cell_average_weights(grid, mesh, initial, MaxwellianVariant::kH1, points);
    s.h2 = basis.AL() * cell_average_weights(grid, mesh, initial, MaxwellianVariant::kH2, points);
  }
  return s;
}

EnergyConstants energy_constants(const MomentBasis& basis) {
  const MatrixXd a_sqrt_l = basis.A() * basis.L().cwiseSqrt().asDiagonal();
  const Eigen::JacobiSVD<MatrixXd> svd(a_sqrt_l);
  const VectorXd& s = svd.singularValues();
  EnergyConstants c;
  c.sigma_max = s.maxCoeff();
  c.sigma_min = s.minCoeff();
  c.kappa = c.sigma_max / c.sigma_min;
  return c;
}

double boundary_seminorm_sq(const VelocityGrid& grid, const Mesh& mesh, const BoundaryData& boundary) {
  double total = 0.0;
  for (int side = 0; side < 2 * grid.dim(); ++side) {
    const int axis = side / 2;
    const double normal = side % 2 == 0 ? -1.0 : 1.0;
    const double faces = grid.dim() == 1 ? 1.0 : (axis == 0 ? mesh.ny : mesh.nx);
    const VectorXd& xi = grid.component(axis);
    for (const auto* ghosts : {&boundary.h1, &boundary.h2}) {
      const WeightVector& f = (*ghosts)[side];
      if (f.size() == 0) continue;
      double s = 0.0;
      for (Eigen::Index k = 0; k < xi.size(); ++k) {
        if (xi[k] * normal <= 0.0) s += std::abs(xi[k]) * f[k] * f[k] * grid.weights()[k];
      }
      total += faces * s;
    }
  }
  return total;
}

EnergyTerms l2_energy_bound_terms(const MomentBasis& basis, const EnergyConstants& constants, const FieldState& state,
                                  double dt, const std::vector<double>& tau, double boundary_seminorm) {
  const Eigen::Index cells = state.mesh.cells();
  if (static_cast<Eigen::Index>(tau.size()) != cells) throw InvalidArgument("l2_energy_bound_terms: one tau per cell");
  const double kappa2 = constants.kappa * constants.kappa;
  const double sigma2 = constants.sigma_max * constants.sigma_max;
  EnergyTerms t;
  double relax = 0.0;
  for (Eigen::Index c = 0; c < cells; ++c) {
    const double r = dt / tau[c];
    double norm2 = state.h1.col(c).squaredNorm();
    if (state.pdf_count() == 2) norm2 += state.h2.col(c).squaredNorm();
    t.E += norm2;
    t.B_k += 2.0 / ((1.0 + r) * (1.0 + r)) * norm2;
    relax += state.pdf_count() * (r / (1.0 + r)) * (r / (1.0 + r));
  }
  t.B_k *= kappa2;
  if (relax > 0.0) {
    const double n = static_cast<double>(basis.node_count());
    const double log_bm = std::log(2.0 * kappa2 * sigma2 * relax) + 3.0 * std::log(n) + 2.0 * n * state.time;
    t.B_M = log_bm >= std::log(std::numeric_limits<double>::max()) ? std::numeric_limits<double>::max()
                                                                    : std::exp(log_bm);
  }
  t.B_in = sigma2 * boundary_seminorm;
  return t;
}

KineticSolver::KineticSolver(std::shared_ptr<const MomentBasis> basis, BoundaryData boundary, KineticConfig config)
    : basis_(std::move(basis)),
      closure_(basis_, config.closure),
      boundary_(std::move(boundary)),
      config_(std::move(config)),
      constants_(energy_constants(*basis_)) {
  if (!(config_.kn > 0.0)) throw ConfigurationError("KineticSolver: Kn must be positive");
  for (int d = 0; d < basis_->dim(); ++d) flux_[d] = FluxOperator(*basis_, d);
  const int sides = 2 * basis_->dim();
  for (int s = 0; s < sides; ++s) {
    if (boundary_.h1[s].size() != basis_->node_count() ||
        (basis_->dim() == 2 && boundary_.h2[s].size() != basis_->node_count())) {
      throw ConfigurationError("KineticSolver: boundary ghost weights do not match the velocity grid");
    }
  }
  if (config_.ghosts == GhostMode::kClosure) {
    for (int s = 0; s < sides; ++s) {
      for (auto* ghosts : {&boundary_.h1, &boundary_.h2}) {
        WeightVector& g = (*ghosts)[s];
        if (g.size() == 0) continue;
        const ClosureSolution sol = closure_.solve(moments(*basis_, g));
        if (sol.status != ClosureStatus::kSolved) {
          throw ConfigurationError("KineticSolver: inflow moments are not realizable on this grid");
        }
        g = sol.W;
      }
    }
  }
}

FieldState KineticSolver::initialize(const Mesh& mesh, const InitialData& initial) const {
  return posmom::initialize(*basis_, mesh, initial);
}

double KineticSolver::time_step(const Mesh& mesh) const {
  const double h = smallest_spacing(mesh);
  const double dt = config_.dt > 0.0 ? config_.dt : cfl_dt(h, basis_->grid(), config_.cfl_mode, config_.cfl_safety);
  const double limit = cfl_dt(h, basis_->grid(), CflMode::kFeasibility);
  if (dt > limit * (1.0 + 1e-12) && !config_.allow_unsafe_dt) {
    throw CflViolation("time step " + std::to_string(dt) + " exceeds the feasibility limit " + std::to_string(limit));
  }
  return dt;
}

void KineticSolver::prepare(const Mesh& mesh) {
  if (mesh.dim != basis_->dim()) throw InvalidArgument("KineticSolver: mesh and basis dimensions differ");
  const bool same = mesh.nx == prepared_mesh_.nx && mesh.ny == prepared_mesh_.ny && mesh.dim == prepared_mesh_.dim &&
                    duals_[0].size() == static_cast<std::size_t>(mesh.cells());
  if (same) return;
  prepared_mesh_ = mesh;
  for (auto& d : duals_) d.assign(static_cast<std::size_t>(mesh.cells()), VectorXd());
  boundary_norm_ = boundary_seminorm_sq(basis_->grid(), mesh, boundary_);
}

StepDiagnostics KineticSolver::step(FieldState& state, double dt, long step_index) {
  prepare(state.mesh);
  const Eigen::Index cells = state.mesh.cells();
  const int pdfs = state.pdf_count();
  const bool two_d = basis_->dim() == 2;
  if (state.h1.cols() != cells || state.h1.rows() != basis_->moment_count() || (two_d && pdfs != 2)) {
    throw InvalidArgument("KineticSolver::step: field does not match mesh and basis");
  }
  StepDiagnostics diag;
  diag.step = step_index;
  diag.dt = dt;

  // Entropy minimization.
  auto start = Clock::now();
  std::vector<double> tau(static_cast<std::size_t>(cells));
  MatrixXd lm1(state.h1.rows(), cells);
  MatrixXd lm2(two_d ? state.h2.rows() : 0, two_d ? cells : 0);
  long entropy_iterations = 0;
  for (Eigen::Index c = 0; c < cells; ++c) {
    try {
      const MacroState macro =
          two_d ? macro_from_moments(*basis_, state.h1.col(c), state.h2.col(c)) : macro_from_moments(*basis_, state.h1.col(c));
      const VectorXd conserved =
          two_d ? raw_conserved(*basis_, state.h1.col(c), state.h2.col(c)) : raw_conserved(*basis_, state.h1.col(c));
      const EntropySolution e = discrete_maxwellian(basis_->grid(), conserved, config_.entropy);
      entropy_iterations += e.iterations;
      tau[c] = 1.0 / collision_frequency(macro, config_.kn, config_.c_coll, config_.omega);
      lm1.col(c) = basis_->AL() * e.W;
      if (two_d) lm2.col(c) = basis_->AL() * e.W2;
    } catch (const std::exception& ex) {
      throw SolverFailure(std::string("entropy step: ") + ex.what(), step_index, c, 0, to_vector(state.h1.col(c)));
    }
  }
  timings_.entropy += seconds_since(start);
  diag.entropy_iterations_mean = static_cast<double>(entropy_iterations) / cells;
  diag.energy = l2_energy_bound_terms(*basis_, constants_, state, dt, tau, boundary_norm_);

  // Collision.
  start = Clock::now();
  for (Eigen::Index c = 0; c < cells; ++c) {
    const double r = dt / tau[c];
    state.h1.col(c) = (state.h1.col(c) + r * lm1.col(c)) / (1.0 + r);
    if (two_d) state.h2.col(c) = (state.h2.col(c) + r * lm2.col(c)) / (1.0 + r);
  }
  timings_.collision += seconds_since(start);

  // Closure.
  start = Clock::now();
  std::array<MatrixXd, 2> weights;
  long qp_iterations = 0;
  diag.min_weight = std::numeric_limits<double>::infinity();
  for (int p = 0; p < pdfs; ++p) {
    const MatrixXd& lambda = p == 0 ? state.h1 : state.h2;
    weights[p].resize(basis_->node_count(), cells);
    for (Eigen::Index c = 0; c < cells; ++c) {
      WarmStart warm;
      warm.dual = duals_[p][c];
      const ClosureSolution sol = closure_.solve(lambda.col(c), warm);
      if (sol.status != ClosureStatus::kSolved) {
        throw SolverFailure(std::string("closure step: ") + to_string(sol.status), step_index, c, p,
                            to_vector(lambda.col(c)));
      }
      duals_[p][c] = sol.dual;
      weights[p].col(c) = sol.W;
      qp_iterations += sol.iterations;
      diag.qp_fallbacks += sol.used_fallback ? 1 : 0;
      diag.min_weight = std::min(diag.min_weight, sol.min_weight);
    }
  }
  timings_.closure += seconds_since(start);
  diag.qp_iterations_mean = static_cast<double>(qp_iterations) / (static_cast<double>(cells) * pdfs);

  // Transport.
  start = Clock::now();
  diag.boundary_inflow = transport(state, weights, dt);
  timings_.transport += seconds_since(start);

  state.time += dt;
  diag.t = state.time;
  diag.energy.E = state.h1.squaredNorm() + (two_d ? state.h2.squaredNorm() : 0.0);
  diag.energy_bound_held = diag.energy.E <= diag.energy.B_k + diag.energy.B_M + diag.energy.B_in;
  return diag;
}

Eigen::MatrixXd KineticSolver::transport(FieldState& state, const std::array<Eigen::MatrixXd, 2>& weights,
                                         double dt) const {
  const Mesh& mesh = state.mesh;
  const int pdfs = state.pdf_count();
  MatrixXd inflow = MatrixXd::Zero(basis_->moment_count(), pdfs);
  for (int p = 0; p < pdfs; ++p) {
    MatrixXd& lambda = p == 0 ? state.h1 : state.h2;
    const MatrixXd& w = weights[p];
    if (w.cols() != mesh.cells() || w.rows() != basis_->node_count()) {
      throw InvalidArgument("transport: weights do not match mesh and grid");
    }
    const auto& ghosts = p == 0 ? boundary_.h1 : boundary_.h2;
    for (int axis = 0; axis < mesh.dim; ++axis) {
      const FluxOperator& flux = flux_[axis];
      const double ratio = dt / (axis == 0 ? mesh.dx() : mesh.dy());
      const MatrixXd up = flux.plus() * w;    // carried by the low-side cell
      const MatrixXd down = flux.minus() * w;  // carried by the high-side cell
      const VectorXd ghost_lo = flux.plus() * ghosts[2 * axis];
      const VectorXd ghost_hi = flux.minus() * ghosts[2 * axis + 1];
      const int n = axis == 0 ? mesh.nx : mesh.ny;
      const int lines = axis == 0 ? mesh.ny : mesh.nx;
      for (int line = 0; line < lines; ++line) {
        auto cell = [&](int i) { return axis == 0 ? mesh.index(i, line) : mesh.index(line, i); };
        for (int face = 0; face <= n; ++face) {
          VectorXd f = face < n ? VectorXd(down.col(cell(face))) : ghost_hi;
          f += face > 0 ? VectorXd(up.col(cell(face - 1))) : ghost_lo;
          f *= ratio;
          if (face > 0) lambda.col(cell(face - 1)) -= f;
          if (face < n) lambda.col(cell(face)) += f;
          if (face == 0) inflow.col(p) += f;
          if (face == n) inflow.col(p) -= f;
        }
      }
    }
  }
  return inflow;
}

EvolveResult KineticSolver::evolve(FieldState initial, const StepObserver& observer) {
  prepare(initial.mesh);
  const double dt = time_step(initial.mesh);
  std::vector<double> targets;
  for (double t : config_.output_times) {
    if (t > initial.time && t < config_.t_end) targets.push_back(t);
  }
  std::sort(targets.begin(), targets.end());
  targets.push_back(config_.t_end);

  EvolveResult result;
  result.constants = constants_;
  FieldState state = std::move(initial);
  long k = 0;
  for (double target : targets) {
    if (!(target > state.time)) continue;
    const double span = target - state.time;
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
    const double start_time = state.time;
    for (long s = 0; s < steps; ++s) {
      const double h = s + 1 < steps ? dt : target - state.time;
      StepDiagnostics diag = step(state, h, k);
      if (s + 1 == steps) state.time = target;
      else state.time = start_time + (s + 1) * dt;
      diag.t = state.time;
      result.energy_bound_held = result.energy_bound_held && diag.energy_bound_held;
      if (observer) observer(state, diag);
      result.trace.push_back(std::move(diag));
      ++k;
      if (config_.max_steps > 0 && k >= config_.max_steps) {
        result.final_state = state;
        result.timings = timings_;
        return result;
      }
    }
    result.snapshots.push_back(state);
  }
  result.final_state = std::move(state);
  result.timings = timings_;
  return result;
}

Eigen::MatrixXd conserved_field(const MomentBasis& basis, const FieldState& state) {
  const Eigen::Index cells = state.mesh.cells();
  MatrixXd out(basis.dim() + 2, cells);
  for (Eigen::Index c = 0; c < cells; ++c) {
    out.col(c) = basis.dim() == 1 ? raw_conserved(basis, state.h1.col(c))
                                  : raw_conserved(basis, state.h1.col(c), state.h2.col(c));
  }
  return out;
}

std::vector<MacroState> macro_field(const MomentBasis& basis, const FieldState& state) {
  std::vector<MacroState> out;
  out.reserve(static_cast<std::size_t>(state.mesh.cells()));
  for (Eigen::Index c = 0; c < state.mesh.cells(); ++c) {
    out.push_back(basis.dim() == 1 ? macro_from_moments(basis, state.h1.col(c))
                                   : macro_from_moments(basis, state.h1.col(c), state.h2.col(c)));
  }
  return out;
}

}  // namespace posmom
