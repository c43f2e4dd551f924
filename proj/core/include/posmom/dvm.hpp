#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "posmom/cases.hpp"
#include "posmom/closure_entropy.hpp"
#include "posmom/kinetic.hpp"

namespace posmom {

/// Node values of every cell; columns are cells.
struct DvmState {
  Mesh mesh;
  double time = 0.0;
  Eigen::MatrixXd h1;  ///< N x cells; the pdf in 1D
  Eigen::MatrixXd h2;  ///< N x cells in 2D, empty in 1D

  int pdf_count() const { return h2.size() == 0 ? 1 : 2; }
};

enum class DvmCollision {
  /// Explicit Euler: w + dt/tau (w_M - w), applied with transport.
  kExplicit,
  /// Implicit relaxation (w + r w_M) / (1 + r), then transport. Matches the
  /// moment scheme's splitting.
  kImplicitSplit,
};

struct DvmConfig {
  double kn = 0.1;
  double c_coll = 1.0;
  double omega = 1.0;
  double t_end = 0.0;
  double dt = 0.0;  ///< 0 selects cfl_dt(cfl_mode, cfl_safety)
  CflMode cfl_mode = CflMode::kStability;
  double cfl_safety = 1.0;
  bool allow_unsafe_dt = false;
  DvmCollision collision = DvmCollision::kExplicit;
  EntropyOptions entropy;
  std::vector<double> output_times;
  long max_steps = -1;
};

struct DvmStepDiagnostics {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double min_weight = 0.0;
  double entropy_iterations_mean = 0.0;
  /// Net node values entering through the boundary, N x pdfs; the mass
  /// change is L^T of each column.
  Eigen::MatrixXd boundary_inflow;
};

struct DvmResult {
  DvmState final_state;
  std::vector<DvmState> snapshots;
  std::vector<DvmStepDiagnostics> trace;
};

using DvmObserver = std::function<void(const DvmState&, const DvmStepDiagnostics&)>;

DvmState dvm_initialize(const VelocityGrid& grid, const Mesh& mesh, const InitialData& initial, int points = 10);

/// Explicit-Euler upwind discrete velocity solver with BGK relaxation toward
/// the discrete Maxwellian.
class DvmSolver {
 public:
  DvmSolver(std::shared_ptr<const VelocityGrid> grid, BoundaryData boundary, DvmConfig config);

  const VelocityGrid& grid() const { return *grid_; }
  const DvmConfig& config() const { return config_; }

  double time_step(const Mesh& mesh) const;

  /// One step in place. Throws CflViolation when a weight turns negative.
  DvmStepDiagnostics step(DvmState& state, double dt, long step_index = 0) const;

  DvmResult evolve(DvmState initial, const DvmObserver& observer = {}) const;

 private:
  std::shared_ptr<const VelocityGrid> grid_;
  BoundaryData boundary_;
  DvmConfig config_;
};

DvmStepDiagnostics dvm_step(DvmState& state, std::shared_ptr<const VelocityGrid> grid, const BoundaryData& boundary,
                            double dt, const DvmConfig& config);

/// Raw conserved moments per cell, (dim + 2) x cells.
Eigen::MatrixXd conserved_field(const VelocityGrid& grid, const DvmState& state);

struct RefinementOptions {
  double tolerance = 1e-5;
  double c = 3.5;
  int n_start = 50;
  int n_step = 50;
  int n_max = 350;
  double widen = 0.5;
  double max_half_width = 10.0;
  /// Cells per axis; 0 keeps the case default.
  int nx = 0;
  /// dt = dt_factor dx / max|xi| (per-dimension CFL factor included by the
  /// caller); 0 selects the stability CFL.
  double dt_factor = 0.0;
};

struct RefinementCycle {
  VelocityBox box;
  int nodes = 0;
  /// Max over conserved quantities of the relative change in their spatial
  /// L2 norms against the previous N of the same box; NaN for the first N.
  double delta = 0.0;
};

struct RefinementOutcome {
  VelocityBox box;
  int nodes = 0;
  bool converged = false;
  std::vector<RefinementCycle> cycles;
  DvmState solution;  ///< at t_end on the final configuration
};

using RefinementObserver = std::function<void(const RefinementCycle&)>;

/// Reference refinement: estimate the box from the velocity cutoff, run
/// N = n_start, n_start + n_step, ... up to n_max, stop when the conserved
/// totals change by less than `tolerance` between consecutive N; otherwise
/// widen the box by `widen` per side and restart from n_start.
RefinementOutcome refine_reference(const CaseSpec& spec, const RefinementOptions& options = {},
                                   const RefinementObserver& observer = {});

}  // namespace posmom
